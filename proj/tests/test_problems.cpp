#include <doctest.h>

#include "aderdg/problems.hpp"

using namespace aderdg;

namespace {

PrecisionContext ctx100() {
  const PrecisionContext ctx = make_context(100);
  ctx.activate();
  return ctx;
}

}  // namespace

TEST_CASE("harmonic oscillator") {
  const PrecisionContext ctx = ctx100();
  const auto h = harmonic_oscillator(ctx);
  CHECK(h.name == "harmonic");
  CHECK(h.reference_kind == ReferenceKind::exact_closed_form);
  CHECK(h.problem.dim == 2);
  CHECK((h.problem.exact(Real(0)) - h.problem.u0).cwiseAbs().maxCoeff() == 0);
  CHECK(abs(h.problem.tf - 4 * atan(Real(1)) * 4) < pow10(-98));
  // exact solution has period 2 pi and conserves |u|^2
  const Real t("2.3");
  CHECK(abs(h.invariant(h.problem.exact(t)) - 1) < pow10(-98));
  const VectorR f = h.problem.rhs(h.problem.exact(t), t);
  CHECK(abs(f[0] + sin(t)) < pow10(-98));
  CHECK(abs(f[1] + cos(t)) < pow10(-98));
}

TEST_CASE("pendulum") {
  const PrecisionContext ctx = ctx100();
  const auto p = pendulum(ctx);
  CHECK(p.reference_kind == ReferenceKind::high_order_oracle);
  CHECK(!p.problem.exact);
  CHECK(p.problem.tf == 10);
  CHECK(abs(pendulum_energy(p.problem.u0)) < pow10(-98));
  CHECK(to_string(p.reference_kind) == "high-order-oracle");
}

TEST_CASE("Dahlquist problems") {
  const PrecisionContext ctx = ctx100();
  const auto r = dahlquist(Complex<Real>(Real(-3)), ctx);
  CHECK(r.problem.dim == 1);
  CHECK(abs(r.problem.exact(Real(1))[0] - exp(Real(-3))) < pow10(-98));
  const auto c = dahlquist(Complex<Real>(Real(-1), Real(2)), ctx);
  CHECK(c.problem.dim == 2);
  const VectorR e = c.problem.exact(Real(1));
  CHECK(abs(e[0] - exp(Real(-1)) * cos(Real(2))) < pow10(-98));
  CHECK(abs(e[1] - exp(Real(-1)) * sin(Real(2))) < pow10(-98));
  const VectorR f = c.problem.rhs(c.problem.u0, Real(0));
  CHECK(f[0] == -1);
  CHECK(f[1] == 2);
}

TEST_CASE("seeded polynomial problems") {
  const PrecisionContext ctx = ctx100();
  const VectorR a = polynomial_coefficients(4, 42, ctx);
  const VectorR b = polynomial_coefficients(4, 42, ctx);
  const VectorR c = polynomial_coefficients(4, 43, ctx);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.size() == 5);
  CHECK(a.cwiseAbs().maxCoeff() <= 1);
  const auto e = polynomial_rhs(4, 42, ctx);
  CHECK(e.name == "poly:4:42");
  CHECK(e.problem.exact(Real(0))[0] == 1);
  // exact' = rhs, checked by a central difference
  const Real t("0.4"), h = pow10(-30);
  const Real deriv = (e.problem.exact(Real(t + h))[0] - e.problem.exact(Real(t - h))[0]) / (2 * h);
  CHECK(abs(deriv - e.problem.rhs(VectorR::Ones(1), t)[0]) < pow10(-55));
  CHECK_THROWS_AS(polynomial_coefficients(-1, 1, ctx), ParseError);
}

TEST_CASE("catalog lookup") {
  const PrecisionContext ctx = ctx100();
  CHECK(lookup_problem("harmonic", ctx).name == "harmonic");
  CHECK(lookup_problem("pendulum", ctx).name == "pendulum");
  CHECK(lookup_problem("dahlquist:-1e6", ctx).problem.dim == 1);
  CHECK(lookup_problem("dahlquist:-1+2i", ctx).problem.dim == 2);
  CHECK(lookup_problem("poly:3:7", ctx).name == "poly:3:7");
  CHECK_THROWS_AS(lookup_problem("nosuch", ctx), ParseError);
  CHECK_THROWS_AS(lookup_problem("poly:3", ctx), ParseError);
  CHECK_THROWS_AS(lookup_problem("poly:x:1", ctx), ParseError);
  CHECK_THROWS_AS(lookup_problem("dahlquist:abc", ctx), ParseError);
}

TEST_CASE("pendulum oracle self-converges") {
  const PrecisionContext ctx = ctx100();
  const auto p = pendulum(ctx);
  OracleConfig oc;
  oc.n_ref = 10;
  oc.m_ref = 40;
  oc.tolerance = pow10(-30);
  const Oracle o = build_oracle(p, oc, ctx);
  CHECK(o.agreement() <= oc.tolerance);
  CHECK(o.invariant_drift() <= oc.tolerance);
  CHECK(o.n_ref() == 10);
  CHECK(o.m_ref() >= 80);
  CHECK(o.digits() == 100);
  CHECK((o(Real(0)) - p.problem.u0).cwiseAbs().maxCoeff() == 0);

  // mpmath odefun (Taylor series) at 30 digits
  const VectorR u10 = o(Real(10));
  CHECK(abs(u10[0] - Real("-0.9468624532559034658981255399")) < pow10(-27));
  CHECK(abs(u10[1] - Real("-1.080955458236273212873640138")) < pow10(-27));

  const Real half_pi = 2 * atan(Real(1));
  for (int k = 0; k < 40; ++k) {
    const VectorR u = o(Real(k) / 4 + Real("0.013"));
    CHECK(abs(u[0]) <= half_pi + oc.tolerance);
    CHECK(abs(pendulum_energy(u)) <= 10 * oc.tolerance);
  }
  CHECK_THROWS_AS(o(Real(11)), SolverError);
}

TEST_CASE("oracle gives up when the budget runs out") {
  const PrecisionContext ctx = make_context(60);
  ctx.activate();
  OracleConfig oc;
  oc.n_ref = 2;
  oc.m_ref = 4;
  oc.max_doublings = 1;
  oc.tolerance = pow10(-50);
  CHECK_THROWS_AS(build_oracle(pendulum(ctx), oc, ctx), SolverError);
}
