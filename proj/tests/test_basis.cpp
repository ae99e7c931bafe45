#include <doctest.h>

#include "aderdg/basis.hpp"

using namespace aderdg;

namespace {

Real max_abs(const MatrixR& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("family names") {
  CHECK(parse_family("gauss-legendre") == NodeFamily::gauss_legendre);
  CHECK(parse_family("radau-left") == NodeFamily::radau_left);
  CHECK(parse_family("radau-right") == NodeFamily::radau_right);
  CHECK(to_string(NodeFamily::radau_right) == "radau-right");
  CHECK_THROWS(parse_family("lobatto"));
}

TEST_CASE("shifted Legendre against explicit polynomials") {
  const PrecisionContext ctx = make_context(60);
  ctx.activate();
  const Real t("0.3");
  auto [p2, d2] = shifted_legendre(2, t);
  CHECK(abs(p2 - (6 * t * t - 6 * t + 1)) < pow10(-58));
  CHECK(abs(d2 - (12 * t - 6)) < pow10(-58));
  auto [p3, d3] = shifted_legendre(3, t);
  CHECK(abs(p3 - (20 * t * t * t - 30 * t * t + 12 * t - 1)) < pow10(-58));
  CHECK(abs(d3 - (60 * t * t - 60 * t + 12)) < pow10(-58));
}

TEST_CASE("Gauss-Legendre nodes and weights in closed form") {
  const PrecisionContext ctx = make_context(120);
  ctx.activate();
  const Real tol = pow10(-115);

  const VectorR t1 = compute_nodes(1, NodeFamily::gauss_legendre, ctx);
  CHECK(abs(t1[0] - (Real(1) / 2 - sqrt(Real(3)) / 6)) < tol);
  CHECK(abs(t1[1] - (Real(1) / 2 + sqrt(Real(3)) / 6)) < tol);

  const NodalBasis<Real> b2 = build_basis(2, NodeFamily::gauss_legendre, ctx);
  CHECK(abs(b2.tau[0] - (Real(1) / 2 - sqrt(Real(15)) / 10)) < tol);
  CHECK(abs(b2.tau[1] - Real(1) / 2) < tol);
  CHECK(abs(b2.tau[2] - (Real(1) / 2 + sqrt(Real(15)) / 10)) < tol);
  CHECK(abs(b2.w[0] - Real(5) / 18) < tol);
  CHECK(abs(b2.w[1] - Real(4) / 9) < tol);
  CHECK(abs(b2.w[2] - Real(5) / 18) < tol);
}

TEST_CASE("Radau nodes") {
  const PrecisionContext ctx = make_context(120);
  ctx.activate();
  const Real tol = pow10(-115);
  const VectorR r = compute_nodes(1, NodeFamily::radau_right, ctx);
  CHECK(abs(r[0] - Real(1) / 3) < tol);
  CHECK(abs(r[1] - 1) < tol);
  const VectorR l = compute_nodes(1, NodeFamily::radau_left, ctx);
  CHECK(abs(l[0]) < tol);
  CHECK(abs(l[1] - Real(2) / 3) < tol);
  // right Radau N=2: (4 -+ sqrt 6)/10 and 1
  const VectorR r2 = compute_nodes(2, NodeFamily::radau_right, ctx);
  CHECK(abs(r2[0] - (4 - sqrt(Real(6))) / 10) < tol);
  CHECK(abs(r2[1] - (4 + sqrt(Real(6))) / 10) < tol);
  CHECK(abs(r2[2] - 1) < tol);
}

TEST_CASE("nodes are roots, ascending and inside [0,1]") {
  const PrecisionContext ctx = make_context(120);
  ctx.activate();
  for (int N : {0, 1, 5, 12, 24}) {
    for (NodeFamily f : {NodeFamily::gauss_legendre, NodeFamily::radau_left, NodeFamily::radau_right}) {
      const VectorR tau = compute_nodes(N, f, ctx);
      REQUIRE(tau.size() == N + 1);
      for (int p = 0; p <= N; ++p) {
        CHECK(tau[p] >= 0);
        CHECK(tau[p] <= 1);
        if (p > 0) CHECK(tau[p] > tau[p - 1]);
        Real v = shifted_legendre(N + 1, tau[p]).first;
        if (f == NodeFamily::radau_left) v += shifted_legendre(N, tau[p]).first;
        if (f == NodeFamily::radau_right) v -= shifted_legendre(N, tau[p]).first;
        CHECK(abs(v) < pow10(-105));
      }
    }
  }
}

TEST_CASE("Lagrange basis is cardinal and weights are consistent") {
  const PrecisionContext ctx = make_context(120);
  ctx.activate();
  for (int N : {1, 4, 10}) {
    for (NodeFamily f : {NodeFamily::gauss_legendre, NodeFamily::radau_right}) {
      const NodalBasis<Real> b = build_basis(N, f, ctx);
      MatrixR vals(N + 1, N + 1);
      for (int q = 0; q <= N; ++q) vals.col(q) = eval_basis(b, b.tau[q]);
      CHECK(max_abs(vals - MatrixR::Identity(N + 1, N + 1)) < pow10(-100));
      CHECK(abs(b.w.sum() - 1) < pow10(-110));
      for (int p = 0; p <= N; ++p) CHECK(b.w[p] > 0);
      CHECK(max_abs(b.psi - eval_basis(b, Real(0))) < pow10(-100));
      CHECK(max_abs(b.psi_tilde - eval_basis(b, Real(1))) < pow10(-100));
      // partition of unity
      CHECK(abs(eval_basis(b, Real("0.37")).sum() - 1) < pow10(-100));
    }
    // GL quadrature orthogonality makes int phi_p^2 = int phi_p
    CHECK(weight_definition_residual(compute_nodes(N, NodeFamily::gauss_legendre, ctx), ctx) < pow10(-100));
  }
}

TEST_CASE("Gauss-Legendre symmetry psi~_p = psi_{N-p}") {
  const PrecisionContext ctx = make_context(120);
  ctx.activate();
  const NodalBasis<Real> b = build_basis(7, NodeFamily::gauss_legendre, ctx);
  for (int p = 0; p <= 7; ++p) {
    CHECK(abs(b.psi_tilde[p] - b.psi[7 - p]) < pow10(-100));
    CHECK(abs(b.tau[p] + b.tau[7 - p] - 1) < pow10(-110));
  }
}

TEST_CASE("coincident nodes are rejected") {
  const PrecisionContext ctx = make_context(60);
  ctx.activate();
  VectorR tau(3);
  tau << Real("0.2"), Real("0.5"), Real("0.5");
  CHECK_THROWS_AS(lagrange_coefficients(tau, ctx), BasisError);
}

TEST_CASE("conditioning guard") {
  CHECK(min_digits_for_order(0) == 40);
  CHECK(min_digits_for_order(24) == 57);
  CHECK(min_digits_for_order(10) == 47);
  CHECK_NOTHROW(check_conditioning(24, make_context(60)));
  CHECK_THROWS_AS(check_conditioning(100, make_context(60)), PrecisionError);
}

TEST_CASE("double cast keeps the basis usable") {
  const PrecisionContext ctx = make_context(60);
  ctx.activate();
  const NodalBasis<double> b = build_basis(3, NodeFamily::gauss_legendre, ctx).cast<double>();
  const Vector<double> v = eval_basis(b, b.tau[1]);
  CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-12));
}
