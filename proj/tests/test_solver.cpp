#include <doctest.h>

#include "aderdg/problems.hpp"
#include "aderdg/solver.hpp"

#include <limits>
#include <random>

using namespace aderdg;

namespace {

struct Fixture {
  PrecisionContext ctx = make_context(120);
  SolverConfig<Real> cfg;
  Fixture() {
    ctx.activate();
    cfg = default_solver_config(ctx);
  }
  std::shared_ptr<const AderDgTableau> tab(int N, NodeFamily f = NodeFamily::gauss_legendre) const {
    return std::make_shared<const AderDgTableau>(build_tableau(N, f, ctx));
  }
};

Real max_abs(const MatrixR& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("mode names") {
  CHECK(parse_jacobian_mode("analytic") == JacobianMode::analytic);
  CHECK(parse_jacobian_mode("fd") == JacobianMode::finite_difference);
  CHECK(parse_jacobian_mode("finite-difference") == JacobianMode::finite_difference);
  CHECK(parse_jacobian_mode("picard") == JacobianMode::picard);
  CHECK(to_string(JacobianMode::picard) == "picard");
  CHECK_THROWS_AS(parse_jacobian_mode("broyden"), ParseError);
}

TEST_CASE("default tolerances follow the working precision") {
  Fixture f;
  CHECK(abs(f.cfg.stage_tol / pow10(-100) - 1) < pow10(-90));
  CHECK(abs(f.cfg.fd_step / pow10(-40) - 1) < pow10(-90));
  CHECK(f.cfg.max_newton == 100);
}

TEST_CASE("u' = u with one step of N=1 gives 8/3") {
  Fixture f;
  const auto d = dahlquist(Complex<Real>(Real(1)), f.ctx);
  const Trajectory<Real> tr = integrate(f.tab(1), d.problem, 1, f.cfg);
  CHECK(abs(tr.u[1][0] - Real(8) / 3) <= 10 * f.cfg.stage_tol);
  CHECK(tr.intervals() == 1);
}

TEST_CASE("node update of u' = lambda u equals R(lambda dt)") {
  Fixture f;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(0, 6.283185307179586), rad(0, 2);
  for (int N : {1, 3}) {
    const auto tab = f.tab(N);
    for (int k = 0; k < 10; ++k) {
      const double r = rad(rng), th = ang(rng);
      // half the samples on the real axis
      const Complex<Real> lam = k % 2 ? Complex<Real>(Real(r * std::cos(th)), Real(r * std::sin(th)))
                                      : Complex<Real>(Real(-r));
      const auto d = dahlquist(lam, f.ctx);
      const LocalSolution<Real> loc = step(*tab, d.problem, d.problem.u0, Real(0), Real(1), f.cfg);
      const Complex<Real> R = stability_function(*tab, lam, f.ctx);
      CAPTURE(k);
      CHECK(abs(loc.u_next[0] - R.re) <= 10 * f.cfg.stage_tol);
      if (d.problem.dim == 2) CHECK(abs(loc.u_next[1] - R.im) <= 10 * f.cfg.stage_tol);
    }
  }
}

TEST_CASE("stiff decay in one step") {
  Fixture f;
  const auto d = dahlquist(Complex<Real>(-pow10(6)), f.ctx);
  const Trajectory<Real> tr = integrate(f.tab(2), d.problem, 1, f.cfg);
  CHECK(abs(tr.u[1][0]) <= Real("1e-5"));
}

TEST_CASE("nodal consistency is exact") {
  Fixture f;
  const auto h = harmonic_oscillator(f.ctx);
  const auto tab = f.tab(4);
  const Trajectory<Real> tr = integrate(tab, h.problem, 3, f.cfg);
  for (const auto& loc : tr.local) {
    for (int p = 0; p <= 4; ++p) {
      const VectorR v = eval_local_tau(loc, tab->basis, tab->tau()[p]);
      CHECK(v == VectorR(loc.qhat.row(p).transpose()));
    }
  }
}

TEST_CASE("predictor system and endpoint identity") {
  Fixture f;
  const auto p = pendulum(f.ctx);
  const auto tab = f.tab(3);
  const Trajectory<Real> tr = integrate(tab, p.problem, 8, f.cfg);
  for (size_t n = 0; n < tr.local.size(); ++n) {
    const auto& loc = tr.local[n];
    CHECK(predictor_residual(*tab, p.problem, tr.u[n], loc.t_n, loc.dt_n, loc.qhat) <= 10 * f.cfg.stage_tol);
  }
  CHECK(local_endpoint_mismatch(tr) <= 10 * f.cfg.stage_tol);
}

TEST_CASE("predictor defect at tau = 0 shrinks at order >= N+1") {
  Fixture f;
  const auto h = harmonic_oscillator(f.ctx);
  const int N = 3;
  const auto tab = f.tab(N);
  Real prev(0);
  for (int k = 0; k < 4; ++k) {
    const Real dt = Real(1) / (4 << k);
    const LocalSolution<Real> loc = step(*tab, h.problem, h.problem.u0, Real(0), dt, f.cfg);
    const Real defect = max_abs(eval_local_tau(loc, tab->basis, Real(0)) - h.problem.u0);
    CHECK(defect > 0);
    CAPTURE(k);
    if (k > 0) CHECK(log2(prev / defect) >= N + 1 - Real("0.05"));
    prev = defect;
  }
}

TEST_CASE("polynomial right-hand sides of degree < N are reproduced") {
  Fixture f;
  const auto tab = f.tab(4);
  const auto e = polynomial_rhs(3, 5, f.ctx);
  const Trajectory<Real> tr = integrate(tab, e.problem, 3, f.cfg);
  for (const auto& loc : tr.local) {
    for (int j = 0; j <= 10; ++j) {
      const Real t = loc.t_n + loc.dt_n * j / 10;
      CHECK(max_abs(eval_local(loc, tab->basis, t) - e.problem.exact(t)) <= 100 * f.cfg.stage_tol);
    }
  }
}

TEST_CASE("Jacobian modes agree") {
  Fixture f;
  const auto p = pendulum(f.ctx);
  const auto tab = f.tab(3);
  const Real dt("0.05");
  const LocalSolution<Real> ref = step(*tab, p.problem, p.problem.u0, Real(0), dt, f.cfg);
  for (JacobianMode m : {JacobianMode::finite_difference, JacobianMode::picard}) {
    SolverConfig<Real> c = f.cfg;
    c.mode = m;
    const LocalSolution<Real> loc = step(*tab, p.problem, p.problem.u0, Real(0), dt, c);
    CHECK(max_abs(loc.u_next - ref.u_next) <= 10 * f.cfg.stage_tol);
  }
  // a problem without a Jacobian falls back to finite differences
  OdeProblem<Real> nojac = p.problem;
  nojac.jacobian = nullptr;
  const LocalSolution<Real> loc = step(*tab, nojac, nojac.u0, Real(0), dt, f.cfg);
  CHECK(max_abs(loc.u_next - ref.u_next) <= 10 * f.cfg.stage_tol);
}

TEST_CASE("Picard mode checks the contraction bound") {
  Fixture f;
  const auto h = harmonic_oscillator(f.ctx);
  SolverConfig<Real> c = f.cfg;
  c.mode = JacobianMode::picard;
  CHECK_THROWS_AS(integrate(f.tab(2), h.problem, 4, c), SolverError);
  CHECK_NOTHROW(integrate(f.tab(2), h.problem, 200, c));
  c.lipschitz = Real(100);
  CHECK_THROWS_AS(integrate(f.tab(2), h.problem, 200, c), SolverError);
  CHECK(abs(estimate_lipschitz(h.problem, h.problem.u0, Real(0), f.cfg.fd_step) - 1) < pow10(-100));
}

TEST_CASE("solver failures name the interval") {
  Fixture f;
  OdeProblem<Real> bad;
  bad.dim = 1;
  bad.rhs = [](const VectorR& u, const Real& t) {
    if (t > Real("0.6")) return VectorR(VectorR::Constant(1, Real(std::numeric_limits<double>::quiet_NaN())));
    return VectorR(-u);
  };
  bad.t0 = 0;
  bad.tf = 1;
  bad.u0 = VectorR::Ones(1);
  try {
    integrate(f.tab(2), bad, 4, f.cfg);
    FAIL("expected a SolverError");
  } catch (const SolverError& e) {
    CHECK(e.interval() == 2);
    CHECK(std::string(e.what()).find("interval 2") != std::string::npos);
  }
}

TEST_CASE("explicit node lists") {
  Fixture f;
  const auto d = dahlquist(Complex<Real>(Real(-1)), f.ctx);
  const auto tab = f.tab(3);
  const std::vector<Real> nodes{Real(0), Real("0.1"), Real("0.35"), Real(1)};
  const Trajectory<Real> tr = integrate(tab, d.problem, nodes, f.cfg);
  CHECK(tr.intervals() == 3);
  CHECK(abs(tr.u.back()[0] - exp(Real(-1))) < Real("1e-6"));
  CHECK_THROWS_AS(integrate(tab, d.problem, std::vector<Real>{Real(0), Real("0.5"), Real("0.5"), Real(1)}, f.cfg),
                  SolverError);
  CHECK_THROWS_AS(integrate(tab, d.problem, std::vector<Real>{Real(0), Real("0.5")}, f.cfg), SolverError);
  CHECK_THROWS_AS(eval_local(tr.local[0], tab->basis, Real("0.2")), SolverError);
}

TEST_CASE("double instantiation") {
  const PrecisionContext ctx = make_context(60);
  ctx.activate();
  const auto tab = std::make_shared<const Tableau<double>>(build_tableau(4, NodeFamily::gauss_legendre, ctx).cast<double>());
  OdeProblem<double> h;
  h.dim = 2;
  h.rhs = [](const Vector<double>& u, const double&) { return Vector<double>((Vector<double>(2) << u[1], -u[0]).finished()); };
  h.t0 = 0;
  h.tf = 1;
  h.u0 = (Vector<double>(2) << 1, 0).finished();
  const Trajectory<double> tr = integrate(tab, h, 4, default_solver_config_double());
  CHECK(tr.u.back()[0] == doctest::Approx(std::cos(1.0)).epsilon(1e-12));
  CHECK(tr.u.back()[1] == doctest::Approx(-std::sin(1.0)).epsilon(1e-12));
}
