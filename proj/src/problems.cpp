#include "aderdg/problems.hpp"

#include <algorithm>
#include <charconv>
#include <random>

namespace aderdg {

namespace {

Real pi_value() { return 4 * atan(Real(1)); }

int parse_int(std::string_view s, const char* what) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(s) + "'");
  }
  return static_cast<int>(v);
}

std::uint64_t parse_seed(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("malformed seed '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(ReferenceKind kind) {
  return kind == ReferenceKind::exact_closed_form ? "exact-closed-form" : "high-order-oracle";
}

ProblemCatalogEntry harmonic_oscillator(const PrecisionContext& ctx) {
  ctx.activate();
  ProblemCatalogEntry e;
  e.name = "harmonic";
  e.note = "x'' + x = 0, x(0) = 1, x'(0) = 0 on [0, 4 pi]";
  auto& p = e.problem;
  p.dim = 2;
  p.rhs = [](const VectorR& u, const Real&) {
    VectorR f(2);
    f << u[1], -u[0];
    return f;
  };
  p.jacobian = [](const VectorR&, const Real&) {
    MatrixR J(2, 2);
    J << 0, 1, -1, 0;
    return J;
  };
  p.exact = [](const Real& t) {
    VectorR u(2);
    u << cos(t), -sin(t);
    return u;
  };
  p.t0 = 0;
  p.tf = 4 * pi_value();
  p.u0 = VectorR(2);
  p.u0 << 1, 0;
  e.invariant = [](const VectorR& u) { return Real(u.squaredNorm()); };
  return e;
}

Real pendulum_energy(const VectorR& u) { return u[1] * u[1] / 2 - cos(u[0]); }

ProblemCatalogEntry pendulum(const PrecisionContext& ctx) {
  ctx.activate();
  ProblemCatalogEntry e;
  e.name = "pendulum";
  e.reference_kind = ReferenceKind::high_order_oracle;
  e.note = "phi'' + sin(phi) = 0, phi(0) = pi/2, phi'(0) = 0 on [0, 10]; reference is a self-converged solver run";
  auto& p = e.problem;
  p.dim = 2;
  p.rhs = [](const VectorR& u, const Real&) {
    VectorR f(2);
    f << u[1], -sin(u[0]);
    return f;
  };
  p.jacobian = [](const VectorR& u, const Real&) {
    MatrixR J(2, 2);
    J << 0, 1, -cos(u[0]), 0;
    return J;
  };
  p.t0 = 0;
  p.tf = 10;
  p.u0 = VectorR(2);
  p.u0 << pi_value() / 2, 0;
  e.invariant = pendulum_energy;
  return e;
}

ProblemCatalogEntry dahlquist(const Complex<Real>& lambda, const PrecisionContext& ctx) {
  ctx.activate();
  ProblemCatalogEntry e;
  e.name = "dahlquist:" + format_complex(lambda, 20);
  e.note = "u' = lambda u, u(0) = 1 on [0, 1]";
  auto& p = e.problem;
  p.t0 = 0;
  p.tf = 1;
  if (lambda.im == 0) {
    const Real lam = lambda.re;
    p.dim = 1;
    p.rhs = [lam](const VectorR& u, const Real&) { return VectorR(lam * u); };
    p.jacobian = [lam](const VectorR&, const Real&) { return MatrixR::Constant(1, 1, lam); };
    p.exact = [lam](const Real& t) { return VectorR::Constant(1, exp(lam * t)); };
    p.u0 = VectorR::Ones(1);
  } else {
    MatrixR L(2, 2);
    L << lambda.re, -lambda.im, lambda.im, lambda.re;
    p.dim = 2;
    p.rhs = [L](const VectorR& u, const Real&) { return VectorR(L * u); };
    p.jacobian = [L](const VectorR&, const Real&) { return L; };
    p.exact = [lambda](const Real& t) {
      const Complex<Real> v = exp(Complex<Real>(lambda.re * t, lambda.im * t));
      VectorR u(2);
      u << v.re, v.im;
      return u;
    };
    p.u0 = VectorR(2);
    p.u0 << 1, 0;
  }
  return e;
}

VectorR polynomial_coefficients(int L, std::uint64_t seed, const PrecisionContext& ctx) {
  if (L < 0) throw ParseError("polynomial degree must be non-negative");
  ctx.activate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  VectorR c(L + 1);
  for (int k = 0; k <= L; ++k) c[k] = Real(coeff(rng));
  return c;
}

ProblemCatalogEntry polynomial_rhs(int L, std::uint64_t seed, const PrecisionContext& ctx) {
  const VectorR c = polynomial_coefficients(L, seed, ctx);
  ProblemCatalogEntry e;
  e.name = "poly:" + std::to_string(L) + ":" + std::to_string(seed);
  e.note = "u' = f(t), f a seeded polynomial of degree " + std::to_string(L) + ", u(0) = 1 on [0, 1]";
  auto& p = e.problem;
  p.dim = 1;
  p.rhs = [c](const VectorR&, const Real& t) {
    Real acc(0);
    for (Eigen::Index k = c.size(); k-- > 0;) acc = acc * t + c[k];
    return VectorR::Constant(1, acc);
  };
  p.jacobian = [](const VectorR&, const Real&) { return MatrixR::Zero(1, 1); };
  p.exact = [c](const Real& t) {
    Real acc(0);
    for (Eigen::Index k = c.size(); k-- > 0;) acc = acc * t + c[k] / Real(static_cast<int>(k + 1));
    return VectorR::Constant(1, 1 + acc * t);
  };
  p.t0 = 0;
  p.tf = 1;
  p.u0 = VectorR::Ones(1);
  return e;
}

ProblemCatalogEntry lookup_problem(std::string_view name, const PrecisionContext& ctx) {
  if (name == "harmonic") return harmonic_oscillator(ctx);
  if (name == "pendulum") return pendulum(ctx);
  if (name.rfind("dahlquist:", 0) == 0) {
    ProblemCatalogEntry e = dahlquist(parse_complex(name.substr(10), ctx), ctx);
    e.name = std::string(name);
    return e;
  }
  if (name.rfind("poly:", 0) == 0) {
    const std::string_view rest = name.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected poly:<L>:<seed>");
    return polynomial_rhs(parse_int(rest.substr(0, colon), "degree"), parse_seed(rest.substr(colon + 1)), ctx);
  }
  throw ParseError("unknown problem '" + std::string(name) +
                   "' (expected harmonic, pendulum, dahlquist:<lambda> or poly:<L>:<seed>)");
}

VectorR Oracle::operator()(const Real& t) const {
  const auto& nodes = traj_.t;
  if (t < nodes.front() || t > nodes.back()) throw SolverError("oracle evaluated outside its domain");
  auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
  const size_t j = static_cast<size_t>(std::distance(nodes.begin(), it)) - 1;
  if (t == nodes[j]) return traj_.u[j];
  // one high-order step from the nearest node on the left
  return step(*tab_, problem_, traj_.u[j], nodes[j], Real(t - nodes[j]), config_).u_next;
}

Oracle build_oracle(const ProblemCatalogEntry& entry, const OracleConfig& config, const PrecisionContext& ctx) {
  ctx.activate();
  Oracle o;
  o.digits_ = ctx.decimal_digits;
  o.tab_ = std::make_shared<const AderDgTableau>(build_tableau(config.n_ref, NodeFamily::gauss_legendre, ctx));
  o.problem_ = entry.problem;
  o.config_ = default_solver_config(ctx);

  int m = config.m_ref;
  Trajectory<Real> coarse = integrate(o.tab_, o.problem_, m, o.config_);
  for (int round = 0; round <= config.max_doublings; ++round) {
    Trajectory<Real> fine = integrate(o.tab_, o.problem_, 2 * m, o.config_);
    Real agreement(0);
    for (size_t n = 0; n < coarse.u.size(); ++n) {
      agreement = std::max(agreement, Real((coarse.u[n] - fine.u[2 * n]).cwiseAbs().maxCoeff()));
    }
    Real drift(0);
    if (entry.invariant) {
      const Real h0 = entry.invariant(o.problem_.u0);
      for (const auto& u : fine.u) drift = std::max(drift, Real(abs(entry.invariant(u) - h0)));
    }
    if (agreement <= config.tolerance && drift <= config.tolerance) {
      o.traj_ = std::move(fine);
      o.agreement_ = agreement;
      o.drift_ = drift;
      return o;
    }
    coarse = std::move(fine);
    m *= 2;
  }
  throw SolverError("oracle did not self-converge within " + std::to_string(config.max_doublings) +
                    " grid doublings");
}

}  // namespace aderdg
