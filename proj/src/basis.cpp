#include "aderdg/basis.hpp"

#include "aderdg/detail/polynomial.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace aderdg {

namespace {

constexpr int kMaxNewton = 200;

// Family polynomial and its derivative: P~_{N+1} + sign * P~_N.
template <typename Scalar>
std::pair<Scalar, Scalar> family_poly(int N, int sign, const Scalar& tau) {
  auto [p1, d1] = shifted_legendre(N + 1, tau);
  if (sign == 0) return {p1, d1};
  auto [p0, d0] = shifted_legendre(N, tau);
  if (sign > 0) return {p1 + p0, d1 + d0};
  return {p1 - p0, d1 - d0};
}

Real polish_root(int N, int sign, Real tau, const PrecisionContext& ctx) {
  const Real floor = Real(100) * ctx.unit_roundoff;
  const Real step_tol = Real(10) * ctx.unit_roundoff;
  for (int it = 0; it < kMaxNewton; ++it) {
    auto [f, df] = family_poly(N, sign, tau);
    if (df == 0) break;
    Real delta = f / df;
    tau -= delta;
    if (abs(delta) <= step_tol) {
      // one more pass so the residual reflects the updated iterate
      auto [f2, df2] = family_poly(N, sign, tau);
      if (abs(f2) <= floor) return tau;
      if (df2 != 0) tau -= f2 / df2;
      if (abs(family_poly(N, sign, tau).first) <= floor) return tau;
    }
  }
  throw BasisError("Newton iteration for nodes of degree " + std::to_string(N) +
                   " did not converge; precision or initial guess is inadequate");
}

VectorR gauss_legendre_nodes(int N, const PrecisionContext& ctx) {
  const int n = N + 1;
  VectorR tau(n);
  const double pi = boost::math::constants::pi<double>();
  for (int i = 0; i < n; ++i) {
    // roots of P_n descend in x as i increases; map to ascending tau
    const double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    tau[n - 1 - i] = polish_root(N, 0, Real((1.0 + x) / 2.0), ctx);
  }
  return tau;
}

// Interior roots of P~_{N+1} - P~_N on (0,1), bracketed in double precision
// on a cosine-spaced grid and polished at working precision.
std::vector<Real> right_radau_interior(int N, const PrecisionContext& ctx) {
  std::vector<Real> roots;
  if (N == 0) return roots;
  const int samples = 64 * (N + 2);
  const double pi = boost::math::constants::pi<double>();
  auto f = [N](double t) { return family_poly<double>(N, -1, t).first; };
  auto grid = [&](int j) { return 0.5 * (1.0 - std::cos(pi * j / samples)); };
  double a = grid(0), fa = f(a);
  for (int j = 1; j < samples && static_cast<int>(roots.size()) < N; ++j) {
    double b = grid(j), fb = f(b);
    if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
      double lo = a, hi = b, flo = fa;
      for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(polish_root(N, -1, Real(0.5 * (lo + hi)), ctx));
    }
    a = b;
    fa = fb;
  }
  if (static_cast<int>(roots.size()) != N) {
    throw BasisError("failed to bracket all Radau nodes for degree " + std::to_string(N));
  }
  return roots;
}

}  // namespace

std::string_view to_string(NodeFamily family) {
  switch (family) {
    case NodeFamily::gauss_legendre: return "gauss-legendre";
    case NodeFamily::radau_left: return "radau-left";
    case NodeFamily::radau_right: return "radau-right";
  }
  return "unknown";
}

NodeFamily parse_family(std::string_view name) {
  if (name == "gauss-legendre") return NodeFamily::gauss_legendre;
  if (name == "radau-left") return NodeFamily::radau_left;
  if (name == "radau-right") return NodeFamily::radau_right;
  throw ParseError("unknown node family '" + std::string(name) +
                   "' (expected gauss-legendre, radau-left or radau-right)");
}

VectorR compute_nodes(int N, NodeFamily family, const PrecisionContext& ctx) {
  if (N < 0) throw BasisError("polynomial degree must be non-negative");
  ctx.activate();
  if (family == NodeFamily::gauss_legendre) return gauss_legendre_nodes(N, ctx);

  std::vector<Real> interior = right_radau_interior(N, ctx);
  VectorR tau(N + 1);
  if (family == NodeFamily::radau_right) {
    for (int p = 0; p < N; ++p) tau[p] = interior[static_cast<size_t>(p)];
    tau[N] = Real(1);
  } else {
    // left Radau nodes mirror the right ones
    tau[0] = Real(0);
    for (int p = 1; p <= N; ++p) tau[p] = Real(1) - interior[static_cast<size_t>(N - p)];
  }
  return tau;
}

LagrangeCoefficients lagrange_coefficients(const VectorR& tau, const PrecisionContext& ctx) {
  ctx.activate();
  const Eigen::Index s = tau.size();
  LagrangeCoefficients out{MatrixR::Zero(s, s), VectorR(s), VectorR(s)};
  for (Eigen::Index p = 0; p < s; ++p) {
    VectorR c = VectorR::Zero(s);
    c[0] = Real(1);
    Eigen::Index degree = 0;
    Real denom(1);
    for (Eigen::Index k = 0; k < s; ++k) {
      if (k == p) continue;
      const Real gap = tau[p] - tau[k];
      if (abs(gap) <= ctx.unit_roundoff) {
        throw BasisError("coincident nodes at indices " + std::to_string(p) + " and " + std::to_string(k));
      }
      denom *= gap;
      // c <- c * (x - tau_k)
      for (Eigen::Index j = degree + 1; j > 0; --j) c[j] = c[j - 1] - tau[k] * c[j];
      c[0] = -tau[k] * c[0];
      ++degree;
    }
    out.phi.row(p) = (c / denom).transpose();
  }
  for (Eigen::Index p = 0; p < s; ++p) {
    out.psi[p] = out.phi(p, 0);
    out.psi_tilde[p] = out.phi.row(p).sum();
  }
  return out;
}

VectorR compute_weights(const VectorR& tau, const PrecisionContext& ctx) {
  const LagrangeCoefficients lc = lagrange_coefficients(tau, ctx);
  VectorR w(tau.size());
  for (Eigen::Index p = 0; p < tau.size(); ++p) w[p] = detail::integrate<Real>(lc.phi.row(p));
  return w;
}

Real weight_definition_residual(const VectorR& tau, const PrecisionContext& ctx) {
  const LagrangeCoefficients lc = lagrange_coefficients(tau, ctx);
  Real worst(0);
  for (Eigen::Index p = 0; p < tau.size(); ++p) {
    const Real linear = detail::integrate<Real>(lc.phi.row(p));
    const Real square = detail::integrate_product<Real>(lc.phi.row(p), lc.phi.row(p));
    worst = std::max(worst, Real(abs(linear - square)));
  }
  return worst;
}

int min_digits_for_order(int N) { return static_cast<int>(std::ceil(0.7 * N + 40.0)); }

void check_conditioning(int N, const PrecisionContext& ctx) {
  const int needed = min_digits_for_order(N);
  if (ctx.decimal_digits < needed) {
    throw PrecisionError("degree " + std::to_string(N) + " needs at least " + std::to_string(needed) +
                         " decimal digits (0.7*N + 40), got " + std::to_string(ctx.decimal_digits));
  }
}

NodalBasis<Real> build_basis(int N, NodeFamily family, const PrecisionContext& ctx) {
  NodalBasis<Real> basis;
  basis.n = N;
  basis.family = family;
  basis.tau = compute_nodes(N, family, ctx);
  LagrangeCoefficients lc = lagrange_coefficients(basis.tau, ctx);
  basis.w.resize(N + 1);
  for (int p = 0; p <= N; ++p) basis.w[p] = detail::integrate<Real>(lc.phi.row(p));
  basis.phi = std::move(lc.phi);
  basis.psi = std::move(lc.psi);
  basis.psi_tilde = std::move(lc.psi_tilde);
  return basis;
}

}  // namespace aderdg
