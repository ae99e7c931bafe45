#pragma once

// Quadrature nodes, weights and the nodal Lagrange basis on the reference
// interval [0,1].

#include "aderdg/arith.hpp"

#include <string_view>
#include <utility>

namespace aderdg {

enum class NodeFamily { gauss_legendre, radau_left, radau_right };

std::string_view to_string(NodeFamily family);
/// Accepts "gauss-legendre", "radau-left", "radau-right".
NodeFamily parse_family(std::string_view name);

class BasisError : public Error {
 public:
  using Error::Error;
};

/// Nodal basis of degree N: phi(p, k) is the coefficient of tau^k in phi_p.
template <typename Scalar>
struct NodalBasis {
  int n = 0;
  NodeFamily family = NodeFamily::gauss_legendre;
  Vector<Scalar> tau;
  Vector<Scalar> w;
  Matrix<Scalar> phi;
  Vector<Scalar> psi;        // phi_p(0)
  Vector<Scalar> psi_tilde;  // phi_p(1)

  int stages() const { return n + 1; }

  template <typename Other>
  NodalBasis<Other> cast() const {
    return {n, family, tau.template cast<Other>(), w.template cast<Other>(), phi.template cast<Other>(),
            psi.template cast<Other>(), psi_tilde.template cast<Other>()};
  }
};

/// Value and d/dtau of the shifted Legendre polynomial P~_n(tau) = P_n(2 tau - 1).
template <typename Scalar>
std::pair<Scalar, Scalar> shifted_legendre(int n, const Scalar& tau) {
  const Scalar x = Scalar(2) * tau - Scalar(1);
  Scalar p_prev(1), p(x);
  Scalar d_prev(0), d(1);  // dP/dx
  if (n == 0) return {p_prev, d_prev};
  for (int k = 1; k < n; ++k) {
    Scalar p_next = (Scalar(2 * k + 1) * x * p - Scalar(k) * p_prev) / Scalar(k + 1);
    Scalar d_next = d_prev + Scalar(2 * k + 1) * p;
    p_prev = std::move(p);
    p = std::move(p_next);
    d_prev = std::move(d);
    d = std::move(d_next);
  }
  return {p, Scalar(2) * d};
}

/// Ascending nodes of the family: roots of P~_{N+1} (Gauss-Legendre),
/// P~_{N+1} + P~_N (left Radau, contains 0) or P~_{N+1} - P~_N (right Radau,
/// contains 1).
VectorR compute_nodes(int N, NodeFamily family, const PrecisionContext& ctx);

/// w_p = integral of phi_p over [0,1], by exact monomial integration.
VectorR compute_weights(const VectorR& tau, const PrecisionContext& ctx);

/// Maximum |integral(phi_p^2) - integral(phi_p)| over p.
Real weight_definition_residual(const VectorR& tau, const PrecisionContext& ctx);

struct LagrangeCoefficients {
  MatrixR phi;
  VectorR psi;
  VectorR psi_tilde;
};

LagrangeCoefficients lagrange_coefficients(const VectorR& tau, const PrecisionContext& ctx);

NodalBasis<Real> build_basis(int N, NodeFamily family, const PrecisionContext& ctx);

/// phi_p(tau) for all p by Horner; tau outside [0,1] is allowed.
template <typename Scalar>
Vector<Scalar> eval_basis(const NodalBasis<Scalar>& basis, const Scalar& tau) {
  const Eigen::Index s = basis.phi.rows();
  Vector<Scalar> out(s);
  for (Eigen::Index p = 0; p < s; ++p) {
    Scalar acc(0);
    for (Eigen::Index k = basis.phi.cols(); k-- > 0;) acc = acc * tau + basis.phi(p, k);
    out[p] = acc;
  }
  return out;
}

/// Smallest working precision the tableau builder accepts for degree N.
int min_digits_for_order(int N);
void check_conditioning(int N, const PrecisionContext& ctx);

}  // namespace aderdg
