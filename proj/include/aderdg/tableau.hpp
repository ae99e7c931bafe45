#pragma once

// ADER-DG coefficient matrices kappa, mu = diag(w), a = kappa^-1 mu, and the
// verifiers for the algebraic identities and stability properties they obey.

#include "aderdg/arith.hpp"
#include "aderdg/basis.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace aderdg {

class TableauError : public Error {
 public:
  using Error::Error;
};

/// Raised when I - z a is singular (z at a pole of the stability function).
class PoleError : public Error {
 public:
  using Error::Error;
};

template <typename Scalar>
struct Tableau {
  int n = 0;
  NodalBasis<Scalar> basis;
  Matrix<Scalar> kappa;
  Matrix<Scalar> a;
  int digits = 0;  // working precision at build time

  int stages() const { return n + 1; }
  const Vector<Scalar>& tau() const { return basis.tau; }
  const Vector<Scalar>& w() const { return basis.w; }

  template <typename Other>
  Tableau<Other> cast() const {
    return {n, basis.template cast<Other>(), kappa.template cast<Other>(), a.template cast<Other>(), digits};
  }
};

using AderDgTableau = Tableau<Real>;

/// kappa_pq = psi~_p psi~_q - int phi_p' phi_q, by exact monomial integration.
MatrixR build_kappa(const NodalBasis<Real>& basis, const PrecisionContext& ctx);
/// Max difference between the psi~ psi~ form and the psi psi form of kappa,
/// rebuilt from the nodes with guard digits.
Real kappa_forms_residual(const VectorR& tau, const PrecisionContext& ctx);

/// Builds nodes, basis, kappa and a. The construction runs with guard digits
/// above ctx.decimal_digits and rounds the result back to working precision.
AderDgTableau build_tableau(int N, NodeFamily family, const PrecisionContext& ctx);

/// Guard digits used internally by build_tableau for degree N.
int tableau_guard_digits(int N);

struct Lemma21Residuals {
  // sum_q a_pq psi_q - w_p; sum_q kappa^-1_pq psi_q - 1; sum_q kappa_pq - psi_p;
  // sum_p a_pq psi~_p - w_q; sum_p kappa_pq - psi~_q; tr(kappa) - sum psi_p^2
  std::array<Real, 6> r;
  // tr(kappa) - (|psi|^2 + |psi~|^2)/2, which needs no node symmetry
  Real trace_symmetrized;

  Real max() const;
  /// Max over the relations that hold for every N and every family:
  /// 2-5 and the symmetrized trace. The first relation as written holds
  /// only for N <= 1, the sixth only for symmetric nodes.
  Real max_structural() const;
};

Lemma21Residuals verify_lemma21(const AderDgTableau& tab, const PrecisionContext& ctx);

enum class SimplifyingCondition { B, C, D };

/// Max residual of B(L), C(L) or D(L) over 0 <= r < L (and all p).
Real check_simplifying(const AderDgTableau& tab, SimplifyingCondition which, int L, const PrecisionContext& ctx);

struct StabilityMatrices {
  MatrixR Q;
  MatrixR M;
  Real lambda_Q;  // |psi|^2
  Real lambda_M;  // |a^T psi|^2
  Real q_dyadic;        // max |Q - psi psi^T|
  Real q_tilde_dyadic;  // max |Q - psi~ psi~^T|, diagnostic only
  Real m_dyadic;        // max |M - (a^T psi)(a^T psi)^T|
  Real q_asymmetry;     // max |Q - Q^T|
  // Gershgorin bound of the residual E = M - v v^T: every eigenvalue of M is
  // >= -m_gershgorin, and all but the top one are <= m_gershgorin.
  Real m_gershgorin;
};

StabilityMatrices build_Q_M(const AderDgTableau& tab, const PrecisionContext& ctx);

/// R(z) = 1 + z w^T (I - z a)^-1 1.
Complex<Real> stability_function(const AderDgTableau& tab, const Complex<Real>& z, const PrecisionContext& ctx);

/// Numerator (degree N) and denominator (degree N+1) coefficients of the
/// (N, N+1) Pade approximant of exp, lowest degree first.
std::pair<VectorR, VectorR> pade_coefficients(int N, const PrecisionContext& ctx);
Complex<Real> pade_exp(int N, const Complex<Real>& z, const PrecisionContext& ctx);
/// Max |c_k - 1/k!| over k <= 2N+1 for the Taylor coefficients c_k of the Pade approximant.
Real pade_series_residual(int N, const PrecisionContext& ctx);

enum class Expect {
  within,   // residual <= tolerance
  exceeds,  // residual >= tolerance (a condition the method must violate)
  report,   // recorded for diagnostics, no expectation
};

struct VerificationCheck {
  std::string name;
  Real residual;
  Real tolerance;
  Expect expect = Expect::within;

  bool ok() const {
    switch (expect) {
      case Expect::within: return residual <= tolerance;
      case Expect::exceeds: return residual >= tolerance;
      case Expect::report: return true;
    }
    return false;
  }
};

struct VerificationReport {
  int n = 0;
  NodeFamily family = NodeFamily::gauss_legendre;
  std::vector<VerificationCheck> checks;

  bool ok() const;
  const VerificationCheck& find(const std::string& name) const;
};

/// Runs every identity and stability check for the tableau's family.
/// Pseudo-random Pade samples are drawn from `seed`.
VerificationReport verify_tableau(const AderDgTableau& tab, const PrecisionContext& ctx, std::uint64_t seed = 20240601);

/// Max relative |R(z) - Pade(z)| / |Pade(z)| over `count` seeded samples with |z| <= radius.
Real pade_agreement(const AderDgTableau& tab, int count, const Real& radius, std::uint64_t seed,
                    const PrecisionContext& ctx);

// Tableau documents (JSON text, decimal-string entries, row-major matrices).
inline constexpr int kTableauSchemaVersion = 1;

std::string export_tableau(const AderDgTableau& tab);
/// Parses and re-verifies; throws ParseError or TableauError.
AderDgTableau import_tableau(const std::string& document, const PrecisionContext& ctx);

}  // namespace aderdg
