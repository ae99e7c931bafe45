#pragma once

// Built-in test problems and the high-order oracle used where no closed
// form is implemented.

#include "aderdg/arith.hpp"
#include "aderdg/solver.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace aderdg {

enum class ReferenceKind { exact_closed_form, high_order_oracle };

std::string_view to_string(ReferenceKind kind);

struct ProblemCatalogEntry {
  std::string name;
  OdeProblem<Real> problem;
  ReferenceKind reference_kind = ReferenceKind::exact_closed_form;
  std::string note;
  std::function<Real(const VectorR&)> invariant;  // conserved quantity, if any
};

/// x'' + x = 0 as u = (x, x'), u0 = (1, 0) on [0, 4 pi].
ProblemCatalogEntry harmonic_oscillator(const PrecisionContext& ctx);
/// phi'' + sin(phi) = 0 as u = (phi, phi'), u0 = (pi/2, 0) on [0, 10].
/// No exact solution; see build_oracle.
ProblemCatalogEntry pendulum(const PrecisionContext& ctx);
/// u' = lambda u, u0 = 1 on [0, 1]. Real lambda gives D = 1; complex lambda
/// uses the real embedding u = (Re, Im), D = 2.
ProblemCatalogEntry dahlquist(const Complex<Real>& lambda, const PrecisionContext& ctx);
/// u' = f(t) with f a degree-L polynomial whose coefficients are drawn
/// uniformly from [-1, 1] by a 64-bit Mersenne twister; u0 = 1 on [0, 1].
ProblemCatalogEntry polynomial_rhs(int L, std::uint64_t seed, const PrecisionContext& ctx);
VectorR polynomial_coefficients(int L, std::uint64_t seed, const PrecisionContext& ctx);

/// Names: harmonic, pendulum, dahlquist:<lambda>, poly:<L>:<seed>.
ProblemCatalogEntry lookup_problem(std::string_view name, const PrecisionContext& ctx);

/// Hamiltonian u2^2/2 - cos(u1) of the pendulum.
Real pendulum_energy(const VectorR& u);

struct OracleConfig {
  int n_ref = 12;
  int m_ref = 72;
  Real tolerance;        // dt-halving agreement and invariant drift bound
  int max_doublings = 8;
};

/// Self-converged reference: a run of the solver at (n_ref, m_ref) that is
/// accepted when the run at 2 m_ref agrees at every shared node and the
/// invariant (if any) drifts by at most `tolerance`. Must be built and
/// evaluated at the precision the caller activated.
class Oracle {
 public:
  VectorR operator()(const Real& t) const;

  int n_ref() const { return tab_->n; }
  int m_ref() const { return traj_.intervals(); }
  const Real& agreement() const { return agreement_; }
  const Real& invariant_drift() const { return drift_; }
  int digits() const { return digits_; }

 private:
  friend Oracle build_oracle(const ProblemCatalogEntry&, const OracleConfig&, const PrecisionContext&);

  std::shared_ptr<const AderDgTableau> tab_;
  OdeProblem<Real> problem_;
  SolverConfig<Real> config_;
  Trajectory<Real> traj_;
  Real agreement_;
  Real drift_;
  int digits_ = 0;
};

/// Throws SolverError if the doubling budget runs out.
Oracle build_oracle(const ProblemCatalogEntry& entry, const OracleConfig& config, const PrecisionContext& ctx);

}  // namespace aderdg
