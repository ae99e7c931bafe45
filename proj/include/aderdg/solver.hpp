#pragma once

// One-step ADER-DG integration: implicit stage solve for k_p, predictor
// coefficients q^_p, node update and dense evaluation of the local solution.

#include "aderdg/arith.hpp"
#include "aderdg/tableau.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace aderdg {

template <typename Scalar>
struct OdeProblem {
  using Vec = Vector<Scalar>;
  using Mat = Matrix<Scalar>;

  int dim = 0;
  std::function<Vec(const Vec&, const Scalar&)> rhs;
  std::function<Mat(const Vec&, const Scalar&)> jacobian;  // optional: dF/du
  std::function<Vec(const Scalar&)> exact;                 // optional
  Scalar t0;
  Scalar tf;
  Vec u0;
};

enum class JacobianMode { analytic, finite_difference, picard };

std::string_view to_string(JacobianMode mode);
JacobianMode parse_jacobian_mode(std::string_view name);

template <typename Scalar>
struct SolverConfig {
  Scalar stage_tol;    // max-norm target for k_p - F(stage state)
  int max_newton = 100;
  JacobianMode mode = JacobianMode::analytic;
  Scalar fd_step;                     // relative central-difference increment
  std::optional<Scalar> lipschitz;    // picard mode: bound on |dF/du|
};

/// stage_tol = 10^(-digits+20), fd_step = 10^(-digits/3); analytic Jacobians
/// (falling back to finite differences when a problem has none).
SolverConfig<Real> default_solver_config(const PrecisionContext& ctx);
SolverConfig<double> default_solver_config_double();

class SolverError : public Error {
 public:
  SolverError(const std::string& what, long interval = -1) : Error(what), interval_(interval) {}
  long interval() const { return interval_; }

 private:
  long interval_;
};

template <typename Scalar>
struct StageSolution {
  Matrix<Scalar> k;  // (N+1) x D, row p is k_p
  int iterations = 0;
  int jacobian_refreshes = 0;
  Scalar residual;
};

template <typename Scalar>
struct LocalSolution {
  Scalar t_n;
  Scalar dt_n;
  Matrix<Scalar> qhat;  // (N+1) x D
  Vector<Scalar> u_next;
  int iterations = 0;
};

template <typename Scalar>
struct Trajectory {
  std::shared_ptr<const Tableau<Scalar>> tableau;
  std::vector<Scalar> t;              // t_0..t_M
  std::vector<Vector<Scalar>> u;      // u_0..u_M
  std::vector<LocalSolution<Scalar>> local;

  int intervals() const { return static_cast<int>(local.size()); }
};

template <typename Scalar>
StageSolution<Scalar> solve_stages(const Tableau<Scalar>& tab, const OdeProblem<Scalar>& problem,
                                   const Vector<Scalar>& u_n, const Scalar& t_n, const Scalar& dt,
                                   const SolverConfig<Scalar>& config);

/// q^_p = u_n + dt sum_q a_pq k_q.
template <typename Scalar>
Matrix<Scalar> stages_to_qhat(const Tableau<Scalar>& tab, const Vector<Scalar>& u_n, const Matrix<Scalar>& k,
                              const Scalar& dt);

/// Max-norm residual of the predictor system q^_p - u_n - dt sum_q a_pq F(q^_q, t_q).
template <typename Scalar>
Scalar predictor_residual(const Tableau<Scalar>& tab, const OdeProblem<Scalar>& problem, const Vector<Scalar>& u_n,
                          const Scalar& t_n, const Scalar& dt, const Matrix<Scalar>& qhat);

template <typename Scalar>
LocalSolution<Scalar> step(const Tableau<Scalar>& tab, const OdeProblem<Scalar>& problem, const Vector<Scalar>& u_n,
                           const Scalar& t_n, const Scalar& dt, const SolverConfig<Scalar>& config);

/// u_L at local coordinate tau in [0,1]. Values at the quadrature nodes are
/// returned as the stored q^ rows.
template <typename Scalar>
Vector<Scalar> eval_local_tau(const LocalSolution<Scalar>& local, const NodalBasis<Scalar>& basis,
                              const Scalar& tau);

/// u_L(t) for t in [t_n, t_n + dt_n]; throws SolverError outside.
template <typename Scalar>
Vector<Scalar> eval_local(const LocalSolution<Scalar>& local, const NodalBasis<Scalar>& basis, const Scalar& t);

/// Uniform grid with M intervals over [t0, tf].
template <typename Scalar>
Trajectory<Scalar> integrate(std::shared_ptr<const Tableau<Scalar>> tab, const OdeProblem<Scalar>& problem, int M,
                             const SolverConfig<Scalar>& config);

/// Explicit, strictly increasing node list from t0 to tf.
template <typename Scalar>
Trajectory<Scalar> integrate(std::shared_ptr<const Tableau<Scalar>> tab, const OdeProblem<Scalar>& problem,
                             const std::vector<Scalar>& nodes, const SolverConfig<Scalar>& config);

/// max over intervals of |q_n(1) - u_{n+1}| in the max norm.
template <typename Scalar>
Scalar local_endpoint_mismatch(const Trajectory<Scalar>& traj);

/// Lipschitz estimate ||dF/du||_inf at (u, t), analytic when available.
template <typename Scalar>
Scalar estimate_lipschitz(const OdeProblem<Scalar>& problem, const Vector<Scalar>& u, const Scalar& t,
                          const Scalar& fd_step);

}  // namespace aderdg
