#include "aderdg/solver.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace aderdg {

namespace {

template <typename Scalar>
Scalar eps() {
  return std::numeric_limits<Scalar>::epsilon();
}

template <typename Scalar>
Scalar max_abs(const Matrix<Scalar>& m) {
  using std::abs;
  Scalar out(0);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Scalar v = abs(m.data()[i]);
    if (!(v <= out)) out = v;  // also propagates NaN
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> fd_jacobian(const OdeProblem<Scalar>& problem, const Vector<Scalar>& u, const Scalar& t,
                           const Scalar& fd_step) {
  using std::abs;
  const int D = problem.dim;
  Matrix<Scalar> J(D, D);
  for (int j = 0; j < D; ++j) {
    const Scalar h = fd_step * std::max(Scalar(1), Scalar(abs(u[j])));
    Vector<Scalar> up = u, um = u;
    up[j] += h;
    um[j] -= h;
    J.col(j) = (problem.rhs(up, t) - problem.rhs(um, t)) / (2 * h);
  }
  return J;
}

template <typename Scalar>
Matrix<Scalar> jacobian(const OdeProblem<Scalar>& problem, const Vector<Scalar>& u, const Scalar& t,
                        const SolverConfig<Scalar>& config) {
  if (config.mode == JacobianMode::analytic && problem.jacobian) return problem.jacobian(u, t);
  return fd_jacobian(problem, u, t, config.fd_step);
}

// Stage states Y_p = u_n + dt sum_q a_pq k_q, one per row.
template <typename Scalar>
Matrix<Scalar> stage_states(const Tableau<Scalar>& tab, const Vector<Scalar>& u_n, const Matrix<Scalar>& k,
                            const Scalar& dt) {
  Matrix<Scalar> Y = dt * (tab.a * k);
  for (Eigen::Index p = 0; p < Y.rows(); ++p) Y.row(p) += u_n.transpose();
  return Y;
}

}  // namespace

std::string_view to_string(JacobianMode mode) {
  switch (mode) {
    case JacobianMode::analytic: return "analytic";
    case JacobianMode::finite_difference: return "finite-difference";
    case JacobianMode::picard: return "picard";
  }
  return "unknown";
}

JacobianMode parse_jacobian_mode(std::string_view name) {
  if (name == "analytic") return JacobianMode::analytic;
  if (name == "finite-difference" || name == "fd") return JacobianMode::finite_difference;
  if (name == "picard") return JacobianMode::picard;
  throw ParseError("unknown Jacobian mode '" + std::string(name) + "'");
}

SolverConfig<Real> default_solver_config(const PrecisionContext& ctx) {
  ctx.activate();
  SolverConfig<Real> c;
  c.stage_tol = pow10(-ctx.decimal_digits + 20);
  c.fd_step = pow10(-ctx.decimal_digits / 3);
  return c;
}

SolverConfig<double> default_solver_config_double() {
  SolverConfig<double> c;
  c.stage_tol = 1e-13;
  c.fd_step = std::cbrt(std::numeric_limits<double>::epsilon());
  return c;
}

template <typename Scalar>
StageSolution<Scalar> solve_stages(const Tableau<Scalar>& tab, const OdeProblem<Scalar>& problem,
                                   const Vector<Scalar>& u_n, const Scalar& t_n, const Scalar& dt,
                                   const SolverConfig<Scalar>& config) {
  using std::abs;
  if (!(dt > 0)) throw SolverError("step size must be positive");
  const int s = tab.stages();
  const int D = problem.dim;
  const int n = s * D;
  std::vector<Scalar> t_stage(static_cast<size_t>(s));
  for (int p = 0; p < s; ++p) t_stage[static_cast<size_t>(p)] = t_n + tab.tau()[p] * dt;

  StageSolution<Scalar> out;
  out.k.resize(s, D);
  for (int p = 0; p < s; ++p) out.k.row(p) = problem.rhs(u_n, t_stage[static_cast<size_t>(p)]).transpose();

  Eigen::PartialPivLU<Matrix<Scalar>> lu;
  bool have_lu = false;
  bool fresh = false;  // factorization uses the Jacobian at the current iterate
  int since_refresh = 0;
  Scalar r_prev(0);
  Matrix<Scalar> Y, G;
  auto evaluate = [&](const Matrix<Scalar>& k, Matrix<Scalar>& y, Matrix<Scalar>& g) {
    y = stage_states(tab, u_n, k, dt);
    g = k;
    for (int p = 0; p < s; ++p) g.row(p) -= problem.rhs(y.row(p).transpose(), t_stage[static_cast<size_t>(p)]).transpose();
    return max_abs(g);
  };
  out.residual = evaluate(out.k, Y, G);
  for (int it = 0;; ++it) {
    out.iterations = it;
    if (out.residual <= config.stage_tol) return out;
    if (!(out.residual == out.residual)) throw SolverError("stage residual is not finite");
    if (it >= config.max_newton) {
      throw SolverError("stage iteration did not converge in " + std::to_string(config.max_newton) +
                        " iterations");
    }
    if (config.mode == JacobianMode::picard) {
      out.k -= G;
      out.residual = evaluate(out.k, Y, G);
      continue;
    }

    const bool slow = have_lu && out.residual > r_prev / 2;
    for (;;) {
      if (!have_lu || (slow && !fresh) || since_refresh >= 5) {
        // first factorization freezes J at (u_n, t_n); refreshes use the
        // Jacobian at each stage state
        Matrix<Scalar> A = Matrix<Scalar>::Identity(n, n);
        const Matrix<Scalar> J0 = have_lu ? Matrix<Scalar>() : jacobian(problem, u_n, t_n, config);
        // d(k_p - F(Y_p))/dk_q = delta_pq - dt a_pq J(Y_p)
        for (int p = 0; p < s; ++p) {
          const Matrix<Scalar> Jp =
              have_lu ? jacobian(problem, Vector<Scalar>(Y.row(p).transpose()), t_stage[static_cast<size_t>(p)], config)
                      : J0;
          for (int q = 0; q < s; ++q) A.block(p * D, q * D, D, D) -= (dt * tab.a(p, q)) * Jp;
        }
        lu.compute(A);
        Scalar lo = abs(lu.matrixLU()(0, 0)), hi = lo;
        for (int i = 1; i < n; ++i) {
          const Scalar v = abs(lu.matrixLU()(i, i));
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (!(lo > eps<Scalar>() * hi)) throw SolverError("singular Newton matrix");
        fresh = have_lu;
        have_lu = true;
        since_refresh = 0;
        ++out.jacobian_refreshes;
      }
      // unknowns stacked as index p*D + i
      Vector<Scalar> g(n);
      for (int p = 0; p < s; ++p) g.segment(p * D, D) = G.row(p).transpose();
      const Vector<Scalar> delta = lu.solve(g);
      Matrix<Scalar> step(s, D);
      for (int p = 0; p < s; ++p) step.row(p) = delta.segment(p * D, D).transpose();

      // backtrack until the residual decreases
      Scalar lambda(1);
      Matrix<Scalar> k_try, Y_try, G_try;
      Scalar r_try;
      bool accepted = false;
      for (int h = 0; h < 30; ++h, lambda /= 2) {
        k_try = out.k - lambda * step;
        r_try = evaluate(k_try, Y_try, G_try);
        if (r_try < out.residual) {
          accepted = true;
          break;
        }
      }
      if (!accepted && !fresh) {
        // a stale factorization gave no descent; retry with the current Jacobian
        since_refresh = 5;
        continue;
      }
      if (!accepted) throw SolverError("Newton iteration stalled");
      r_prev = out.residual;
      out.k = std::move(k_try);
      Y = std::move(Y_try);
      G = std::move(G_try);
      out.residual = r_try;
      ++since_refresh;
      fresh = false;
      break;
    }
  }
}

template <typename Scalar>
Matrix<Scalar> stages_to_qhat(const Tableau<Scalar>& tab, const Vector<Scalar>& u_n, const Matrix<Scalar>& k,
                              const Scalar& dt) {
  return stage_states(tab, u_n, k, dt);
}

template <typename Scalar>
Scalar predictor_residual(const Tableau<Scalar>& tab, const OdeProblem<Scalar>& problem, const Vector<Scalar>& u_n,
                          const Scalar& t_n, const Scalar& dt, const Matrix<Scalar>& qhat) {
  const int s = tab.stages();
  Matrix<Scalar> F(s, problem.dim);
  for (int p = 0; p < s; ++p) F.row(p) = problem.rhs(qhat.row(p).transpose(), t_n + tab.tau()[p] * dt).transpose();
  Matrix<Scalar> R = qhat - dt * (tab.a * F);
  for (int p = 0; p < s; ++p) R.row(p) -= u_n.transpose();
  return max_abs(R);
}

template <typename Scalar>
LocalSolution<Scalar> step(const Tableau<Scalar>& tab, const OdeProblem<Scalar>& problem, const Vector<Scalar>& u_n,
                           const Scalar& t_n, const Scalar& dt, const SolverConfig<Scalar>& config) {
  const StageSolution<Scalar> st = solve_stages(tab, problem, u_n, t_n, dt, config);
  LocalSolution<Scalar> loc;
  loc.t_n = t_n;
  loc.dt_n = dt;
  loc.qhat = stages_to_qhat(tab, u_n, st.k, dt);
  loc.u_next = u_n + dt * (st.k.transpose() * tab.w());
  loc.iterations = st.iterations;
  return loc;
}

template <typename Scalar>
Vector<Scalar> eval_local_tau(const LocalSolution<Scalar>& local, const NodalBasis<Scalar>& basis,
                              const Scalar& tau) {
  using std::abs;
  const Scalar snap = 16 * eps<Scalar>();
  for (Eigen::Index p = 0; p < basis.tau.size(); ++p) {
    if (abs(tau - basis.tau[p]) <= snap) return local.qhat.row(p).transpose();
  }
  return local.qhat.transpose() * eval_basis(basis, tau);
}

template <typename Scalar>
Vector<Scalar> eval_local(const LocalSolution<Scalar>& local, const NodalBasis<Scalar>& basis, const Scalar& t) {
  Scalar tau = (t - local.t_n) / local.dt_n;
  const Scalar slack = 16 * eps<Scalar>();
  if (tau < -slack || tau > 1 + slack) {
    throw SolverError("evaluation point lies outside the interval of the local solution");
  }
  tau = std::clamp(tau, Scalar(0), Scalar(1));
  return eval_local_tau(local, basis, tau);
}

template <typename Scalar>
Scalar estimate_lipschitz(const OdeProblem<Scalar>& problem, const Vector<Scalar>& u, const Scalar& t,
                          const Scalar& fd_step) {
  const Matrix<Scalar> J = problem.jacobian ? problem.jacobian(u, t) : fd_jacobian(problem, u, t, fd_step);
  Scalar norm(0);
  for (Eigen::Index i = 0; i < J.rows(); ++i) norm = std::max(norm, Scalar(J.row(i).cwiseAbs().sum()));
  return norm;
}

template <typename Scalar>
Trajectory<Scalar> integrate(std::shared_ptr<const Tableau<Scalar>> tab, const OdeProblem<Scalar>& problem,
                             const std::vector<Scalar>& nodes, const SolverConfig<Scalar>& config) {
  if (nodes.size() < 2) throw SolverError("need at least one interval");
  if (nodes.front() != problem.t0 || nodes.back() != problem.tf) {
    throw SolverError("node list must start at t0 and end at tf");
  }
  for (size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) throw SolverError("node list must be strictly increasing");
  }
  if (config.mode == JacobianMode::picard) {
    Scalar dt_max(0);
    for (size_t i = 1; i < nodes.size(); ++i) dt_max = std::max(dt_max, Scalar(nodes[i] - nodes[i - 1]));
    const Scalar C =
        config.lipschitz ? *config.lipschitz : estimate_lipschitz(problem, problem.u0, problem.t0, config.fd_step);
    const Scalar a_norm = tab->a.cwiseAbs().rowwise().sum().maxCoeff();
    if (!(dt_max * C * a_norm < 1)) {
      throw SolverError("fixed-point iteration is not a contraction: dt*C*max_p sum_q |a_pq| >= 1");
    }
  }

  Trajectory<Scalar> traj;
  traj.tableau = tab;
  traj.t = nodes;
  traj.u.reserve(nodes.size());
  traj.local.reserve(nodes.size() - 1);
  traj.u.push_back(problem.u0);
  for (size_t n = 0; n + 1 < nodes.size(); ++n) {
    try {
      traj.local.push_back(step(*tab, problem, traj.u.back(), nodes[n], Scalar(nodes[n + 1] - nodes[n]), config));
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (interval " + std::to_string(n) + ")", static_cast<long>(n));
    }
    traj.u.push_back(traj.local.back().u_next);
  }
  return traj;
}

template <typename Scalar>
Trajectory<Scalar> integrate(std::shared_ptr<const Tableau<Scalar>> tab, const OdeProblem<Scalar>& problem, int M,
                             const SolverConfig<Scalar>& config) {
  if (M < 1) throw SolverError("number of intervals must be >= 1");
  std::vector<Scalar> nodes(static_cast<size_t>(M) + 1);
  const Scalar dt = (problem.tf - problem.t0) / M;
  for (int n = 0; n < M; ++n) nodes[static_cast<size_t>(n)] = problem.t0 + dt * n;
  nodes.back() = problem.tf;
  return integrate(std::move(tab), problem, nodes, config);
}

template <typename Scalar>
Scalar local_endpoint_mismatch(const Trajectory<Scalar>& traj) {
  Scalar worst(0);
  for (const auto& loc : traj.local) {
    const Vector<Scalar> end = eval_local_tau(loc, traj.tableau->basis, Scalar(1));
    worst = std::max(worst, max_abs(Matrix<Scalar>(end - loc.u_next)));
  }
  return worst;
}

#define ADERDG_INSTANTIATE(S)                                                                                     \
  template StageSolution<S> solve_stages(const Tableau<S>&, const OdeProblem<S>&, const Vector<S>&, const S&,     \
                                         const S&, const SolverConfig<S>&);                                       \
  template Matrix<S> stages_to_qhat(const Tableau<S>&, const Vector<S>&, const Matrix<S>&, const S&);             \
  template S predictor_residual(const Tableau<S>&, const OdeProblem<S>&, const Vector<S>&, const S&, const S&,    \
                                const Matrix<S>&);                                                                \
  template LocalSolution<S> step(const Tableau<S>&, const OdeProblem<S>&, const Vector<S>&, const S&, const S&,   \
                                 const SolverConfig<S>&);                                                         \
  template Vector<S> eval_local_tau(const LocalSolution<S>&, const NodalBasis<S>&, const S&);                     \
  template Vector<S> eval_local(const LocalSolution<S>&, const NodalBasis<S>&, const S&);                         \
  template S estimate_lipschitz(const OdeProblem<S>&, const Vector<S>&, const S&, const S&);                      \
  template Trajectory<S> integrate(std::shared_ptr<const Tableau<S>>, const OdeProblem<S>&, const std::vector<S>&, \
                                   const SolverConfig<S>&);                                                       \
  template Trajectory<S> integrate(std::shared_ptr<const Tableau<S>>, const OdeProblem<S>&, int,                  \
                                   const SolverConfig<S>&);                                                       \
  template S local_endpoint_mismatch(const Trajectory<S>&);

ADERDG_INSTANTIATE(Real)
ADERDG_INSTANTIATE(double)

#undef ADERDG_INSTANTIATE

}  // namespace aderdg
