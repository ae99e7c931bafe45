#pragma once

// Global error norms of a trajectory, least-squares order fits, and the
// (N, M) convergence sweep behind the order tables.

#include "aderdg/arith.hpp"
#include "aderdg/solver.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aderdg {

class AnalysisError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kErrorCount = 14;

// Table column order: node solution, local solution at grid nodes, local
// solution in continuous norms, local solution at quadrature nodal points.
enum class ErrorKind : int {
  n_f,
  n_L1,
  n_L2,
  n_Linf,
  ln_f,
  ln_L1,
  ln_L2,
  ln_Linf,
  l_L1,
  l_L2,
  l_Linf,
  lq_L1,
  lq_L2,
  lq_Linf,
};

/// Short identifier such as "n_f" or "lq_Linf".
std::string_view error_name(ErrorKind kind);
ErrorKind parse_error_name(std::string_view name);

enum class VectorNorm { max, euclidean };

using Reference = std::function<VectorR(const Real&)>;

struct ErrorOptions {
  VectorNorm norm = VectorNorm::max;
  int extra_quadrature = 8;   // continuous norms use N + extra points per interval
  int samples = 64;           // sup-norm samples per interval
  int golden_iterations = 30;
};

struct ErrorReport {
  int n = 0;
  int m = 0;
  Real dt;  // (tf - t0) / M
  std::array<Real, kErrorCount> e;
  Real endpoint_mismatch;  // max |q_n(1) - u_{n+1}|

  const Real& operator[](ErrorKind k) const { return e[static_cast<size_t>(k)]; }
};

/// Quadrature rule on [0,1] used for the continuous norms.
struct ErrorQuadrature {
  VectorR x;
  VectorR w;
};
ErrorQuadrature error_quadrature(int points, const PrecisionContext& ctx);

ErrorReport compute_errors(const Trajectory<Real>& traj, const Reference& reference, const PrecisionContext& ctx,
                           const ErrorOptions& options = {});
/// Same, with a prebuilt quadrature (N + extra_quadrature points).
ErrorReport compute_errors(const Trajectory<Real>& traj, const Reference& reference, const ErrorQuadrature& quad,
                           const ErrorOptions& options);

struct FitResult {
  Real order;      // slope of lg e against lg dt
  Real intercept;
  Real residual;   // rms deviation of lg e from the fitted line
  int points = 0;
};

/// Least squares on (lg dt, lg e); needs >= 3 points with distinct dt and e > 0.
FitResult fit_order(const std::vector<std::pair<Real, Real>>& points);

struct ConvergenceRow {
  int n = 0;
  std::array<FitResult, kErrorCount> fits;
  int p_G = 0;  // 2N + 1
  int p_L = 0;  // N + 1
  std::vector<ErrorReport> reports;  // one per M, in sweep order
};

struct ConvergenceTable {
  std::string problem;
  std::vector<ConvergenceRow> rows;
};

struct StudyOptions {
  int jobs = 1;
  NodeFamily family = NodeFamily::gauss_legendre;
  ErrorOptions errors;
  std::optional<SolverConfig<Real>> solver;  // default_solver_config(ctx) if empty
  std::optional<Real> error_floor;           // 100 * stage_tol if empty
};

/// Integrates at every (N, M), computes all 14 errors and fits all 14 orders.
/// Throws AnalysisError if any error is at or below the floor.
ConvergenceTable convergence_study(const std::string& name, const OdeProblem<Real>& problem,
                                   const Reference& reference, const std::vector<int>& n_list,
                                   const std::vector<int>& m_list, const PrecisionContext& ctx,
                                   const StudyOptions& options = {});

enum class TableFormat { table, csv, json };
TableFormat parse_table_format(std::string_view name);

/// Orders in the column order p^n_f .. p^n_Linf, p_G, p^ln_f .. p^lq_Linf, p_L.
std::string format_convergence_table(const ConvergenceTable& table, TableFormat format, int decimals = 2);
/// Rows of (N, M, dt, 14 errors).
std::string format_raw_errors(const ConvergenceTable& table, TableFormat format, int digits = 20);

}  // namespace aderdg
