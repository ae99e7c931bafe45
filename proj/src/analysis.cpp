#include "aderdg/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace aderdg {

namespace {

constexpr std::array<std::string_view, kErrorCount> kNames = {
    "n_f", "n_L1", "n_L2", "n_Linf", "ln_f", "ln_L1", "ln_L2", "ln_Linf",
    "l_L1", "l_L2", "l_Linf", "lq_L1", "lq_L2", "lq_Linf",
};

Real magnitude(const VectorR& d, VectorNorm norm) {
  if (norm == VectorNorm::euclidean) return sqrt(Real(d.squaredNorm()));
  Real m(0);
  for (Eigen::Index i = 0; i < d.size(); ++i) m = std::max(m, Real(abs(d[i])));
  return m;
}

Real& at(ErrorReport& r, ErrorKind k) { return r.e[static_cast<size_t>(k)]; }

// accumulates sum dt*e, sum dt*e^2 and max e
struct Norms {
  Real l1{0}, l2sq{0}, linf{0};
  void add(const Real& weight, const Real& err) {
    l1 += weight * err;
    l2sq += weight * err * err;
    linf = std::max(linf, err);
  }
};

std::string fixed(const Real& x, int decimals) { return x.str(decimals, std::ios_base::fixed); }

}  // namespace

std::string_view error_name(ErrorKind kind) { return kNames[static_cast<size_t>(kind)]; }

ErrorKind parse_error_name(std::string_view name) {
  for (size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<ErrorKind>(i);
  throw ParseError("unknown error norm '" + std::string(name) + "'");
}

ErrorQuadrature error_quadrature(int points, const PrecisionContext& ctx) {
  ErrorQuadrature q;
  q.x = compute_nodes(points - 1, NodeFamily::gauss_legendre, ctx);
  q.w.resize(points);
  for (int i = 0; i < points; ++i) {
    // shifted Gauss-Legendre weight 1 / (x (1 - x) P~_n'(x)^2)
    const Real d = shifted_legendre(points, q.x[i]).second;
    q.w[i] = 1 / (q.x[i] * (1 - q.x[i]) * d * d);
  }
  return q;
}

ErrorReport compute_errors(const Trajectory<Real>& traj, const Reference& reference, const PrecisionContext& ctx,
                           const ErrorOptions& options) {
  ctx.activate();
  return compute_errors(traj, reference, error_quadrature(traj.tableau->n + options.extra_quadrature, ctx), options);
}

ErrorReport compute_errors(const Trajectory<Real>& traj, const Reference& reference, const ErrorQuadrature& quad,
                           const ErrorOptions& options) {
  const NodalBasis<Real>& basis = traj.tableau->basis;
  const int N = basis.n;
  const int M = traj.intervals();
  if (M < 1) throw AnalysisError("trajectory has no intervals");
  auto mag = [&](const VectorR& d) { return magnitude(d, options.norm); };

  ErrorReport rep;
  rep.n = N;
  rep.m = M;
  rep.dt = (traj.t.back() - traj.t.front()) / M;
  for (Real& x : rep.e) x = 0;
  rep.endpoint_mismatch = local_endpoint_mismatch(traj);

  std::vector<Real> dt(static_cast<size_t>(M));
  for (int n = 0; n < M; ++n) dt[static_cast<size_t>(n)] = traj.t[static_cast<size_t>(n) + 1] - traj.t[static_cast<size_t>(n)];

  // node solution and local solution at grid nodes; the local value at t_n
  // (n >= 1) is q_{n-1}(1), at t_0 it is u_0
  Norms node, local_node;
  Real node_f, local_f;
  for (int n = 0; n <= M; ++n) {
    const size_t i = static_cast<size_t>(n);
    const VectorR ref = reference(traj.t[i]);
    const Real weight = dt[static_cast<size_t>(std::min(n, M - 1))];
    const Real en = mag(traj.u[i] - ref);
    const Real eln = n == 0 ? en : mag(eval_local_tau(traj.local[i - 1], basis, Real(1)) - ref);
    node.add(weight, en);
    local_node.add(weight, eln);
    if (n == M) {
      node_f = en;
      local_f = eln;
    }
  }
  at(rep, ErrorKind::n_f) = node_f;
  at(rep, ErrorKind::n_L1) = node.l1;
  at(rep, ErrorKind::n_L2) = sqrt(node.l2sq);
  at(rep, ErrorKind::n_Linf) = node.linf;
  at(rep, ErrorKind::ln_f) = local_f;
  at(rep, ErrorKind::ln_L1) = local_node.l1;
  at(rep, ErrorKind::ln_L2) = sqrt(local_node.l2sq);
  at(rep, ErrorKind::ln_Linf) = local_node.linf;

  // local solution at the nodal points t_n + tau_p dt_n, each weighted by the
  // distance to the next nodal point (or to tf)
  Norms nodal;
  for (int n = 0; n < M; ++n) {
    const size_t i = static_cast<size_t>(n);
    const auto& loc = traj.local[i];
    for (int p = 0; p <= N; ++p) {
      const Real t = traj.t[i] + basis.tau[p] * dt[i];
      Real next;
      if (p < N) {
        next = traj.t[i] + basis.tau[p + 1] * dt[i];
      } else if (n + 1 < M) {
        next = traj.t[i + 1] + basis.tau[0] * dt[i + 1];
      } else {
        next = traj.t.back();
      }
      nodal.add(Real(next - t), mag(loc.qhat.row(p).transpose() - reference(t)));
    }
  }
  at(rep, ErrorKind::lq_L1) = nodal.l1;
  at(rep, ErrorKind::lq_L2) = sqrt(nodal.l2sq);
  at(rep, ErrorKind::lq_Linf) = nodal.linf;

  // continuous norms of the local solution
  Real l1(0), l2sq(0), linf(0);
  const Real golden = (sqrt(Real(5)) - 1) / 2;
  const int S = std::max(options.samples, 3);
  for (int n = 0; n < M; ++n) {
    const size_t i = static_cast<size_t>(n);
    const auto& loc = traj.local[i];
    auto eps = [&](const Real& tau) {
      return mag(eval_local_tau(loc, basis, tau) - reference(Real(traj.t[i] + tau * dt[i])));
    };
    for (Eigen::Index q = 0; q < quad.x.size(); ++q) {
      const Real e = eps(quad.x[q]);
      l1 += dt[i] * quad.w[q] * e;
      l2sq += dt[i] * quad.w[q] * e * e;
    }
    int best = 0;
    Real best_val(-1);
    for (int j = 0; j < S; ++j) {
      const Real v = eps(Real(j) / (S - 1));
      if (v > best_val) {
        best_val = v;
        best = j;
      }
    }
    // golden-section refinement around the largest sample
    Real a = Real(std::max(best - 1, 0)) / (S - 1);
    Real b = Real(std::min(best + 1, S - 1)) / (S - 1);
    Real c = b - golden * (b - a), d = a + golden * (b - a);
    Real fc = eps(c), fd = eps(d);
    for (int it = 0; it < options.golden_iterations; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - golden * (b - a);
        fc = eps(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + golden * (b - a);
        fd = eps(d);
      }
      best_val = std::max({best_val, fc, fd});
    }
    linf = std::max(linf, best_val);
  }
  at(rep, ErrorKind::l_L1) = l1;
  at(rep, ErrorKind::l_L2) = sqrt(l2sq);
  at(rep, ErrorKind::l_Linf) = linf;
  return rep;
}

FitResult fit_order(const std::vector<std::pair<Real, Real>>& points) {
  if (points.size() < 3) throw AnalysisError("an order fit needs at least 3 grid levels");
  const size_t n = points.size();
  std::vector<Real> x(n), y(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(points[i].first > 0)) throw AnalysisError("step sizes must be positive");
    if (!(points[i].second > 0)) throw AnalysisError("zero error: the measured error is below the roundoff floor");
    x[i] = log10(points[i].first);
    y[i] = log10(points[i].second);
  }
  Real xm(0), ym(0);
  for (size_t i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= static_cast<int>(n);
  ym /= static_cast<int>(n);
  Real sxx(0), sxy(0);
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (sxx == 0) throw AnalysisError("step sizes must be distinct");
  FitResult f;
  f.order = sxy / sxx;
  f.intercept = ym - f.order * xm;
  Real ss(0);
  for (size_t i = 0; i < n; ++i) {
    const Real r = y[i] - (f.intercept + f.order * x[i]);
    ss += r * r;
  }
  f.residual = sqrt(ss / static_cast<int>(n));
  f.points = static_cast<int>(n);
  return f;
}

ConvergenceTable convergence_study(const std::string& name, const OdeProblem<Real>& problem,
                                   const Reference& reference, const std::vector<int>& n_list,
                                   const std::vector<int>& m_list, const PrecisionContext& ctx,
                                   const StudyOptions& options) {
  if (n_list.empty() || m_list.empty()) throw AnalysisError("empty N or M list");
  for (int m : m_list)
    if (m < 1) throw AnalysisError("every M must be >= 1");
  ctx.activate();
  const SolverConfig<Real> config = options.solver ? *options.solver : default_solver_config(ctx);
  const Real floor = options.error_floor ? *options.error_floor : Real(100 * config.stage_tol);

  // everything that touches the global precision happens before the workers start
  std::vector<std::shared_ptr<const AderDgTableau>> tabs;
  std::vector<ErrorQuadrature> quads;
  for (int N : n_list) {
    tabs.push_back(std::make_shared<const AderDgTableau>(build_tableau(N, options.family, ctx)));
    quads.push_back(error_quadrature(N + options.errors.extra_quadrature, ctx));
  }

  const size_t cells = n_list.size() * m_list.size();
  std::vector<ErrorReport> reports(cells);
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (size_t c = next++; c < cells; c = next++) {
      const size_t in = c / m_list.size(), im = c % m_list.size();
      try {
        const Trajectory<Real> traj = integrate(tabs[in], problem, m_list[im], config);
        reports[c] = compute_errors(traj, reference, quads[in], options.errors);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cells;
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(cells)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ConvergenceTable table;
  table.problem = name;
  for (size_t in = 0; in < n_list.size(); ++in) {
    ConvergenceRow row;
    row.n = n_list[in];
    row.p_G = 2 * row.n + 1;
    row.p_L = row.n + 1;
    for (size_t im = 0; im < m_list.size(); ++im) row.reports.push_back(reports[in * m_list.size() + im]);
    for (int k = 0; k < kErrorCount; ++k) {
      std::vector<std::pair<Real, Real>> pts;
      for (const auto& r : row.reports) {
        const Real& e = r.e[static_cast<size_t>(k)];
        if (!(e > floor)) {
          throw AnalysisError("error " + std::string(kNames[static_cast<size_t>(k)]) + " at N=" +
                              std::to_string(row.n) + ", M=" + std::to_string(r.m) + " is " + format_decimal(e, 6) +
                              ", at or below the roundoff floor " + format_decimal(floor, 3) +
                              "; the order cannot be fitted (raise --digits or lower N)");
        }
        pts.emplace_back(r.dt, e);
      }
      row.fits[static_cast<size_t>(k)] = fit_order(pts);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

TableFormat parse_table_format(std::string_view name) {
  if (name == "table") return TableFormat::table;
  if (name == "csv") return TableFormat::csv;
  if (name == "json") return TableFormat::json;
  throw ParseError("unknown format '" + std::string(name) + "' (expected table, csv or json)");
}

std::string format_convergence_table(const ConvergenceTable& table, TableFormat format, int decimals) {
  std::vector<std::string> header{"N"};
  for (int k = 0; k < kErrorCount; ++k) {
    header.push_back("p^" + std::string(kNames[static_cast<size_t>(k)]));
    if (k == static_cast<int>(ErrorKind::n_Linf)) header.push_back("p_G");
  }
  header.push_back("p_L");

  std::vector<std::vector<std::string>> rows;
  for (const auto& r : table.rows) {
    std::vector<std::string> cells{std::to_string(r.n)};
    for (int k = 0; k < kErrorCount; ++k) {
      cells.push_back(fixed(r.fits[static_cast<size_t>(k)].order, decimals));
      if (k == static_cast<int>(ErrorKind::n_Linf)) cells.push_back(std::to_string(r.p_G));
    }
    cells.push_back(std::to_string(r.p_L));
    rows.push_back(std::move(cells));
  }

  std::ostringstream os;
  if (format == TableFormat::json) {
    nlohmann::ordered_json doc;
    doc["problem"] = table.problem;
    doc["columns"] = header;
    doc["rows"] = rows;
    os << doc.dump(2) << "\n";
  } else if (format == TableFormat::csv) {
    for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& r : rows) {
      for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << "\n";
    }
  } else {
    std::vector<size_t> width(header.size());
    for (size_t i = 0; i < header.size(); ++i) {
      width[i] = header[i].size();
      for (const auto& r : rows) width[i] = std::max(width[i], r[i].size());
    }
    os << "# " << table.problem << "\n";
    for (size_t i = 0; i < header.size(); ++i) os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << header[i];
    os << "\n";
    for (const auto& r : rows) {
      for (size_t i = 0; i < r.size(); ++i) os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << r[i];
      os << "\n";
    }
  }
  return os.str();
}

std::string format_raw_errors(const ConvergenceTable& table, TableFormat format, int digits) {
  std::vector<std::string> header{"N", "M", "dt"};
  for (auto n : kNames) header.emplace_back(n);
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : table.rows) {
    for (const auto& r : row.reports) {
      std::vector<std::string> cells{std::to_string(r.n), std::to_string(r.m), format_decimal(r.dt, digits)};
      for (const auto& e : r.e) cells.push_back(format_decimal(e, digits));
      rows.push_back(std::move(cells));
    }
  }
  std::ostringstream os;
  if (format == TableFormat::json) {
    nlohmann::ordered_json doc;
    doc["problem"] = table.problem;
    doc["columns"] = header;
    doc["rows"] = rows;
    os << doc.dump(2) << "\n";
  } else {
    const char* sep = format == TableFormat::csv ? "," : " ";
    for (size_t i = 0; i < header.size(); ++i) os << (i ? sep : "") << header[i];
    os << "\n";
    for (const auto& r : rows) {
      for (size_t i = 0; i < r.size(); ++i) os << (i ? sep : "") << r[i];
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace aderdg
