#include "aderdg/cli.hpp"

#include "aderdg/analysis.hpp"
#include "aderdg/problems.hpp"
#include "aderdg/tableau.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace aderdg {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int to_int(std::string_view s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw UsageError("not an integer: '" + std::string(s) + "'");
  return v;
}

// "4,6,8", "4:18:2" (inclusive range) or "4,6,...,18" (step from the two
// preceding values; 1 if only one precedes)
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  bool pending = false;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok == "...") {
      if (out.empty()) throw UsageError("'...' needs a preceding value in '" + text + "'");
      pending = true;
      continue;
    }
    if (const auto c = tok.find(':'); c != std::string::npos) {
      const auto c2 = tok.find(':', c + 1);
      const int lo = to_int(tok.substr(0, c));
      const int hi = to_int(tok.substr(c + 1, c2 == std::string::npos ? std::string::npos : c2 - c - 1));
      const int st = c2 == std::string::npos ? 1 : to_int(tok.substr(c2 + 1));
      if (st <= 0 || hi < lo) throw UsageError("bad range '" + tok + "'");
      for (int v = lo; v <= hi; v += st) out.push_back(v);
      continue;
    }
    const int v = to_int(tok);
    if (pending) {
      const int step = out.size() >= 2 ? out.back() - out[out.size() - 2] : 1;
      if (step <= 0) throw UsageError("'...' needs an increasing sequence in '" + text + "'");
      for (int x = out.back() + step; x < v; x += step) out.push_back(x);
      pending = false;
    }
    out.push_back(v);
  }
  if (pending) throw UsageError("'...' needs a final value in '" + text + "'");
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
  return out;
}

// writes to --out when given, otherwise to the command's stdout
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  f << text;
}

std::string render(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                   TableFormat format) {
  std::ostringstream os;
  if (format == TableFormat::json) {
    Json doc = Json::array();
    for (const auto& r : rows) {
      Json o;
      for (size_t i = 0; i < header.size(); ++i) o[header[i]] = r[i];
      doc.push_back(o);
    }
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
    for (size_t i = 0; i < header.size(); ++i) os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << header[i];
    os << "\n";
    for (const auto& r : rows) {
      for (size_t i = 0; i < r.size(); ++i) os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << r[i];
      os << "\n";
    }
  }
  return os.str();
}

struct Common {
  std::optional<int> digits;
  std::string family = "gauss-legendre";
  std::string out;
  std::string format = "table";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--digits", c.digits, "decimal digits of working precision");
  cmd->add_option("--family", c.family, "gauss-legendre, radau-left or radau-right");
  cmd->add_option("--out", c.out, "output file (default: standard output)");
  cmd->add_option("--format", c.format, "table, csv or json");
}

PrecisionContext context_for(const Common& c, const CliConfig& cfg, int N) {
  const int digits = c.digits.value_or(cfg.default_digits);
  if (digits < kMinDecimalDigits) {
    throw PrecisionError("--digits " + std::to_string(digits) + " is below the minimum of " +
                         std::to_string(kMinDecimalDigits));
  }
  PrecisionContext ctx = make_context(digits);
  check_conditioning(N, ctx);
  ctx.activate();
  return ctx;
}

int cmd_tableau(int N, const Common& c, const CliConfig& cfg, std::ostream& out) {
  if (N < 1) throw UsageError("-N must be >= 1");
  const NodeFamily family = parse_family(c.family);
  const PrecisionContext ctx = context_for(c, cfg, N);
  const AderDgTableau tab = build_tableau(N, family, ctx);
  const VerificationReport rep = verify_tableau(tab, ctx);
  const Lemma21Residuals lem = verify_lemma21(tab, ctx);
  emit(c.out, export_tableau(tab) + "\n", out);

  out << "# N=" << N << " family=" << to_string(family) << " digits=" << ctx.decimal_digits << "\n";
  out << "# max lemma21 residual (relations 2-6): " << format_decimal(lem.max_structural(), 6) << "\n";
  out << "# relation 1 residual: " << format_decimal(lem.r[0], 6) << "\n";
  int failed = 0;
  for (const auto& chk : rep.checks) {
    if (!chk.ok()) {
      ++failed;
      out << "# FAILED " << chk.name << ": " << format_decimal(chk.residual, 6) << " (tolerance "
          << format_decimal(chk.tolerance, 3) << ")\n";
    }
  }
  out << "# verification: " << (failed ? "FAIL" : "pass") << " (" << rep.checks.size() - failed << "/"
      << rep.checks.size() << " checks)\n";
  return failed ? kExitVerification : kExitOk;
}

int cmd_verify(int n_max, const Common& c, const CliConfig& cfg, std::ostream& out) {
  if (n_max < 1) throw UsageError("-N must be >= 1");
  if (n_max > cfg.max_order) {
    throw UsageError("-N " + std::to_string(n_max) + " exceeds the cap of " + std::to_string(cfg.max_order) +
                     " (raise max_order in the config file)");
  }
  const NodeFamily family = parse_family(c.family);
  const TableFormat format = parse_table_format(c.format);
  const PrecisionContext ctx = context_for(c, cfg, n_max);

  const std::vector<std::string> header{"N",     "lemma21", "lemma21_1", "B(2N+2)", "C(N)",        "D(N)",
                                        "C(N+1)", "q_dyadic", "m_dyadic", "pade",    "a_stability", "status"};
  std::vector<std::vector<std::string>> rows;
  bool all_ok = true;
  for (int N = 1; N <= n_max; ++N) {
    const AderDgTableau tab = build_tableau(N, family, ctx);
    const VerificationReport rep = verify_tableau(tab, ctx);
    const Lemma21Residuals lem = verify_lemma21(tab, ctx);
    auto cell = [](const Real& x) { return format_decimal(x, 3); };
    const std::string n = std::to_string(N);
    // B(2N+2) is a GL property; Radau families are reported at B(2N+1)
    const std::string b_name = family == NodeFamily::gauss_legendre ? "B(" + std::to_string(2 * N + 2) + ")"
                                                                     : "B(" + std::to_string(2 * N + 1) + ")";
    std::vector<std::string> row{n,
                                 cell(lem.max_structural()),
                                 cell(lem.r[0]),
                                 cell(rep.find(b_name).residual),
                                 cell(check_simplifying(tab, SimplifyingCondition::C, N, ctx)),
                                 cell(check_simplifying(tab, SimplifyingCondition::D, N, ctx)),
                                 cell(check_simplifying(tab, SimplifyingCondition::C, N + 1, ctx)),
                                 cell(rep.find("q_dyadic").residual),
                                 cell(rep.find("m_dyadic").residual),
                                 cell(rep.find("pade_samples").residual),
                                 cell(rep.find("a_stability").residual)};
    std::string status = "pass";
    for (const auto& chk : rep.checks) {
      if (!chk.ok()) status = status == "pass" ? "FAIL " + chk.name : status + "," + chk.name;
    }
    all_ok = all_ok && rep.ok();
    row.push_back(status);
    rows.push_back(std::move(row));
  }
  emit(c.out, render(header, rows, format), out);
  return all_ok ? kExitOk : kExitVerification;
}

struct SolveArgs {
  std::string problem;
  int N = 0;
  std::optional<int> M;
  std::string nodes;
  int dense = 0;
  std::string jacobian = "analytic";
};

int cmd_solve(const SolveArgs& a, const Common& c, const CliConfig& cfg, std::ostream& out) {
  if (a.N < 1) throw UsageError("-N must be >= 1");
  if (a.M && !a.nodes.empty()) throw UsageError("give either -M or --nodes, not both");
  if (!a.M && a.nodes.empty()) throw UsageError("one of -M or --nodes is required");
  if (a.dense < 0) throw UsageError("--dense must be >= 0");
  const NodeFamily family = parse_family(c.family);
  const TableFormat format = parse_table_format(c.format);
  const PrecisionContext ctx = context_for(c, cfg, a.N);
  ProblemCatalogEntry entry = lookup_problem(a.problem, ctx);

  SolverConfig<Real> sc = default_solver_config(ctx);
  sc.mode = parse_jacobian_mode(a.jacobian);
  auto tab = std::make_shared<const AderDgTableau>(build_tableau(a.N, family, ctx));
  Trajectory<Real> traj;
  if (a.M) {
    if (*a.M < 1) throw UsageError("-M must be >= 1");
    traj = integrate(tab, entry.problem, *a.M, sc);
  } else {
    std::vector<Real> nodes;
    for (const auto& s : split(a.nodes, ',')) nodes.push_back(parse_decimal(s, ctx));
    traj = integrate(tab, entry.problem, nodes, sc);
  }

  const int D = entry.problem.dim;
  std::optional<Real> err_f;
  if (entry.problem.exact) {
    err_f = Real((traj.u.back() - entry.problem.exact(traj.t.back())).cwiseAbs().maxCoeff());
  }
  auto dec = [&](const Real& x) { return format_decimal(x, ctx); };

  std::ostringstream os;
  if (format == TableFormat::json) {
    Json doc;
    doc["problem"] = entry.name;
    doc["N"] = a.N;
    doc["family"] = std::string(to_string(family));
    doc["digits"] = ctx.decimal_digits;
    Json nodes = Json::array();
    for (size_t i = 0; i < traj.t.size(); ++i) {
      Json u = Json::array();
      for (int j = 0; j < D; ++j) u.push_back(dec(traj.u[i][j]));
      nodes.push_back({{"t", dec(traj.t[i])}, {"u", u}});
    }
    doc["nodes"] = nodes;
    if (a.dense > 0) {
      Json dense = Json::array();
      for (const auto& loc : traj.local) {
        Json samples = Json::array();
        for (int k = 0; k < a.dense; ++k) {
          const Real tau = a.dense == 1 ? Real(0) : Real(k) / (a.dense - 1);
          const VectorR v = eval_local_tau(loc, tab->basis, tau);
          Json u = Json::array();
          for (int j = 0; j < D; ++j) u.push_back(dec(v[j]));
          samples.push_back({{"t", dec(Real(loc.t_n + tau * loc.dt_n))}, {"u", u}});
        }
        dense.push_back(samples);
      }
      doc["dense"] = dense;
    }
    if (err_f) doc["e_n_f"] = format_decimal(*err_f, 20);
    os << doc.dump(2) << "\n";
  } else {
    const char* sep = format == TableFormat::csv ? "," : " ";
    os << "kind" << sep << "interval" << sep << "t";
    for (int j = 0; j < D; ++j) os << sep << "u" << j;
    os << "\n";
    for (size_t i = 0; i < traj.t.size(); ++i) {
      os << "node" << sep << i << sep << dec(traj.t[i]);
      for (int j = 0; j < D; ++j) os << sep << dec(traj.u[i][j]);
      os << "\n";
    }
    for (size_t n = 0; n < traj.local.size() && a.dense > 0; ++n) {
      const auto& loc = traj.local[n];
      for (int k = 0; k < a.dense; ++k) {
        const Real tau = a.dense == 1 ? Real(0) : Real(k) / (a.dense - 1);
        const VectorR v = eval_local_tau(loc, tab->basis, tau);
        os << "dense" << sep << n << sep << dec(Real(loc.t_n + tau * loc.dt_n));
        for (int j = 0; j < D; ++j) os << sep << dec(v[j]);
        os << "\n";
      }
    }
  }
  if (c.out.empty() && format == TableFormat::json) {
    out << os.str();
  } else {
    emit(c.out, os.str(), out);
    if (err_f) out << "# e^n_f = " << format_decimal(*err_f, 20) << "\n";
  }
  return kExitOk;
}

struct ConvergeArgs {
  std::string problem;
  std::string n_list;
  std::string m_list;
  int jobs = 1;
  std::string norm = "max";
  int decimals = 2;
  std::string oracle_tol = "1e-40";
};

int cmd_converge(const ConvergeArgs& a, const Common& c, const CliConfig& cfg, std::ostream& out,
                 std::ostream& err) {
  const std::vector<int> ns = parse_int_list(a.n_list);
  const std::vector<int> ms = parse_int_list(a.m_list);
  const int n_max = *std::max_element(ns.begin(), ns.end());
  const int m_max = *std::max_element(ms.begin(), ms.end());
  if (*std::min_element(ns.begin(), ns.end()) < 1) throw UsageError("-N values must be >= 1");
  if (a.jobs < 1) throw UsageError("--jobs must be >= 1");
  const TableFormat format = parse_table_format(c.format);

  StudyOptions opts;
  opts.jobs = a.jobs;
  opts.family = parse_family(c.family);
  if (a.norm == "max") {
    opts.errors.norm = VectorNorm::max;
  } else if (a.norm == "euclidean") {
    opts.errors.norm = VectorNorm::euclidean;
  } else {
    throw UsageError("--norm must be max or euclidean");
  }

  PrecisionContext ctx = context_for(c, cfg, n_max);
  ProblemCatalogEntry entry = lookup_problem(a.problem, ctx);
  ConvergenceTable table;
  if (entry.problem.exact) {
    table = convergence_study(entry.name, entry.problem, entry.problem.exact, ns, ms, ctx, opts);
  } else {
    // the oracle needs +60 digits and precision is process-wide, so the
    // whole study runs at the raised precision
    ctx = make_context(ctx.decimal_digits + 60);
    ctx.activate();
    entry = lookup_problem(a.problem, ctx);
    OracleConfig oc;
    oc.n_ref = n_max + 8;
    oc.m_ref = 4 * m_max;
    oc.tolerance = parse_decimal(a.oracle_tol, ctx);
    const Oracle oracle = build_oracle(entry, oc, ctx);
    err << "# oracle: N_ref=" << oracle.n_ref() << " M_ref=" << oracle.m_ref()
        << " agreement=" << format_decimal(oracle.agreement(), 3)
        << " invariant_drift=" << format_decimal(oracle.invariant_drift(), 3) << " digits=" << oracle.digits()
        << "\n";
    table = convergence_study(entry.name, entry.problem, [&](const Real& t) { return oracle(t); }, ns, ms, ctx,
                              opts);
  }

  std::string text;
  if (format == TableFormat::json) {
    Json doc;
    doc["orders"] = Json::parse(format_convergence_table(table, format, a.decimals));
    doc["errors"] = Json::parse(format_raw_errors(table, format));
    text = doc.dump(2) + "\n";
  } else {
    text = format_convergence_table(table, format, a.decimals) + "\n" + format_raw_errors(table, format);
  }
  emit(c.out, text, out);
  return kExitOk;
}

struct StabilityArgs {
  int N = 0;
  std::vector<std::string> z;
  std::string axis;
  int count = 50;
  std::string radius;
};

int cmd_stability(const StabilityArgs& a, const Common& c, const CliConfig& cfg, std::ostream& out) {
  if (a.N < 1) throw UsageError("-N must be >= 1");
  if (a.count < 1) throw UsageError("--count must be >= 1");
  const NodeFamily family = parse_family(c.family);
  const TableFormat format = parse_table_format(c.format);
  const PrecisionContext ctx = context_for(c, cfg, a.N);
  const AderDgTableau tab = build_tableau(a.N, family, ctx);

  std::vector<Complex<Real>> zs;
  for (const auto& s : a.z) zs.push_back(parse_complex(s, ctx));
  if (!a.axis.empty()) {
    const int n = a.count;
    if (a.axis == "negative-real") {
      // log-spaced from -1e-2 to -radius (default -1e8)
      const Real r = a.radius.empty() ? pow10(8) : parse_decimal(a.radius, ctx);
      const Real lo = log10(Real("0.01")), hi = log10(r);
      for (int k = 0; k < n; ++k) {
        const Real e = n == 1 ? hi : lo + (hi - lo) * k / (n - 1);
        zs.emplace_back(-pow(Real(10), e), Real(0));
      }
    } else if (a.axis == "imaginary" || a.axis == "real") {
      const Real r = a.radius.empty() ? Real(100) : parse_decimal(a.radius, ctx);
      for (int k = 0; k < n; ++k) {
        const Real v = n == 1 ? Real(0) : -r + 2 * r * k / (n - 1);
        zs.push_back(a.axis == "real" ? Complex<Real>(v, Real(0)) : Complex<Real>(Real(0), v));
      }
    } else {
      throw UsageError("--axis must be imaginary, real or negative-real");
    }
  }
  if (zs.empty()) {
    // default: L-stability profile along the negative real axis
    for (int e = -2; e <= 8; ++e) zs.emplace_back(-pow10(e), Real(0));
  }

  const std::vector<std::string> header{"z", "R", "pade", "deviation", "abs_R"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& z : zs) {
    std::vector<std::string> row{format_complex(z, 20)};
    try {
      const Complex<Real> R = stability_function(tab, z, ctx);
      const Complex<Real> P = pade_exp(a.N, z, ctx);
      const Real dev = abs(R - P) / abs(P);
      row.insert(row.end(), {format_complex(R, 30), format_complex(P, 30), format_decimal(dev, 3),
                             format_decimal(abs(R), 20)});
    } catch (const PoleError&) {
      row.insert(row.end(), {"pole", "pole", "-", "-"});
    }
    rows.push_back(std::move(row));
  }
  emit(c.out, render(header, rows, format), out);
  return kExitOk;
}

}  // namespace

CliConfig load_cli_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot read config file '" + path + "'");
  CliConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    int v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size() || v < 1) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": '" + value + "' is not a positive integer");
    }
    if (key == "max_order") {
      cfg.max_order = v;
    } else if (key == "default_digits") {
      cfg.default_digits = v;
    } else {
      throw ParseError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ADER-DG implicit Runge-Kutta tableaus, integration and convergence studies", "aderdg"};
  app.require_subcommand(1, 1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file (overrides $ADERDG_CONFIG)");

  Common common;

  int tab_n = 0;
  auto* tableau = app.add_subcommand("tableau", "build, verify and export the Butcher tableau of order N");
  tableau->add_option("-N,--order", tab_n, "polynomial degree N")->required();
  add_common(tableau, common);

  int ver_n = 0;
  auto* verify = app.add_subcommand("verify", "check identities and stability properties for N = 1..N_max");
  verify->add_option("-N,--order", ver_n, "largest degree")->required();
  add_common(verify, common);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "integrate a catalog problem");
  solve->add_option("problem", sa.problem, "harmonic, pendulum, dahlquist:<lambda> or poly:<L>:<seed>")->required();
  solve->add_option("-N,--order", sa.N, "polynomial degree N")->required();
  solve->add_option("-M", sa.M, "number of uniform intervals");
  solve->add_option("--nodes", sa.nodes, "comma-separated grid nodes from t0 to tf");
  solve->add_option("--dense", sa.dense, "dense samples per interval");
  solve->add_option("--jacobian", sa.jacobian, "analytic, finite-difference or picard");
  add_common(solve, common);

  ConvergeArgs ca;
  auto* converge = app.add_subcommand("converge", "empirical convergence orders over an (N, M) sweep");
  converge->add_option("problem", ca.problem, "catalog problem")->required();
  converge->add_option("-N,--order", ca.n_list, "degrees, e.g. 2,3,4 or 2:8")->required();
  converge->add_option("-M", ca.m_list, "interval counts, e.g. 4,6,...,18 or 4:18:2")->required();
  converge->add_option("--jobs", ca.jobs, "worker threads");
  converge->add_option("--norm", ca.norm, "vector norm: max or euclidean");
  converge->add_option("--decimals", ca.decimals, "decimals of the printed orders");
  converge->add_option("--oracle-tol", ca.oracle_tol, "agreement and drift bound of the reference run");
  add_common(converge, common);

  StabilityArgs sta;
  auto* stability = app.add_subcommand("stability", "sample R(z) against the (N, N+1) Pade approximant");
  stability->add_option("-N,--order", sta.N, "polynomial degree N")->required();
  stability->add_option("--z", sta.z, "sample point, e.g. 1, -1e8, 2i, 1-3i (repeatable)");
  stability->add_option("--axis", sta.axis, "imaginary, real or negative-real");
  stability->add_option("--count", sta.count, "samples along --axis");
  stability->add_option("--radius", sta.radius, "extent along --axis");
  add_common(stability, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CliConfig cfg;
    if (!config_path.empty()) {
      cfg = load_cli_config(config_path);
    } else if (const char* env = std::getenv("ADERDG_CONFIG"); env && *env) {
      cfg = load_cli_config(env);
    }
    if (*tableau) return cmd_tableau(tab_n, common, cfg, out);
    if (*verify) return cmd_verify(ver_n, common, cfg, out);
    if (*solve) return cmd_solve(sa, common, cfg, out);
    if (*converge) return cmd_converge(ca, common, cfg, out, err);
    return cmd_stability(sta, common, cfg, out);
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const AnalysisError& e) {
    err << "analysis aborted: " << e.what() << "\n";
    return kExitAnalysis;
  } catch (const TableauError& e) {
    err << "verification failure: " << e.what() << "\n";
    return kExitVerification;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace aderdg
