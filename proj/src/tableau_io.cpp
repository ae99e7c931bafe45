#include "aderdg/tableau.hpp"

#include <json.hpp>

#include <algorithm>

namespace aderdg {

namespace {

using nlohmann::json;

json vec_json(const VectorR& v, int digits) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(format_decimal(v[i], digits));
  return out;
}

json mat_json(const MatrixR& m, int digits) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vec_json(m.row(i).transpose(), digits));
  return out;
}

Real entry(const json& j, const PrecisionContext& ctx) {
  if (!j.is_string()) throw ParseError("tableau entries must be decimal strings");
  return parse_decimal(j.get<std::string>(), ctx);
}

VectorR read_vec(const json& doc, const char* key, Eigen::Index size, const PrecisionContext& ctx) {
  if (!doc.contains(key) || !doc[key].is_array() || static_cast<Eigen::Index>(doc[key].size()) != size) {
    throw ParseError(std::string("tableau field '") + key + "' missing or of wrong length");
  }
  VectorR v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = entry(doc[key][static_cast<size_t>(i)], ctx);
  return v;
}

MatrixR read_mat(const json& doc, const char* key, Eigen::Index size, const PrecisionContext& ctx) {
  if (!doc.contains(key) || !doc[key].is_array() || static_cast<Eigen::Index>(doc[key].size()) != size) {
    throw ParseError(std::string("tableau field '") + key + "' missing or of wrong shape");
  }
  MatrixR m(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const json& row = doc[key][static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != size) {
      throw ParseError(std::string("tableau field '") + key + "' has a malformed row");
    }
    for (Eigen::Index j = 0; j < size; ++j) m(i, j) = entry(row[static_cast<size_t>(j)], ctx);
  }
  return m;
}

Real max_abs(const MatrixR& m) {
  Real out(0);
  for (Eigen::Index i = 0; i < m.size(); ++i) out = std::max(out, Real(abs(m.data()[i])));
  return out;
}

}  // namespace

std::string export_tableau(const AderDgTableau& tab) {
  const int d = tab.digits;
  json doc;
  doc["schema_version"] = kTableauSchemaVersion;
  doc["n"] = tab.n;
  doc["family"] = std::string(to_string(tab.basis.family));
  doc["digits"] = d;
  doc["tau"] = vec_json(tab.basis.tau, d);
  doc["w"] = vec_json(tab.basis.w, d);
  doc["psi"] = vec_json(tab.basis.psi, d);
  doc["psi_tilde"] = vec_json(tab.basis.psi_tilde, d);
  doc["kappa"] = mat_json(tab.kappa, d);
  doc["a"] = mat_json(tab.a, d);
  return doc.dump(2) + "\n";
}

AderDgTableau import_tableau(const std::string& document, const PrecisionContext& ctx) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed tableau document: ") + e.what());
  }
  try {
    if (doc.at("schema_version").get<int>() != kTableauSchemaVersion) {
      throw ParseError("unsupported tableau schema_version");
    }
  } catch (const json::exception&) {
    throw ParseError("tableau document lacks an integer schema_version");
  }
  AderDgTableau tab;
  int doc_digits = 0;
  try {
    tab.n = doc.at("n").get<int>();
    doc_digits = doc.at("digits").get<int>();
    tab.basis.family = parse_family(doc.at("family").get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("tableau header: ") + e.what());
  }
  if (tab.n < 0) throw ParseError("tableau degree must be non-negative");
  if (doc_digits < kMinDecimalDigits) throw ParseError("tableau digits below the supported floor");

  ctx.activate();
  const Eigen::Index s = tab.n + 1;
  tab.digits = std::min(doc_digits, ctx.decimal_digits);
  tab.basis.n = tab.n;
  tab.basis.tau = read_vec(doc, "tau", s, ctx);
  tab.basis.w = read_vec(doc, "w", s, ctx);
  tab.basis.psi = read_vec(doc, "psi", s, ctx);
  tab.basis.psi_tilde = read_vec(doc, "psi_tilde", s, ctx);
  tab.kappa = read_mat(doc, "kappa", s, ctx);
  tab.a = read_mat(doc, "a", s, ctx);

  // identities are checked at the precision the document actually carries
  const Real tol = pow10(-tab.digits + 10);
  {
    ScopedPrecision guard(ctx.decimal_digits + tableau_guard_digits(tab.n));
    const PrecisionContext inner = make_context(ctx.decimal_digits + tableau_guard_digits(tab.n));
    tab.basis.phi = lagrange_coefficients(tab.basis.tau, inner).phi;
  }
  ctx.activate();
  for (Eigen::Index i = 0; i < tab.basis.phi.size(); ++i) round_to(tab.basis.phi.data()[i], ctx.decimal_digits);

  const Lemma21Residuals l21 = verify_lemma21(tab, ctx);
  if (!(l21.max_structural() <= tol)) {
    throw TableauError("imported tableau fails the kappa/psi/w identities (residual " +
                       format_decimal(l21.max_structural(), 6) + ")");
  }
  const Real km = max_abs(tab.kappa * tab.a - MatrixR(tab.basis.w.asDiagonal()));
  const Real rows = max_abs(tab.a.rowwise().sum() - tab.basis.tau);
  if (!(km <= tol) || !(rows <= tol)) {
    throw TableauError("imported tableau is inconsistent: kappa a - mu residual " + format_decimal(km, 6) +
                       ", row-sum residual " + format_decimal(rows, 6));
  }
  VectorR psi(s), psit(s);
  for (Eigen::Index p = 0; p < s; ++p) {
    psi[p] = tab.basis.phi(p, 0);
    psit[p] = tab.basis.phi.row(p).sum();
  }
  if (!(max_abs(psi - tab.basis.psi) <= tol) || !(max_abs(psit - tab.basis.psi_tilde) <= tol)) {
    throw TableauError("imported psi values do not match the nodes");
  }
  return tab;
}

}  // namespace aderdg
