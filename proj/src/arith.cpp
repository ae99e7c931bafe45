#include "aderdg/arith.hpp"

#include <algorithm>
#include <cctype>
#include <ios>
#include <regex>

namespace aderdg {

namespace {

void set_default_digits(unsigned digits) {
  if (Real::default_precision() != digits) Real::default_precision(digits);
}

const std::regex& decimal_pattern() {
  static const std::regex re(R"(^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$)");
  return re;
}

}  // namespace

void PrecisionContext::activate() const { set_default_digits(static_cast<unsigned>(decimal_digits)); }

PrecisionContext make_context(int decimal_digits) {
  if (decimal_digits < kMinDecimalDigits) {
    throw PrecisionError("decimal_digits must be >= " + std::to_string(kMinDecimalDigits) + ", got " +
                         std::to_string(decimal_digits));
  }
  set_default_digits(static_cast<unsigned>(decimal_digits));
  PrecisionContext ctx;
  ctx.decimal_digits = decimal_digits;
  ctx.unit_roundoff = pow10(-decimal_digits);
  ctx.identity_tol = pow10(-decimal_digits + 10);
  return ctx;
}

PrecisionContext make_context(int decimal_digits, const Real& identity_tol) {
  PrecisionContext ctx = make_context(decimal_digits);
  if (!(identity_tol > ctx.unit_roundoff)) {
    throw PrecisionError("identity_tol must exceed unit_roundoff");
  }
  ctx.identity_tol = identity_tol;
  return ctx;
}

ScopedPrecision::ScopedPrecision(int decimal_digits) : saved_(Real::default_precision()) {
  set_default_digits(static_cast<unsigned>(decimal_digits));
}

ScopedPrecision::~ScopedPrecision() { set_default_digits(saved_); }

void round_to(Real& x, int decimal_digits) { x.precision(static_cast<unsigned>(decimal_digits)); }

Real pow10(int exponent) { return boost::multiprecision::pow(Real(10), exponent); }

bool is_decimal_literal(std::string_view s) {
  return std::regex_match(s.begin(), s.end(), decimal_pattern());
}

Real parse_decimal(std::string_view s, const PrecisionContext& ctx) {
  if (!is_decimal_literal(s)) {
    throw ParseError("malformed decimal string: '" + std::string(s) + "'");
  }
  ctx.activate();
  std::string text(s);
  if (text.front() == '+') text.erase(0, 1);
  return Real(text);
}

std::string format_decimal(const Real& x, const PrecisionContext& ctx) {
  return format_decimal(x, ctx.decimal_digits);
}

std::string format_decimal(const Real& x, int significant_digits) {
  if (significant_digits < 1) significant_digits = 1;
  if (x == 0) return "0";
  // d.ddd...e[+-]k with exactly `significant_digits` digits
  std::string sci = x.str(significant_digits - 1, std::ios_base::scientific);
  const bool negative = sci.front() == '-';
  if (negative) sci.erase(0, 1);
  const auto epos = sci.find_first_of("eE");
  std::string mantissa = sci.substr(0, epos);
  const int exponent = std::stoi(sci.substr(epos + 1));
  mantissa.erase(std::remove(mantissa.begin(), mantissa.end(), '.'), mantissa.end());

  std::string out;
  if (exponent >= -5 && exponent < significant_digits) {
    if (exponent < 0) {
      out = "0." + std::string(static_cast<size_t>(-exponent - 1), '0') + mantissa;
    } else {
      out = mantissa.substr(0, static_cast<size_t>(exponent) + 1);
      if (mantissa.size() > static_cast<size_t>(exponent) + 1) {
        out += "." + mantissa.substr(static_cast<size_t>(exponent) + 1);
      }
    }
  } else {
    out = mantissa.substr(0, 1);
    if (mantissa.size() > 1) out += "." + mantissa.substr(1);
    out += (exponent < 0 ? "e-" : "e+") + std::to_string(std::abs(exponent));
  }
  return negative ? "-" + out : out;
}

Complex<Real> exp(const Complex<Real>& z) {
  Real m = boost::multiprecision::exp(z.re);
  return {m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im)};
}

Complex<Real> parse_complex(std::string_view s, const PrecisionContext& ctx) {
  std::string text(s);
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }),
             text.end());
  if (text.empty()) throw ParseError("empty complex literal");
  if (text.back() != 'i' && text.back() != 'j') {
    return {parse_decimal(text, ctx), Real(0)};
  }
  text.pop_back();
  // split at the last sign that is not part of an exponent
  size_t split = std::string::npos;
  for (size_t i = text.size(); i-- > 1;) {
    if ((text[i] == '+' || text[i] == '-') && text[i - 1] != 'e' && text[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto imag_part = [&](const std::string& t) {
    if (t.empty() || t == "+") return Real(1);
    if (t == "-") return Real(-1);
    return parse_decimal(t, ctx);
  };
  if (split == std::string::npos) return {Real(0), imag_part(text)};
  return {parse_decimal(text.substr(0, split), ctx), imag_part(text.substr(split))};
}

std::string format_complex(const Complex<Real>& z, int significant_digits) {
  std::string im = format_decimal(z.im, significant_digits);
  if (im.front() != '-') im = "+" + im;
  return format_decimal(z.re, significant_digits) + im + "i";
}

}  // namespace aderdg
