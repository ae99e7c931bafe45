#pragma once

// Arbitrary-precision scalar, dense Eigen aliases, and the precision context
// every generator and verifier computes against.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace aderdg {

/// Variable-precision MPFR real. Expression templates are disabled so that
/// Eigen kernels and `auto` locals behave like ordinary value types.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixR = Matrix<Real>;
using VectorR = Vector<Real>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PrecisionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kMinDecimalDigits = 30;

/// Working precision for one run. Creating or activating a context sets the
/// process-wide MPFR default precision; values keep the precision they were
/// created with.
struct PrecisionContext {
  int decimal_digits = 0;
  Real unit_roundoff;  // 10^-digits
  Real identity_tol;   // unit_roundoff * 10^10 unless overridden

  void activate() const;
};

PrecisionContext make_context(int decimal_digits);
PrecisionContext make_context(int decimal_digits, const Real& identity_tol);

/// Temporarily raises (or lowers) the default precision; restores on exit.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(int decimal_digits);
  ~ScopedPrecision();
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  unsigned saved_;
};

/// Rounds `x` to `decimal_digits` in place.
void round_to(Real& x, int decimal_digits);

Real pow10(int exponent);

/// Accepts `[+-]digits[.digits][e[+-]k]` (or `.digits`); no locale, no separators.
Real parse_decimal(std::string_view s, const PrecisionContext& ctx);
bool is_decimal_literal(std::string_view s);

/// Emits `ctx.decimal_digits` significant digits, fixed notation for
/// moderate magnitudes and scientific otherwise.
std::string format_decimal(const Real& x, const PrecisionContext& ctx);
std::string format_decimal(const Real& x, int significant_digits);

/// Complex number as a pair of reals sharing the same precision contract.
template <typename T>
struct Complex {
  T re{};
  T im{};

  Complex() = default;
  Complex(T r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}

  friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
  friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
  friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator*(const T& s, const Complex& a) { return {s * a.re, s * a.im}; }
  friend Complex operator/(const Complex& a, const Complex& b) {
    // Smith's algorithm
    using std::abs;
    if (abs(b.re) >= abs(b.im)) {
      T r = b.im / b.re;
      T d = b.re + b.im * r;
      return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
    }
    T r = b.re / b.im;
    T d = b.re * r + b.im;
    return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
  }
  Complex& operator+=(const Complex& b) { return *this = *this + b; }
  Complex& operator*=(const Complex& b) { return *this = *this * b; }

  Complex conj() const { return {re, -im}; }
  T norm2() const { return re * re + im * im; }
};

template <typename T>
T abs(const Complex<T>& z) {
  using std::sqrt;
  return sqrt(z.norm2());
}

Complex<Real> exp(const Complex<Real>& z);

/// Parses `a`, `a+bi`, `a-bi`, `bi` with decimal components.
Complex<Real> parse_complex(std::string_view s, const PrecisionContext& ctx);
std::string format_complex(const Complex<Real>& z, int significant_digits);

}  // namespace aderdg
