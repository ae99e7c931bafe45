#include <doctest.h>

#include "aderdg/arith.hpp"

using namespace aderdg;

TEST_CASE("context sets roundoff and identity tolerance") {
  const PrecisionContext ctx = make_context(120);
  CHECK(ctx.decimal_digits == 120);
  CHECK(abs(ctx.unit_roundoff / pow10(-120) - 1) < pow10(-100));
  CHECK(abs(ctx.identity_tol / pow10(-110) - 1) < pow10(-100));
  CHECK_THROWS_AS(make_context(10), PrecisionError);
  CHECK_THROWS_AS(make_context(kMinDecimalDigits - 1), PrecisionError);
}

TEST_CASE("values keep the precision they were made with") {
  const PrecisionContext lo = make_context(40);
  lo.activate();
  const Real third_lo = Real(1) / 3;
  const PrecisionContext hi = make_context(120);
  hi.activate();
  const Real third_hi = Real(1) / 3;
  const Real diff = abs(third_hi - Real(third_lo));
  CHECK(diff > pow10(-60));
  CHECK(diff < pow10(-38));
}

TEST_CASE("ScopedPrecision restores the default") {
  make_context(50).activate();
  const unsigned before = Real::default_precision();
  {
    ScopedPrecision raise(200);
    CHECK(Real::default_precision() >= 200);
  }
  CHECK(Real::default_precision() == before);
}

TEST_CASE("round_to drops digits") {
  const PrecisionContext ctx = make_context(120);
  ctx.activate();
  Real x = Real(2) / 3;
  round_to(x, 30);
  const Real err = abs(x - Real(2) / 3);
  CHECK(err > pow10(-40));
  CHECK(err < pow10(-28));
}

TEST_CASE("decimal parsing") {
  const PrecisionContext ctx = make_context(120);
  ctx.activate();
  CHECK(abs(10 * parse_decimal("0.1", ctx) - 1) < pow10(-118));
  CHECK(parse_decimal("-2.5e3", ctx) == -2500);
  CHECK(parse_decimal(".5", ctx) == Real(1) / 2);
  CHECK(parse_decimal("+7", ctx) == 7);
  CHECK(is_decimal_literal("1.25e-7"));
  CHECK_FALSE(is_decimal_literal("1,5"));
  CHECK_FALSE(is_decimal_literal("abc"));
  CHECK_FALSE(is_decimal_literal(""));
  CHECK_FALSE(is_decimal_literal("1e"));
  CHECK_THROWS_AS(parse_decimal("1,5", ctx), ParseError);
  CHECK_THROWS_AS(parse_decimal("nan", ctx), ParseError);
}

TEST_CASE("decimal formatting round trips") {
  const PrecisionContext ctx = make_context(120);
  ctx.activate();
  const Real x = sqrt(Real(2));
  const std::string s = format_decimal(x, ctx);
  CHECK(s.rfind("1.41421356237309504880", 0) == 0);
  CHECK(abs(parse_decimal(s, ctx) - x) < pow10(-118));
  CHECK(format_decimal(Real(1) / 3, 10) == "0.3333333333");
}

TEST_CASE("complex arithmetic") {
  const PrecisionContext ctx = make_context(60);
  ctx.activate();
  const Complex<Real> q = Complex<Real>(Real(1), Real(2)) / Complex<Real>(Real(3), Real(4));
  CHECK(abs(q.re - Real(11) / 25) < pow10(-58));
  CHECK(abs(q.im - Real(2) / 25) < pow10(-58));
  // Smith division in the |im| > |re| branch
  const Complex<Real> r = Complex<Real>(Real(1), Real(0)) / Complex<Real>(Real(1), Real(1000));
  CHECK(abs(r.re - Real(1) / 1000001) < pow10(-58));
  CHECK(abs(r.im + Real(1000) / 1000001) < pow10(-58));
  const Real pi = 4 * atan(Real(1));
  const Complex<Real> e = exp(Complex<Real>(Real(0), pi));
  CHECK(abs(e.re + 1) < pow10(-58));
  CHECK(abs(e.im) < pow10(-58));
  CHECK(abs(abs(Complex<Real>(Real(3), Real(4))) - 5) < pow10(-58));
}

TEST_CASE("complex literals") {
  const PrecisionContext ctx = make_context(60);
  ctx.activate();
  auto z = parse_complex("1-3i", ctx);
  CHECK(z.re == 1);
  CHECK(z.im == -3);
  z = parse_complex("2i", ctx);
  CHECK(z.re == 0);
  CHECK(z.im == 2);
  z = parse_complex("-1e8", ctx);
  CHECK(z.re == -100000000);
  CHECK(z.im == 0);
  z = parse_complex("1e-2+1e+2i", ctx);
  CHECK(z.im == 100);
  z = parse_complex("-i", ctx);
  CHECK(z.im == -1);
  CHECK_THROWS_AS(parse_complex("", ctx), ParseError);
  CHECK_THROWS_AS(parse_complex("1+xi", ctx), ParseError);
  CHECK(format_complex(Complex<Real>(Real(1), Real(-2)), 3) == "1.00-2.00i");
}
