#pragma once

// Monomial-coefficient polynomial helpers on [0,1]. Coefficients are stored
// lowest degree first.

#include "aderdg/arith.hpp"

namespace aderdg::detail {

template <typename Scalar, typename Coeffs>
Scalar horner(const Coeffs& c, const Scalar& x) {
  Scalar acc(0);
  for (Eigen::Index k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

template <typename Scalar, typename Coeffs>
Vector<Scalar> derivative(const Coeffs& c) {
  const Eigen::Index n = c.size();
  if (n <= 1) return Vector<Scalar>::Zero(1);
  Vector<Scalar> d(n - 1);
  for (Eigen::Index k = 1; k < n; ++k) d[k - 1] = Scalar(static_cast<int>(k)) * c[k];
  return d;
}

/// Exact integral of the product f*g over [0,1].
template <typename Scalar, typename A, typename B>
Scalar integrate_product(const A& f, const B& g) {
  Scalar total(0);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (f[i] == 0) continue;
    Scalar inner(0);
    for (Eigen::Index j = 0; j < g.size(); ++j) inner += g[j] / Scalar(static_cast<int>(i + j + 1));
    total += f[i] * inner;
  }
  return total;
}

template <typename Scalar, typename A>
Scalar integrate(const A& f) {
  Scalar total(0);
  for (Eigen::Index k = 0; k < f.size(); ++k) total += f[k] / Scalar(static_cast<int>(k + 1));
  return total;
}

}  // namespace aderdg::detail
