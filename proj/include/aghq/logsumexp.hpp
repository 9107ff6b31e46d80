#ifndef AGHQ_LOGSUMEXP_HPP
#define AGHQ_LOGSUMEXP_HPP

#include <cmath>
#include <limits>
#include <span>

namespace aghq {

/// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(sum_i exp(v_i)), max-shifted, summed in index order so results are
/// reproducible bit-for-bit for a fixed input ordering.
inline double logsumexp(std::span<const double> v) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v)
    if (x > hi) hi = x;
  if (std::isinf(hi)) return hi;  // empty or all -inf
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

}  // namespace aghq

#endif
