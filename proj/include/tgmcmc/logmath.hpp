#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace tgmcmc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 + e^x), stable for large |x|
inline double log1pexp(double x) {
  if (x > 33.0) return x;           // e^{-x} below double epsilon
  if (x < -37.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

inline double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a >= b) return a + log1pexp(b - a);
  return b + log1pexp(a - b);
}

inline double logsumexp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

inline double logsumexp(const std::vector<double>& xs) {
  return logsumexp(std::span<const double>(xs));
}

}  // namespace tgmcmc
