#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tgmcmc/logmath.hpp"

namespace tgmcmc {

// Seeded generator owned by exactly one chain. All stochastic choices in the
// library go through this wrapper so that a fixed seed replays bit-identically.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

  void seed(std::uint64_t s) { gen_.seed(s); }

  double uniform() { return unit_(gen_); }

  double normal(double mean = 0.0, double sd = 1.0) {
    return mean + sd * normal_(gen_);
  }

  // uniform integer in [0, n)
  std::int64_t uniform_int(std::int64_t n) {
    assert(n > 0);
    return static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(n));
  }

  bool bernoulli_log(double log_p) { return std::log(uniform()) < log_p; }

  // Draw an index from unnormalized log weights; also reports the normalized
  // log probability of the drawn index.
  std::size_t categorical_log(std::span<const double> log_w, double* log_prob_out = nullptr) {
    const double log_z = logsumexp(log_w);
    double r = uniform();
    double acc = 0.0;
    std::size_t pick = log_w.size() - 1;
    for (std::size_t i = 0; i < log_w.size(); ++i) {
      acc += std::exp(log_w[i] - log_z);
      if (r < acc) {
        pick = i;
        break;
      }
    }
    // guard against an all -inf tail leaving pick at a zero-weight slot
    while (pick > 0 && log_w[pick] == kNegInf) --pick;
    if (log_prob_out) *log_prob_out = log_w[pick] - log_z;
    return pick;
  }

  std::mt19937_64& engine() { return gen_; }

  // Fisher-Yates; deterministic given the stream position.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(static_cast<std::int64_t>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace tgmcmc
