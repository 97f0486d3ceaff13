#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tgmcmc/crm.hpp"
#include "tgmcmc/likelihood.hpp"
#include "tgmcmc/tree.hpp"

namespace tgmcmc {

// Canonical partition key: restricted growth string, one byte per point.
std::string partition_key(const std::vector<std::int32_t>& assignment);

// Visit every set partition of [n] (n <= 12) once, in restricted-growth-string
// order. The callback receives the block index of every point.
void enumerate_partitions(std::int64_t n,
                          const std::function<void(const std::vector<std::int32_t>&)>& visit);

std::int64_t bell_number(std::int64_t n);

struct ExactPosterior {
  std::map<std::string, double> probs;   // partition key -> posterior probability
  double log_normalizer = 0.0;           // logsumexp of per-partition cluster terms
  double log_u_terms = 0.0;              // (n-1)log u - psi(u) - lgamma(n)
};

// Brute-force posterior over all partitions of the dataset, conditional on u:
// posterior proportional to exp(sum_c [log kappa(|c|,u) + log P(dX_c)]).
ExactPosterior exact_posterior(const LikelihoodModel& model, const CrmPrior& prior,
                               double u, std::int64_t n);

struct LowerBoundCheck {
  bool holds = false;
  double gap = 0.0;  // exact joint minus the tree bound, in log space
};

// Eq-10 check: sum of root log potentials (plus the shared u terms) lower
// bounds the exact joint over all partitions.
LowerBoundCheck check_lower_bound(const Forest& f, const LikelihoodModel& model,
                                  const CrmPrior& prior, double u);

}  // namespace tgmcmc
