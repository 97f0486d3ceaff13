#pragma once

#include <cstdint>
#include <vector>

#include "tgmcmc/tree.hpp"

namespace tgmcmc {

// Insert point i into the forest: nearest root by dissimilarity, new singleton
// root when min d > 1, otherwise SeqInsert with splitting; severed subtrees
// re-enter the same step FIFO until none remain.
void ibhc_insert(Forest& f, std::int64_t i, const LikelihoodModel& model,
                 const CrmPrior& prior, double u);

// Incremental construction over the given insertion order. `restarts` extra
// constructions use fresh rng-shuffled orders; the forest with the highest
// joint score (Eq-4 u terms plus the sum of root log potentials) wins.
Forest ibhc_build(const std::vector<std::int64_t>& order, const LikelihoodModel& model,
                  const CrmPrior& prior, double u, int restarts, Rng& rng);

// Degenerate initializer: nearest-root choice as in step 1, but the point is
// always joined at the top of the chosen tree and nothing ever splits.
Forest flat_init(const std::vector<std::int64_t>& order, const LikelihoodModel& model,
                 const CrmPrior& prior, double u);

// score used by ibhc_build (higher is better)
double forest_log_score(const Forest& f, const CrmPrior& prior, double u);

std::vector<std::int64_t> identity_order(std::int64_t n);

}  // namespace tgmcmc
