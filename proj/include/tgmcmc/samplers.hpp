#pragma once

#include <cstdint>
#include <vector>

#include "tgmcmc/crm.hpp"
#include "tgmcmc/ibhc.hpp"
#include "tgmcmc/likelihood.hpp"
#include "tgmcmc/rng.hpp"
#include "tgmcmc/tree.hpp"

namespace tgmcmc {

enum class MoveKind { Split, Merge, Noop };

struct MoveCounters {
  std::int64_t proposals = 0;
  std::int64_t accepts = 0;
  double sum_log_r = 0.0;
  std::int64_t finite_log_r = 0;
};

struct MoveStatsTable {
  MoveCounters split;
  MoveCounters merge;
  MoveCounters sm;      // split-merge baseline
  MoveCounters u_walk;  // auxiliary-variable random walk
};

// One MCMC chain. The forest, u and rng are owned exclusively; the model is
// shared read-only across chains.
struct ChainState {
  CrmPrior prior;
  const LikelihoodModel* model = nullptr;
  Forest forest;
  double u = 1.0;
  Rng rng;
  MoveStatsTable move_stats;

  ChainState(CrmPrior prior_, const LikelihoodModel* model_, Forest forest_, double u_,
             std::uint64_t seed)
      : prior(prior_), model(model_), forest(std::move(forest_)), u(u_), rng(seed) {}
};

// log p(dX, Pi, du) at the current state (Eq-7 integrand): the partition
// factor plus the sum over clusters of log kappa(|c|,u) + log P(dX_c).
double joint_log_prob(const ChainState& state);

// Full accounting of one global move, including the decision signature needed
// to replay or to recompute the reverse probability from the post-state.
struct GlobalMoveRecord {
  MoveKind kind = MoveKind::Noop;
  bool accepted = false;
  double log_r = kNegInf;
  double log_q_fwd = 0.0;
  double log_q_rev = 0.0;
  double joint_before = 0.0;
  double joint_after = 0.0;
  std::size_t picked_root = 0;
  std::vector<std::uint8_t> include_mask;  // over the other pre-move roots, in order
  std::uint64_t cstar_id = 0;              // split: sampled subtree
  std::vector<std::size_t> stoc_dests;     // split: StocInsert destinations
  std::vector<std::int64_t> proposal_sizes;
  std::vector<std::uint64_t> s_root_ids;   // split: the S roots (post-state ids)
  std::uint64_t cascade_root_id = 0;       // merge: the new root
  std::uint64_t cascade_bottom_id = 0;     // merge: join of c and c_1
  std::vector<std::uint64_t> merged_ids;   // merge: [c, c_1..c_m] subtree ids
};

// Execute one global split/merge move (Eqs 11-12 bookkeeping, MH acceptance).
// A rejected proposal restores the forest bit-identically. With force_reject
// the proposal is always rolled back (replay support); the record still
// carries the full accounting.
GlobalMoveRecord global_move(ChainState& state, bool force_reject = false);

// Total probability that a global move from `state` merges exactly the roots
// in `member_ids` into one cluster (the Eq-11 sum over first picks).
double merge_move_log_prob(const ChainState& state,
                           const std::vector<std::uint64_t>& member_ids);

// Probability of the specific reverse-split path of Eq 12, evaluated on a
// post-merge state: pick the cascade root, keep M empty, SampleSub the cascade
// bottom, then re-create every remaining original cluster via StocInsert.
double split_back_log_prob(const ChainState& state, std::uint64_t cascade_root_id,
                           std::uint64_t cascade_bottom_id,
                           const std::vector<std::uint64_t>& merged_ids);

// Gibbs reassignment of the SampleSub-subsampled point set (D nested draws per
// root), Eq-6 weights, placement via no-split SeqInsert.
void local_move_sweep(ChainState& state, int D);

// Random-walk Metropolis on log u targeting p(u | Pi), followed by a potential
// refresh of every root. Returns the number of accepted inner steps.
int resample_u(ChainState& state, int inner_steps = 5, double step_scale = 0.5);

struct TgmcmcOptions {
  int G = 20;
  int D = 2;
  int u_steps = 5;  // 0 disables u resampling
};
std::vector<GlobalMoveRecord> tgmcmc_iteration(ChainState& state, const TgmcmcOptions& opt);

struct GibbsOptions {
  double subset_fraction = 1.0;  // < 1 gives the Gibbs_sub variant
  int u_steps = 5;
};
void marginal_gibbs_iteration(ChainState& state, const GibbsOptions& opt);

// One iteration = one random-pair split/merge move, then a per-point Gibbs
// sweep, then u resampling. subset_fraction < 1 restricts the sweep (SM_sub);
// the move itself always uses the full restricted-Gibbs launch.
struct SplitMergeOptions {
  int t_restricted = 5;
  double subset_fraction = 1.0;
  int u_steps = 5;
};
struct SmOutcome {
  MoveKind kind = MoveKind::Noop;
  bool accepted = false;
  double log_r = kNegInf;
  std::vector<std::int64_t> proposal_sizes;
};
SmOutcome split_merge_iteration(ChainState& state, const SplitMergeOptions& opt);

// Uniform random subset of [n] of size round(fraction*n) (at least 1), in
// ascending order. fraction >= 1 returns the full range without touching rng.
std::vector<std::int64_t> sample_subset(Rng& rng, std::int64_t n, double fraction);

}  // namespace tgmcmc
