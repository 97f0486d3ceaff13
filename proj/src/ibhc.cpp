#include "tgmcmc/ibhc.hpp"

#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace tgmcmc {

namespace {

// Step 1 for an arbitrary subtree: attach to the nearest root, or become a new
// root when the smallest dissimilarity exceeds 1 (or the forest is empty).
// Returns severed pieces for re-insertion.
std::vector<std::unique_ptr<TreeNode>> step1_place(Forest& f, std::unique_ptr<TreeNode> c,
                                                   const LikelihoodModel& model,
                                                   const CrmPrior& prior, double u,
                                                   bool allow_split, bool force_top_join) {
  std::size_t best = 0;
  double best_log_d = kNegInf;
  bool have = false;
  for (std::size_t k = 0; k < f.num_roots(); ++k) {
    const double log_d = log_dissimilarity(*f.root(k), *c, model, prior, u);
    if (!have || log_d < best_log_d) {
      best = k;
      best_log_d = log_d;
      have = true;
    }
  }
  if (!have || best_log_d > 0.0) {
    f.add_root(std::move(c));
    return {};
  }
  std::unique_ptr<TreeNode> host = f.take_root(best);
  if (force_top_join) {
    auto merged = join(f, std::move(host), std::move(c), model, prior, u);
    f.insert_root(best, std::move(merged));
    return {};
  }
  SeqInsertOutcome out =
      seq_insert(f, std::move(host), std::move(c), model, prior, u, allow_split);
  if (out.host) {
    f.insert_root(best, std::move(out.host));
    return {};
  }
  return std::move(out.pieces);
}

void insert_with_splits(Forest& f, std::unique_ptr<TreeNode> first,
                        const LikelihoodModel& model, const CrmPrior& prior, double u) {
  std::deque<std::unique_ptr<TreeNode>> queue;
  queue.push_back(std::move(first));
  const std::int64_t guard = 10 * std::max<std::int64_t>(f.num_points(), 1);
  std::int64_t reinserted = 0;
  while (!queue.empty()) {
    if (++reinserted > guard)
      throw std::runtime_error("ibhc_insert: split cascade failed to terminate");
    std::unique_ptr<TreeNode> c = std::move(queue.front());
    queue.pop_front();
    auto pieces = step1_place(f, std::move(c), model, prior, u, /*allow_split=*/true,
                              /*force_top_join=*/false);
    for (auto& p : pieces) queue.push_back(std::move(p));
  }
}

}  // namespace

void ibhc_insert(Forest& f, std::int64_t i, const LikelihoodModel& model,
                 const CrmPrior& prior, double u) {
  insert_with_splits(f, make_leaf(f, i, model, prior, u), model, prior, u);
}

double forest_log_score(const Forest& f, const CrmPrior& prior, double u) {
  const double n = static_cast<double>(f.num_assigned());
  double score = (n - 1.0) * std::log(u) - crm::psi(prior, u) - std::lgamma(n);
  for (std::size_t k = 0; k < f.num_roots(); ++k) score += f.root(k)->log_phi;
  return score;
}

Forest ibhc_build(const std::vector<std::int64_t>& order, const LikelihoodModel& model,
                  const CrmPrior& prior, double u, int restarts, Rng& rng) {
  if (restarts < 1) restarts = 1;
  Forest best(0);
  double best_score = kNegInf;
  std::vector<std::int64_t> cur = order;
  for (int r = 0; r < restarts; ++r) {
    if (r > 0) rng.shuffle(cur);
    Forest f(static_cast<std::int64_t>(model.num_points()));
    for (std::int64_t i : cur) ibhc_insert(f, i, model, prior, u);
    const double score = forest_log_score(f, prior, u);
    if (score > best_score) {
      best_score = score;
      best = std::move(f);
    }
  }
  return best;
}

Forest flat_init(const std::vector<std::int64_t>& order, const LikelihoodModel& model,
                 const CrmPrior& prior, double u) {
  Forest f(static_cast<std::int64_t>(model.num_points()));
  for (std::int64_t i : order)
    step1_place(f, make_leaf(f, i, model, prior, u), model, prior, u,
                /*allow_split=*/false, /*force_top_join=*/true);
  return f;
}

std::vector<std::int64_t> identity_order(std::int64_t n) {
  std::vector<std::int64_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

}  // namespace tgmcmc
