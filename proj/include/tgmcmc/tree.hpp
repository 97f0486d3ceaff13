#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "tgmcmc/crm.hpp"
#include "tgmcmc/likelihood.hpp"
#include "tgmcmc/logmath.hpp"
#include "tgmcmc/rng.hpp"

namespace tgmcmc {

// Binary cluster tree node with cached log potentials. log_ml is
// u-independent; log_phi_h, log_phi and log_d must be refreshed whenever u
// changes. Children are ordered by node id (smaller id left).
struct TreeNode {
  std::uint64_t id = 0;
  TreeNode* parent = nullptr;
  std::unique_ptr<TreeNode> left, right;  // both null <=> leaf
  std::int32_t leaf_index = -1;
  std::int64_t size = 0;
  SuffStats stats;
  double log_ml = 0.0;     // log P(dX_c)
  double log_phi_h = 0.0;  // log kappa(|c|, u) + log_ml
  double log_phi = 0.0;    // leaf: log_phi_h; else logaddexp(log_phi_h, phi_l + phi_r)
  double log_d = kNegInf;  // log d(l(c), r(c)); leaves: -inf (d = 0)

  bool is_leaf() const { return left == nullptr; }
};

// log d floored here before inversion in StocInsert weights; identical points
// drive d to 0 and the floor keeps d^{-1} finite.
inline constexpr double kLogDFloor = -690.7755278982137;  // log(1e-300)

// Root collection forming the current partition, plus the per-chain node id
// counter and the index -> leaf map. Owned by exactly one chain.
class Forest {
 public:
  explicit Forest(std::int64_t n_points);
  Forest(Forest&&) = default;
  Forest& operator=(Forest&&) = default;

  std::int64_t num_points() const { return n_; }
  std::int64_t num_assigned() const { return assigned_; }
  std::size_t num_roots() const { return roots_.size(); }
  TreeNode* root(std::size_t k) { return roots_[k].get(); }
  const TreeNode* root(std::size_t k) const { return roots_[k].get(); }
  std::size_t index_of_root(const TreeNode* r) const;

  TreeNode* leaf(std::int64_t i) const {
    return i >= 0 && i < n_ ? leaves_[static_cast<std::size_t>(i)] : nullptr;
  }
  TreeNode* root_of(std::int64_t i) const;

  std::uint64_t fresh_id() { return next_id_++; }
  std::uint64_t next_id() const { return next_id_; }

  void add_root(std::unique_ptr<TreeNode> t);
  void insert_root(std::size_t k, std::unique_ptr<TreeNode> t);
  std::unique_ptr<TreeNode> take_root(std::size_t k);
  // restore the root list to a previously captured pointer order
  void restore_root_order(const std::vector<TreeNode*>& order,
                          std::vector<std::unique_ptr<TreeNode>> loose);
  std::vector<TreeNode*> root_order() const;

  std::vector<std::int64_t> root_sizes() const;
  // cluster index per data point; unassigned points get -1
  std::vector<std::int32_t> assignment() const;

  Forest clone() const;  // deep copy preserving node ids (debug support)

  // registers a leaf created by make_leaf; internal use
  void register_leaf(TreeNode* leaf);

 private:
  std::vector<std::unique_ptr<TreeNode>> roots_;
  std::vector<TreeNode*> leaves_;
  std::uint64_t next_id_ = 0;
  std::int64_t n_ = 0;
  std::int64_t assigned_ = 0;
};

// --- cache maintenance -------------------------------------------------

// recompute stats, log_ml and all potentials of an internal node from its
// children (deterministic: identical inputs give bit-identical caches)
void recompute_internal(TreeNode& node, const LikelihoodModel& model,
                        const CrmPrior& prior, double u);
// recompute u-dependent fields only, bottom-up over the whole tree
void refresh_potentials(TreeNode& root, const CrmPrior& prior, double u);
// recompute caches upward from `from` (inclusive) to the root
void recompute_path(TreeNode* from, const LikelihoodModel& model,
                    const CrmPrior& prior, double u);

// --- construction primitives -------------------------------------------

std::unique_ptr<TreeNode> make_leaf(Forest& f, std::int64_t i, const LikelihoodModel& model,
                                    const CrmPrior& prior, double u);
std::unique_ptr<TreeNode> join(Forest& f, std::unique_ptr<TreeNode> a,
                               std::unique_ptr<TreeNode> b, const LikelihoodModel& model,
                               const CrmPrior& prior, double u);

// Eq-9 dissimilarity across two root trees, in log space.
double log_dissimilarity(const TreeNode& a, const TreeNode& b,
                         const LikelihoodModel& model, const CrmPrior& prior, double u);

// --- SeqInsert ----------------------------------------------------------

struct SeqInsertOutcome {
  std::unique_ptr<TreeNode> host;                  // surviving tree; null if dissolved
  std::vector<std::unique_ptr<TreeNode>> pieces;   // severed subtrees, FIFO (split mode)
  TreeNode* joint = nullptr;                       // join node created by the placement
  TreeNode* inserted = nullptr;                    // the subtree that was inserted
};

// Insert tree s into host by the three-case descent. With allow_split, any
// updated d > 1 on the placement path cuts the tree at the lowest such level
// and dissolves everything above; the pieces are returned bottom-up.
SeqInsertOutcome seq_insert(Forest& f, std::unique_ptr<TreeNode> host,
                            std::unique_ptr<TreeNode> s, const LikelihoodModel& model,
                            const CrmPrior& prior, double u, bool allow_split);

// Reverse a no-split seq_insert: removes `joint`, reattaches the displaced
// subtree and recomputes the path. Returns ownership of the inserted subtree.
// `host_slot` is the owning slot of the host tree's root.
std::unique_ptr<TreeNode> undo_seq_insert(std::unique_ptr<TreeNode>& host_slot,
                                          TreeNode* joint, TreeNode* inserted,
                                          const LikelihoodModel& model,
                                          const CrmPrior& prior, double u);

// Detach leaf i from its tree (sibling promoted, path recomputed). A singleton
// root is removed from the root list. Returns ownership of the leaf.
std::unique_ptr<TreeNode> detach_leaf(Forest& f, std::int64_t i,
                                      const LikelihoodModel& model, const CrmPrior& prior,
                                      double u);

// --- SampleSub ----------------------------------------------------------

std::vector<TreeNode*> enumerate_subtrees(TreeNode& root, bool nonleaf_only);
std::vector<const TreeNode*> enumerate_subtrees(const TreeNode& root, bool nonleaf_only);

struct SubtreeDraw {
  TreeNode* node = nullptr;
  double log_prob = 0.0;
};
// Draw a subtree with probability proportional to d + eps, where eps is the
// maximum d over the eligible set (1 when that maximum is 0).
SubtreeDraw sample_sub(TreeNode& root, Rng& rng, bool nonleaf_only);
double sample_sub_prob(const TreeNode& root, const TreeNode& target, bool nonleaf_only);

// --- StocInsert ----------------------------------------------------------

inline constexpr std::size_t kNewCluster = static_cast<std::size_t>(-1);

// branch log-probabilities over |S|+1 destinations (last = new cluster)
std::vector<double> stoc_insert_log_probs(std::span<const TreeNode* const> S,
                                          const TreeNode& c, const LikelihoodModel& model,
                                          const CrmPrior& prior, double u);

struct StocInsertOutcome {
  std::size_t dest = kNewCluster;  // index into S before the call, or kNewCluster
  double log_prob = 0.0;
  TreeNode* joint = nullptr;     // join node when inserted into an existing tree
  TreeNode* inserted = nullptr;  // raw pointer to c
};

// Insert c into one of the trees of S (via seq_insert, never splitting) or
// append it to S as a new root, with the d^{-1}-proportional weights.
StocInsertOutcome stoc_insert(Forest& f, std::vector<std::unique_ptr<TreeNode>>& S,
                              std::unique_ptr<TreeNode> c, Rng& rng,
                              const LikelihoodModel& model, const CrmPrior& prior, double u);

double stoc_insert_prob(std::span<const TreeNode* const> S, const TreeNode& c,
                        std::size_t dest, const LikelihoodModel& model,
                        const CrmPrior& prior, double u);

// --- audits ---------------------------------------------------------------

std::vector<std::int64_t> collect_leaf_indices(const TreeNode& root);
// recompute every cache from the leaves and compare; throws std::logic_error
void audit_tree(const TreeNode& root, const LikelihoodModel& model, const CrmPrior& prior,
                double u, double tol = 1e-9);
void audit_forest(const Forest& f, const LikelihoodModel& model, const CrmPrior& prior,
                  double u, double tol = 1e-9);
bool forests_identical(const Forest& a, const Forest& b, double tol = 1e-12);

}  // namespace tgmcmc
