#include "tgmcmc/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tgmcmc {

// ---------------------------------------------------------------------------
// Forest
// ---------------------------------------------------------------------------

Forest::Forest(std::int64_t n_points) : n_(n_points) {
  leaves_.assign(static_cast<std::size_t>(n_points), nullptr);
}

std::size_t Forest::index_of_root(const TreeNode* r) const {
  for (std::size_t k = 0; k < roots_.size(); ++k)
    if (roots_[k].get() == r) return k;
  throw std::logic_error("Forest: node is not a root");
}

TreeNode* Forest::root_of(std::int64_t i) const {
  TreeNode* node = leaf(i);
  if (!node) throw std::logic_error("Forest: index not assigned");
  while (node->parent) node = node->parent;
  return node;
}

void Forest::add_root(std::unique_ptr<TreeNode> t) {
  t->parent = nullptr;
  roots_.push_back(std::move(t));
}

void Forest::insert_root(std::size_t k, std::unique_ptr<TreeNode> t) {
  t->parent = nullptr;
  roots_.insert(roots_.begin() + static_cast<std::ptrdiff_t>(k), std::move(t));
}

std::unique_ptr<TreeNode> Forest::take_root(std::size_t k) {
  std::unique_ptr<TreeNode> t = std::move(roots_[k]);
  roots_.erase(roots_.begin() + static_cast<std::ptrdiff_t>(k));
  return t;
}

void Forest::restore_root_order(const std::vector<TreeNode*>& order,
                                std::vector<std::unique_ptr<TreeNode>> loose) {
  for (auto& r : roots_) loose.push_back(std::move(r));
  roots_.clear();
  roots_.reserve(order.size());
  for (TreeNode* want : order) {
    bool found = false;
    for (auto& cand : loose) {
      if (cand.get() == want) {
        cand->parent = nullptr;
        roots_.push_back(std::move(cand));
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("Forest: cannot restore root order");
  }
  for (auto& leftover : loose)
    if (leftover) throw std::logic_error("Forest: stray tree after root-order restore");
}

std::vector<TreeNode*> Forest::root_order() const {
  std::vector<TreeNode*> order;
  order.reserve(roots_.size());
  for (const auto& r : roots_) order.push_back(r.get());
  return order;
}

std::vector<std::int64_t> Forest::root_sizes() const {
  std::vector<std::int64_t> sizes;
  sizes.reserve(roots_.size());
  for (const auto& r : roots_) sizes.push_back(r->size);
  return sizes;
}

std::vector<std::int32_t> Forest::assignment() const {
  std::vector<std::int32_t> assign(static_cast<std::size_t>(n_), -1);
  for (std::size_t k = 0; k < roots_.size(); ++k) {
    for (std::int64_t i : collect_leaf_indices(*roots_[k]))
      assign[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(k);
  }
  return assign;
}

void Forest::register_leaf(TreeNode* leaf) {
  auto& slot = leaves_[static_cast<std::size_t>(leaf->leaf_index)];
  if (slot) throw std::logic_error("Forest: leaf index already assigned");
  slot = leaf;
  ++assigned_;
}

namespace {
std::unique_ptr<TreeNode> clone_node(const TreeNode& node, TreeNode* parent,
                                     std::vector<TreeNode*>& leaves) {
  auto copy = std::make_unique<TreeNode>();
  copy->id = node.id;
  copy->parent = parent;
  copy->leaf_index = node.leaf_index;
  copy->size = node.size;
  copy->stats = node.stats;
  copy->log_ml = node.log_ml;
  copy->log_phi_h = node.log_phi_h;
  copy->log_phi = node.log_phi;
  copy->log_d = node.log_d;
  if (node.left) {
    copy->left = clone_node(*node.left, copy.get(), leaves);
    copy->right = clone_node(*node.right, copy.get(), leaves);
  } else {
    leaves[static_cast<std::size_t>(node.leaf_index)] = copy.get();
  }
  return copy;
}
}  // namespace

Forest Forest::clone() const {
  Forest copy(n_);
  copy.next_id_ = next_id_;
  copy.assigned_ = assigned_;
  for (const auto& r : roots_)
    copy.roots_.push_back(clone_node(*r, nullptr, copy.leaves_));
  return copy;
}

// ---------------------------------------------------------------------------
// cache maintenance
// ---------------------------------------------------------------------------

void recompute_internal(TreeNode& node, const LikelihoodModel& model,
                        const CrmPrior& prior, double u) {
  node.stats = node.left->stats;
  model.merge_into(node.stats, node.right->stats);
  node.size = node.left->size + node.right->size;
  node.log_ml = model.log_marginal(node.stats);
  node.log_phi_h = crm::log_kappa(prior, node.size, u) + node.log_ml;
  const double split_phi = node.left->log_phi + node.right->log_phi;
  node.log_phi = logaddexp(node.log_phi_h, split_phi);
  node.log_d = split_phi - node.log_phi_h;
}

void refresh_potentials(TreeNode& root, const CrmPrior& prior, double u) {
  if (!root.is_leaf()) {
    refresh_potentials(*root.left, prior, u);
    refresh_potentials(*root.right, prior, u);
  }
  root.log_phi_h = crm::log_kappa(prior, root.size, u) + root.log_ml;
  if (root.is_leaf()) {
    root.log_phi = root.log_phi_h;
    root.log_d = kNegInf;
  } else {
    const double split_phi = root.left->log_phi + root.right->log_phi;
    root.log_phi = logaddexp(root.log_phi_h, split_phi);
    root.log_d = split_phi - root.log_phi_h;
  }
}

void recompute_path(TreeNode* from, const LikelihoodModel& model, const CrmPrior& prior,
                    double u) {
  for (TreeNode* p = from; p; p = p->parent) recompute_internal(*p, model, prior, u);
}

// ---------------------------------------------------------------------------
// construction primitives
// ---------------------------------------------------------------------------

std::unique_ptr<TreeNode> make_leaf(Forest& f, std::int64_t i, const LikelihoodModel& model,
                                    const CrmPrior& prior, double u) {
  if (i < 0 || i >= f.num_points()) throw std::logic_error("make_leaf: index out of range");
  auto leaf = std::make_unique<TreeNode>();
  leaf->id = f.fresh_id();
  leaf->leaf_index = static_cast<std::int32_t>(i);
  leaf->size = 1;
  leaf->stats = model.singleton_stats(i);
  leaf->log_ml = model.log_marginal(leaf->stats);
  leaf->log_phi_h = crm::log_kappa(prior, 1, u) + leaf->log_ml;
  leaf->log_phi = leaf->log_phi_h;
  leaf->log_d = kNegInf;
  f.register_leaf(leaf.get());
  return leaf;
}

std::unique_ptr<TreeNode> join(Forest& f, std::unique_ptr<TreeNode> a,
                               std::unique_ptr<TreeNode> b, const LikelihoodModel& model,
                               const CrmPrior& prior, double u) {
  if (!a || !b || a.get() == b.get()) throw std::logic_error("join: invalid operands");
  auto node = std::make_unique<TreeNode>();
  node->id = f.fresh_id();
  if (b->id < a->id) std::swap(a, b);
  a->parent = node.get();
  b->parent = node.get();
  node->left = std::move(a);
  node->right = std::move(b);
  recompute_internal(*node, model, prior, u);
  return node;
}

double log_dissimilarity(const TreeNode& a, const TreeNode& b, const LikelihoodModel& model,
                         const CrmPrior& prior, double u) {
  if (&a == &b) throw std::logic_error("log_dissimilarity: overlapping clusters");
  SuffStats merged = model.merged_stats(a.stats, b.stats);
  const double log_phi_h =
      crm::log_kappa(prior, a.size + b.size, u) + model.log_marginal(merged);
  return a.log_phi + b.log_phi - log_phi_h;
}

// ---------------------------------------------------------------------------
// SeqInsert
// ---------------------------------------------------------------------------

SeqInsertOutcome seq_insert(Forest& f, std::unique_ptr<TreeNode> host,
                            std::unique_ptr<TreeNode> s, const LikelihoodModel& model,
                            const CrmPrior& prior, double u, bool allow_split) {
  SeqInsertOutcome out;
  out.inserted = s.get();

  // descend by the three-case rule; ties prefer case 1, then case 2
  std::unique_ptr<TreeNode>* slot = &host;
  while (true) {
    TreeNode* cur = slot->get();
    if (cur->is_leaf()) break;  // only case 1 applies
    const double d1 = cur->log_d;
    const double d2 = log_dissimilarity(*cur->left, *s, model, prior, u);
    const double d3 = log_dissimilarity(*cur->right, *s, model, prior, u);
    if (d1 <= d2 && d1 <= d3) break;  // case 1: s becomes sibling of cur
    if (d2 <= d3)
      slot = &cur->left;   // case 2
    else
      slot = &cur->right;  // case 3
  }

  TreeNode* attach_parent = slot->get()->parent;
  std::unique_ptr<TreeNode> displaced = std::move(*slot);
  displaced->parent = nullptr;
  std::unique_ptr<TreeNode> joint = join(f, std::move(displaced), std::move(s), model, prior, u);
  out.joint = joint.get();
  joint->parent = attach_parent;
  *slot = std::move(joint);
  recompute_path(attach_parent, model, prior, u);

  if (!allow_split) {
    out.host = std::move(host);
    return out;
  }

  // collect the updated path bottom-up and cut at the lowest d > 1
  std::vector<TreeNode*> path;
  for (TreeNode* p = out.joint; p; p = p->parent) path.push_back(p);
  std::size_t cut = path.size();
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path[k]->log_d > 0.0) {
      cut = k;
      break;
    }
  }
  if (cut == path.size()) {
    out.host = std::move(host);
    return out;
  }

  // children of the cut node first, then the off-path subtrees of every
  // dissolved ancestor, bottom-up
  TreeNode* vc = path[cut];
  vc->left->parent = nullptr;
  vc->right->parent = nullptr;
  out.pieces.push_back(std::move(vc->left));
  out.pieces.push_back(std::move(vc->right));
  for (std::size_t k = cut + 1; k < path.size(); ++k) {
    TreeNode* vk = path[k];
    auto& other = (vk->left.get() == path[k - 1]) ? vk->right : vk->left;
    other->parent = nullptr;
    out.pieces.push_back(std::move(other));
  }
  // host now owns only the dissolved spine; dropping it frees those nodes
  out.joint = nullptr;
  return out;
}

std::unique_ptr<TreeNode> undo_seq_insert(std::unique_ptr<TreeNode>& host_slot,
                                          TreeNode* joint, TreeNode* inserted,
                                          const LikelihoodModel& model,
                                          const CrmPrior& prior, double u) {
  TreeNode* parent = joint->parent;
  std::unique_ptr<TreeNode>* slot = &host_slot;
  if (parent)
    slot = (parent->left.get() == joint) ? &parent->left : &parent->right;
  if (slot->get() != joint) throw std::logic_error("undo_seq_insert: joint not in place");

  std::unique_ptr<TreeNode> owned = std::move(*slot);
  std::unique_ptr<TreeNode> a = std::move(owned->left);
  std::unique_ptr<TreeNode> b = std::move(owned->right);
  std::unique_ptr<TreeNode> ins, displaced;
  if (a.get() == inserted) {
    ins = std::move(a);
    displaced = std::move(b);
  } else {
    ins = std::move(b);
    displaced = std::move(a);
  }
  displaced->parent = parent;
  *slot = std::move(displaced);
  owned.reset();
  recompute_path(parent, model, prior, u);
  ins->parent = nullptr;
  return ins;
}

std::unique_ptr<TreeNode> detach_leaf(Forest& f, std::int64_t i, const LikelihoodModel& model,
                                      const CrmPrior& prior, double u) {
  TreeNode* leaf = f.leaf(i);
  if (!leaf) throw std::logic_error("detach_leaf: unknown index");
  TreeNode* parent = leaf->parent;
  if (!parent) return f.take_root(f.index_of_root(leaf));

  TreeNode* grand = parent->parent;
  std::unique_ptr<TreeNode>* parent_slot = nullptr;
  std::size_t root_idx = 0;
  if (grand) {
    parent_slot = (grand->left.get() == parent) ? &grand->left : &grand->right;
  } else {
    root_idx = f.index_of_root(parent);
  }

  std::unique_ptr<TreeNode> parent_owned =
      parent_slot ? std::move(*parent_slot) : f.take_root(root_idx);
  std::unique_ptr<TreeNode> lf, sibling;
  if (parent_owned->left.get() == leaf) {
    lf = std::move(parent_owned->left);
    sibling = std::move(parent_owned->right);
  } else {
    lf = std::move(parent_owned->right);
    sibling = std::move(parent_owned->left);
  }
  parent_owned.reset();
  sibling->parent = grand;
  if (parent_slot) {
    *parent_slot = std::move(sibling);
    recompute_path(grand, model, prior, u);
  } else {
    f.insert_root(root_idx, std::move(sibling));  // sibling keeps the parent's slot
  }
  lf->parent = nullptr;
  return lf;
}

// ---------------------------------------------------------------------------
// SampleSub
// ---------------------------------------------------------------------------

namespace {
void collect_preorder(TreeNode& node, bool nonleaf_only, std::vector<TreeNode*>& out) {
  if (!nonleaf_only || !node.is_leaf()) out.push_back(&node);
  if (!node.is_leaf()) {
    collect_preorder(*node.left, nonleaf_only, out);
    collect_preorder(*node.right, nonleaf_only, out);
  }
}

// weights proportional to d + eps, eps = max eligible d (1 if that max is 0)
std::vector<double> subtree_log_weights(const std::vector<TreeNode*>& nodes) {
  double log_eps = kNegInf;
  for (const TreeNode* t : nodes) log_eps = std::max(log_eps, t->log_d);
  if (log_eps == kNegInf) log_eps = 0.0;
  std::vector<double> log_w(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k)
    log_w[k] = logaddexp(nodes[k]->log_d, log_eps);
  return log_w;
}
}  // namespace

std::vector<TreeNode*> enumerate_subtrees(TreeNode& root, bool nonleaf_only) {
  std::vector<TreeNode*> nodes;
  collect_preorder(root, nonleaf_only, nodes);
  return nodes;
}

std::vector<const TreeNode*> enumerate_subtrees(const TreeNode& root, bool nonleaf_only) {
  auto nodes = enumerate_subtrees(const_cast<TreeNode&>(root), nonleaf_only);
  return {nodes.begin(), nodes.end()};
}

SubtreeDraw sample_sub(TreeNode& root, Rng& rng, bool nonleaf_only) {
  std::vector<TreeNode*> nodes = enumerate_subtrees(root, nonleaf_only);
  if (nodes.empty()) throw std::logic_error("sample_sub: no eligible subtree");
  const std::vector<double> log_w = subtree_log_weights(nodes);
  double log_prob = 0.0;
  const std::size_t pick = rng.categorical_log(log_w, &log_prob);
  return SubtreeDraw{nodes[pick], log_prob};
}

double sample_sub_prob(const TreeNode& root, const TreeNode& target, bool nonleaf_only) {
  {
    const TreeNode* p = &target;
    while (p && p != &root) p = p->parent;
    if (p != &root) throw std::logic_error("sample_sub_prob: target not inside tree");
  }
  std::vector<TreeNode*> nodes =
      enumerate_subtrees(const_cast<TreeNode&>(root), nonleaf_only);
  const std::vector<double> log_w = subtree_log_weights(nodes);
  const double log_z = logsumexp(log_w);
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (nodes[k] == &target) return log_w[k] - log_z;
  throw std::logic_error("sample_sub_prob: target not eligible");
}

// ---------------------------------------------------------------------------
// StocInsert
// ---------------------------------------------------------------------------

std::vector<double> stoc_insert_log_probs(std::span<const TreeNode* const> S,
                                          const TreeNode& c, const LikelihoodModel& model,
                                          const CrmPrior& prior, double u) {
  std::vector<double> log_w(S.size() + 1);
  for (std::size_t k = 0; k < S.size(); ++k) {
    const double log_d = std::max(log_dissimilarity(*S[k], c, model, prior, u), kLogDFloor);
    log_w[k] = -log_d;
  }
  log_w[S.size()] = 0.0;  // new cluster
  const double log_z = logsumexp(log_w);
  for (double& w : log_w) w -= log_z;
  return log_w;
}

StocInsertOutcome stoc_insert(Forest& f, std::vector<std::unique_ptr<TreeNode>>& S,
                              std::unique_ptr<TreeNode> c, Rng& rng,
                              const LikelihoodModel& model, const CrmPrior& prior, double u) {
  StocInsertOutcome out;
  out.inserted = c.get();
  std::vector<const TreeNode*> view;
  view.reserve(S.size());
  for (const auto& t : S) view.push_back(t.get());
  const std::vector<double> log_p = stoc_insert_log_probs(view, *c, model, prior, u);
  const std::size_t pick = rng.categorical_log(log_p, &out.log_prob);
  if (pick == S.size()) {
    out.dest = kNewCluster;
    c->parent = nullptr;
    S.push_back(std::move(c));
    return out;
  }
  out.dest = pick;
  SeqInsertOutcome ins = seq_insert(f, std::move(S[pick]), std::move(c), model, prior, u,
                                    /*allow_split=*/false);
  S[pick] = std::move(ins.host);
  out.joint = ins.joint;
  return out;
}

double stoc_insert_prob(std::span<const TreeNode* const> S, const TreeNode& c,
                        std::size_t dest, const LikelihoodModel& model,
                        const CrmPrior& prior, double u) {
  if (dest != kNewCluster && dest >= S.size())
    throw std::logic_error("stoc_insert_prob: invalid destination");
  const std::vector<double> log_p = stoc_insert_log_probs(S, c, model, prior, u);
  return dest == kNewCluster ? log_p[S.size()] : log_p[dest];
}

// ---------------------------------------------------------------------------
// audits
// ---------------------------------------------------------------------------

namespace {
void collect_leaves_rec(const TreeNode& node, std::vector<std::int64_t>& out) {
  if (node.is_leaf()) {
    out.push_back(node.leaf_index);
    return;
  }
  collect_leaves_rec(*node.left, out);
  collect_leaves_rec(*node.right, out);
}

void audit_node(const TreeNode& node, const LikelihoodModel& model, const CrmPrior& prior,
                double u, double tol) {
  if (node.is_leaf()) {
    if (node.right || node.size != 1 || node.leaf_index < 0)
      throw std::logic_error("audit: malformed leaf");
    const double phi_h = crm::log_kappa(prior, 1, u) + node.log_ml;
    if (std::abs(phi_h - node.log_phi_h) > tol || std::abs(node.log_phi - node.log_phi_h) > tol)
      throw std::logic_error("audit: stale leaf potential");
    return;
  }
  if (!node.right || node.left->parent != &node || node.right->parent != &node)
    throw std::logic_error("audit: malformed internal node");
  audit_node(*node.left, model, prior, u, tol);
  audit_node(*node.right, model, prior, u, tol);
  if (node.size != node.left->size + node.right->size)
    throw std::logic_error("audit: size mismatch");
  SuffStats merged = model.merged_stats(node.left->stats, node.right->stats);
  const double log_ml = model.log_marginal(merged);
  if (std::abs(log_ml - node.log_ml) > tol) throw std::logic_error("audit: stale log_ml");
  const double phi_h = crm::log_kappa(prior, node.size, u) + log_ml;
  const double split_phi = node.left->log_phi + node.right->log_phi;
  if (std::abs(phi_h - node.log_phi_h) > tol)
    throw std::logic_error("audit: stale log_phi_h");
  if (std::abs(logaddexp(phi_h, split_phi) - node.log_phi) > tol)
    throw std::logic_error("audit: stale log_phi");
  if (std::abs((split_phi - phi_h) - node.log_d) > tol)
    throw std::logic_error("audit: stale log_d");
  if (node.log_phi < node.log_phi_h - tol)
    throw std::logic_error("audit: phi below phi_h");
}
}  // namespace

std::vector<std::int64_t> collect_leaf_indices(const TreeNode& root) {
  std::vector<std::int64_t> out;
  collect_leaves_rec(root, out);
  std::sort(out.begin(), out.end());
  return out;
}

void audit_tree(const TreeNode& root, const LikelihoodModel& model, const CrmPrior& prior,
                double u, double tol) {
  audit_node(root, model, prior, u, tol);
}

void audit_forest(const Forest& f, const LikelihoodModel& model, const CrmPrior& prior,
                  double u, double tol) {
  std::vector<bool> seen(static_cast<std::size_t>(f.num_points()), false);
  std::int64_t covered = 0;
  for (std::size_t k = 0; k < f.num_roots(); ++k) {
    const TreeNode* r = f.root(k);
    if (r->parent) throw std::logic_error("audit: root with parent");
    audit_node(*r, model, prior, u, tol);
    for (std::int64_t i : collect_leaf_indices(*r)) {
      if (seen[static_cast<std::size_t>(i)])
        throw std::logic_error("audit: leaf sets overlap");
      seen[static_cast<std::size_t>(i)] = true;
      if (f.leaf(i) == nullptr) throw std::logic_error("audit: unregistered leaf");
      ++covered;
    }
  }
  if (covered != f.num_assigned())
    throw std::logic_error("audit: assignment map inconsistent with leaf membership");
}

namespace {
bool nodes_identical(const TreeNode& a, const TreeNode& b, double tol) {
  if (a.id != b.id || a.size != b.size || a.leaf_index != b.leaf_index) return false;
  if (a.is_leaf() != b.is_leaf()) return false;
  if (std::abs(a.log_ml - b.log_ml) > tol || std::abs(a.log_phi_h - b.log_phi_h) > tol ||
      std::abs(a.log_phi - b.log_phi) > tol)
    return false;
  if (a.log_d != b.log_d && std::abs(a.log_d - b.log_d) > tol) return false;
  if (a.is_leaf()) return true;
  return nodes_identical(*a.left, *b.left, tol) && nodes_identical(*a.right, *b.right, tol);
}
}  // namespace

bool forests_identical(const Forest& a, const Forest& b, double tol) {
  if (a.num_roots() != b.num_roots() || a.num_points() != b.num_points()) return false;
  for (std::size_t k = 0; k < a.num_roots(); ++k)
    if (!nodes_identical(*a.root(k), *b.root(k), tol)) return false;
  return true;
}

}  // namespace tgmcmc
