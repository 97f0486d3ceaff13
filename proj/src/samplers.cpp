#include "tgmcmc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tgmcmc/logmath.hpp"

namespace tgmcmc {

namespace {

double u_terms(const ChainState& state) {
  const double n = static_cast<double>(state.forest.num_assigned());
  return (n - 1.0) * std::log(state.u) - crm::psi(state.prior, state.u) - std::lgamma(n);
}

void tally(MoveCounters& c, bool accepted, double log_r) {
  c.proposals += 1;
  if (accepted) c.accepts += 1;
  if (std::isfinite(log_r)) {
    c.sum_log_r += log_r;
    c.finite_log_r += 1;
  }
}

// Eq-11 sum: probability that a global move from the current roots merges
// exactly `s_roots` (pick any member, Bernoulli-select the rest of the set).
double merge_back_log_prob_impl(const Forest& f, const std::vector<TreeNode*>& s_roots,
                                const LikelihoodModel& model, const CrmPrior& prior,
                                double u) {
  const double log_k = std::log(static_cast<double>(f.num_roots()));
  std::vector<double> terms;
  terms.reserve(s_roots.size());
  for (TreeNode* cp : s_roots) {
    double t = -log_k;
    for (std::size_t k = 0; k < f.num_roots(); ++k) {
      const TreeNode* other = f.root(k);
      if (other == cp) continue;
      const double log_d = log_dissimilarity(*cp, *other, model, prior, u);
      const bool in_s = std::find(s_roots.begin(), s_roots.end(), other) != s_roots.end();
      t += in_s ? -log1pexp(log_d) : log_d - log1pexp(log_d);
    }
    terms.push_back(t);
  }
  return logsumexp(terms);
}

// Eq-12 path: pick the cascade root, keep M empty, SampleSub the cascade
// bottom, then put every remaining original cluster back as a new cluster.
double split_back_log_prob_impl(const Forest& f, const TreeNode* cascade_root,
                                const TreeNode* cascade_bottom,
                                const std::vector<const TreeNode*>& originals,
                                const LikelihoodModel& model, const CrmPrior& prior,
                                double u) {
  double lp = -std::log(static_cast<double>(f.num_roots()));
  for (std::size_t k = 0; k < f.num_roots(); ++k) {
    const TreeNode* other = f.root(k);
    if (other == cascade_root) continue;
    const double log_d = log_dissimilarity(*cascade_root, *other, model, prior, u);
    lp += log_d - log1pexp(log_d);
  }
  lp += sample_sub_prob(*cascade_root, *cascade_bottom, /*nonleaf_only=*/true);
  for (std::size_t i = 2; i < originals.size(); ++i) {
    std::span<const TreeNode* const> s_view(originals.data(), i);
    lp += stoc_insert_prob(s_view, *originals[i], kNewCluster, model, prior, u);
  }
  return lp;
}

TreeNode* find_by_id(TreeNode* node, std::uint64_t id) {
  if (node->id == id) return node;
  if (node->is_leaf()) return nullptr;
  if (TreeNode* hit = find_by_id(node->left.get(), id)) return hit;
  return find_by_id(node->right.get(), id);
}

}  // namespace

double joint_log_prob(const ChainState& state) {
  double lp = u_terms(state);
  for (std::size_t k = 0; k < state.forest.num_roots(); ++k)
    lp += state.forest.root(k)->log_phi_h;  // log kappa(|c|,u) + log P(dX_c)
  return lp;
}

double merge_move_log_prob(const ChainState& state,
                           const std::vector<std::uint64_t>& member_ids) {
  std::vector<TreeNode*> roots;
  for (std::uint64_t id : member_ids) {
    bool found = false;
    for (std::size_t k = 0; k < state.forest.num_roots(); ++k) {
      TreeNode* r = const_cast<TreeNode*>(state.forest.root(k));
      if (r->id == id) {
        roots.push_back(r);
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("merge_move_log_prob: id is not a root");
  }
  return merge_back_log_prob_impl(state.forest, roots, *state.model, state.prior, state.u);
}

double split_back_log_prob(const ChainState& state, std::uint64_t cascade_root_id,
                           std::uint64_t cascade_bottom_id,
                           const std::vector<std::uint64_t>& merged_ids) {
  TreeNode* cascade = nullptr;
  for (std::size_t k = 0; k < state.forest.num_roots(); ++k) {
    TreeNode* r = const_cast<TreeNode*>(state.forest.root(k));
    if (r->id == cascade_root_id) {
      cascade = r;
      break;
    }
  }
  if (!cascade) throw std::logic_error("split_back_log_prob: cascade root not found");
  TreeNode* bottom = find_by_id(cascade, cascade_bottom_id);
  if (!bottom) throw std::logic_error("split_back_log_prob: cascade bottom not found");
  std::vector<const TreeNode*> originals;
  for (std::uint64_t id : merged_ids) {
    const TreeNode* node = find_by_id(cascade, id);
    if (!node) throw std::logic_error("split_back_log_prob: merged subtree not found");
    originals.push_back(node);
  }
  return split_back_log_prob_impl(state.forest, cascade, bottom, originals, *state.model,
                                  state.prior, state.u);
}

// ---------------------------------------------------------------------------
// global move
// ---------------------------------------------------------------------------

GlobalMoveRecord global_move(ChainState& state, bool force_reject) {
  Forest& f = state.forest;
  const LikelihoodModel& model = *state.model;
  const CrmPrior& prior = state.prior;
  const double u = state.u;
  if (f.num_assigned() < 2) throw std::logic_error("global_move: needs n >= 2");

  GlobalMoveRecord rec;
  rec.joint_before = joint_log_prob(state);
  const std::vector<TreeNode*> pre_order = f.root_order();
  const std::size_t n_roots = f.num_roots();

  // (a) pick a tree uniformly
  const std::size_t pick = static_cast<std::size_t>(
      state.rng.uniform_int(static_cast<std::int64_t>(n_roots)));
  rec.picked_root = pick;
  double log_q_fwd = -std::log(static_cast<double>(n_roots));
  TreeNode* c_raw = f.root(pick);

  // (b) Bernoulli inclusion of every other root, probability 1/(1+d)
  std::vector<std::size_t> merge_set;
  rec.include_mask.reserve(n_roots - 1);
  for (std::size_t k = 0; k < n_roots; ++k) {
    if (k == pick) continue;
    const double log_d = log_dissimilarity(*c_raw, *f.root(k), model, prior, u);
    const double lp_in = -log1pexp(log_d);
    const bool in = state.rng.bernoulli_log(lp_in);
    log_q_fwd += in ? lp_in : log_d - log1pexp(log_d);
    rec.include_mask.push_back(in ? 1 : 0);
    if (in) merge_set.push_back(k);
  }

  if (merge_set.empty() && c_raw->is_leaf()) {
    // spec'd dead end: a single-leaf cluster cannot be split
    rec.kind = MoveKind::Noop;
    rec.joint_after = rec.joint_before;
    tally(state.move_stats.split, false, kNegInf);
    return rec;
  }

  if (merge_set.empty()) {
    // -------------------------- split --------------------------------------
    rec.kind = MoveKind::Split;
    std::unique_ptr<TreeNode> c = f.take_root(pick);
    SubtreeDraw draw = sample_sub(*c, state.rng, /*nonleaf_only=*/true);
    log_q_fwd += draw.log_prob;
    TreeNode* cstar = draw.node;
    rec.cstar_id = cstar->id;

    // S starts as the children of c*; ancestors dissolve, their off-path
    // subtrees queue up for reinsertion (bottom-up)
    std::vector<std::unique_ptr<TreeNode>> s_owned;
    cstar->left->parent = nullptr;
    cstar->right->parent = nullptr;
    s_owned.push_back(std::move(cstar->left));
    s_owned.push_back(std::move(cstar->right));

    struct QSlot {
      TreeNode* spine = nullptr;
      bool off_is_left = false;
      TreeNode* piece = nullptr;
    };
    std::vector<QSlot> qslots;
    std::vector<std::unique_ptr<TreeNode>> queue;
    {
      TreeNode* prev = cstar;
      for (TreeNode* a = cstar->parent; a; prev = a, a = a->parent) {
        auto& off = (a->left.get() == prev) ? a->right : a->left;
        qslots.push_back(QSlot{a, a->left.get() != prev, off.get()});
        off->parent = nullptr;
        queue.push_back(std::move(off));
      }
    }

    struct InsertAction {
      bool new_root = false;
      std::size_t dest = 0;
      TreeNode* joint = nullptr;
      TreeNode* inserted = nullptr;
    };
    std::vector<InsertAction> actions;
    for (auto& q : queue) {
      StocInsertOutcome out =
          stoc_insert(f, s_owned, std::move(q), state.rng, model, prior, u);
      log_q_fwd += out.log_prob;
      rec.stoc_dests.push_back(out.dest);
      InsertAction act;
      act.new_root = out.dest == kNewCluster;
      act.dest = act.new_root ? s_owned.size() - 1 : out.dest;
      act.joint = out.joint;
      act.inserted = out.inserted;
      actions.push_back(act);
    }

    // commit S to the root list (append in S order)
    std::vector<TreeNode*> s_ptrs;
    s_ptrs.reserve(s_owned.size());
    for (auto& s : s_owned) {
      s_ptrs.push_back(s.get());
      rec.s_root_ids.push_back(s->id);
      rec.proposal_sizes.push_back(s->size);
      f.add_root(std::move(s));
    }
    s_owned.clear();

    rec.log_q_fwd = log_q_fwd;
    rec.log_q_rev = merge_back_log_prob_impl(f, s_ptrs, model, prior, u);
    rec.joint_after = joint_log_prob(state);
    rec.log_r = rec.joint_after - rec.joint_before + rec.log_q_rev - rec.log_q_fwd;
    const bool accept = state.rng.bernoulli_log(rec.log_r) && !force_reject;
    rec.accepted = accept;
    tally(state.move_stats.split, accept, rec.log_r);
    if (accept) return rec;  // dropping `c` frees the dissolved spine

    // rollback: pull S out, unwind the insertions, reassemble the old tree
    for (TreeNode* sp : s_ptrs) s_owned.push_back(f.take_root(f.index_of_root(sp)));
    std::vector<std::unique_ptr<TreeNode>> recovered;
    for (auto it = actions.rbegin(); it != actions.rend(); ++it) {
      if (it->new_root) {
        recovered.push_back(std::move(s_owned[it->dest]));
        s_owned.pop_back();
      } else {
        recovered.push_back(undo_seq_insert(s_owned[it->dest], it->joint, it->inserted,
                                            model, prior, u));
      }
    }
    cstar->left = std::move(s_owned[0]);
    cstar->left->parent = cstar;
    cstar->right = std::move(s_owned[1]);
    cstar->right->parent = cstar;
    for (const QSlot& slot : qslots) {
      std::unique_ptr<TreeNode> piece;
      for (auto& r : recovered) {
        if (r.get() == slot.piece) {
          piece = std::move(r);
          break;
        }
      }
      if (!piece) throw std::logic_error("global_move: lost a severed subtree");
      piece->parent = slot.spine;
      (slot.off_is_left ? slot.spine->left : slot.spine->right) = std::move(piece);
    }
    std::vector<std::unique_ptr<TreeNode>> loose;
    loose.push_back(std::move(c));
    f.restore_root_order(pre_order, std::move(loose));
    return rec;
  }

  // ---------------------------- merge ---------------------------------------
  rec.kind = MoveKind::Merge;
  std::vector<TreeNode*> members;
  members.reserve(merge_set.size());
  for (std::size_t k : merge_set) members.push_back(f.root(k));
  std::sort(members.begin(), members.end(),
            [](const TreeNode* a, const TreeNode* b) { return a->id < b->id; });

  rec.merged_ids.push_back(c_raw->id);
  rec.proposal_sizes.push_back(c_raw->size);
  for (TreeNode* m : members) {
    rec.merged_ids.push_back(m->id);
    rec.proposal_sizes.push_back(m->size);
  }

  std::unique_ptr<TreeNode> cur = f.take_root(f.index_of_root(c_raw));
  TreeNode* bottom = nullptr;
  for (TreeNode* m : members) {
    std::unique_ptr<TreeNode> mem = f.take_root(f.index_of_root(m));
    cur = join(f, std::move(cur), std::move(mem), model, prior, u);
    if (!bottom) bottom = cur.get();
  }
  TreeNode* cascade_root = cur.get();
  rec.cascade_root_id = cascade_root->id;
  rec.cascade_bottom_id = bottom->id;
  f.add_root(std::move(cur));

  std::vector<const TreeNode*> originals;
  originals.push_back(c_raw);
  for (TreeNode* m : members) originals.push_back(m);

  rec.log_q_fwd = log_q_fwd;
  rec.log_q_rev =
      split_back_log_prob_impl(f, cascade_root, bottom, originals, model, prior, u);
  rec.joint_after = joint_log_prob(state);
  rec.log_r = rec.joint_after - rec.joint_before + rec.log_q_rev - rec.log_q_fwd;
  const bool accept = state.rng.bernoulli_log(rec.log_r) && !force_reject;
  rec.accepted = accept;
  tally(state.move_stats.merge, accept, rec.log_r);
  if (accept) return rec;

  // rollback: dismantle the cascade, recover the original roots
  std::unique_ptr<TreeNode> top = f.take_root(f.index_of_root(cascade_root));
  std::vector<std::unique_ptr<TreeNode>> recovered;
  // the cascade spine consists solely of the joins created above
  while (top) {
    const bool left_is_original =
        std::find(originals.begin(), originals.end(), top->left.get()) != originals.end();
    const bool right_is_original =
        std::find(originals.begin(), originals.end(), top->right.get()) != originals.end();
    std::unique_ptr<TreeNode> next;
    top->left->parent = nullptr;
    top->right->parent = nullptr;
    if (left_is_original && right_is_original) {
      recovered.push_back(std::move(top->left));
      recovered.push_back(std::move(top->right));
    } else if (left_is_original) {
      recovered.push_back(std::move(top->left));
      next = std::move(top->right);
    } else {
      recovered.push_back(std::move(top->right));
      next = std::move(top->left);
    }
    top = std::move(next);
  }
  f.restore_root_order(pre_order, std::move(recovered));
  return rec;
}

// ---------------------------------------------------------------------------
// local moves
// ---------------------------------------------------------------------------

void local_move_sweep(ChainState& state, int D) {
  if (D < 1) throw std::logic_error("local_move_sweep: D must be >= 1");
  Forest& f = state.forest;
  const LikelihoodModel& model = *state.model;
  const CrmPrior& prior = state.prior;
  const double u = state.u;

  // nested SampleSub per root selects the points to resample
  std::vector<std::int64_t> sweep;
  for (std::size_t k = 0; k < f.num_roots(); ++k) {
    TreeNode* t = f.root(k);
    for (int rep = 0; rep < D; ++rep) t = sample_sub(*t, state.rng, false).node;
    for (std::int64_t i : collect_leaf_indices(*t)) sweep.push_back(i);
  }
  std::sort(sweep.begin(), sweep.end());

  const double log_new_base = crm::log_kappa(prior, 1, u);
  std::vector<double> log_w;
  for (std::int64_t i : sweep) {
    std::unique_ptr<TreeNode> leaf = detach_leaf(f, i, model, prior, u);
    const std::size_t n_roots = f.num_roots();
    log_w.assign(n_roots + 1, 0.0);
    for (std::size_t k = 0; k < n_roots; ++k) {
      const TreeNode* r = f.root(k);
      log_w[k] = crm::log_kappa_ratio(prior, r->size, u) + model.log_predictive(r->stats, i);
    }
    log_w[n_roots] = log_new_base + leaf->log_ml;
    const std::size_t dest = state.rng.categorical_log(log_w);
    if (dest == n_roots) {
      f.add_root(std::move(leaf));
    } else {
      std::unique_ptr<TreeNode> host = f.take_root(dest);
      SeqInsertOutcome out = seq_insert(f, std::move(host), std::move(leaf), model, prior,
                                        u, /*allow_split=*/false);
      f.insert_root(dest, std::move(out.host));
    }
  }
}

// ---------------------------------------------------------------------------
// auxiliary variable
// ---------------------------------------------------------------------------

int resample_u(ChainState& state, int inner_steps, double step_scale) {
  if (inner_steps < 1) throw std::logic_error("resample_u: inner_steps must be >= 1");
  const std::vector<std::int64_t> sizes = state.forest.root_sizes();
  const double n = static_cast<double>(state.forest.num_assigned());
  const auto log_target = [&](double v) {
    const double uu = std::exp(v);
    double lt = n * v - crm::psi(state.prior, uu);
    for (std::int64_t s : sizes) lt += crm::log_kappa(state.prior, s, uu);
    return lt;
  };

  double v = std::log(state.u);
  double lt = log_target(v);
  int accepted = 0;
  for (int step = 0; step < inner_steps; ++step) {
    const double vp = v + step_scale * state.rng.normal();
    const double ltp = log_target(vp);
    const bool acc = state.rng.bernoulli_log(ltp - lt);
    tally(state.move_stats.u_walk, acc, ltp - lt);
    if (acc) {
      v = vp;
      lt = ltp;
      ++accepted;
    }
  }
  state.u = std::exp(v);
  for (std::size_t k = 0; k < state.forest.num_roots(); ++k)
    refresh_potentials(*state.forest.root(k), state.prior, state.u);
  return accepted;
}

// ---------------------------------------------------------------------------
// cycling
// ---------------------------------------------------------------------------

std::vector<GlobalMoveRecord> tgmcmc_iteration(ChainState& state, const TgmcmcOptions& opt) {
  std::vector<GlobalMoveRecord> records;
  records.reserve(static_cast<std::size_t>(opt.G));
  for (int g = 0; g < opt.G; ++g) records.push_back(global_move(state));
  local_move_sweep(state, opt.D);
  if (opt.u_steps > 0) resample_u(state, opt.u_steps);
  return records;
}

// ---------------------------------------------------------------------------
// flat-partition baselines
// ---------------------------------------------------------------------------

namespace {

struct FlatCluster {
  SuffStats stats;
  double log_ml = 0.0;
  std::vector<std::int64_t> members;  // ascending
};

struct FlatPartition {
  std::vector<FlatCluster> clusters;
  std::vector<std::int32_t> member_of;
};

FlatPartition make_flat(const ChainState& state) {
  FlatPartition flat;
  flat.member_of.assign(static_cast<std::size_t>(state.forest.num_points()), -1);
  for (std::size_t k = 0; k < state.forest.num_roots(); ++k) {
    const TreeNode* r = state.forest.root(k);
    FlatCluster cl;
    cl.stats = r->stats;
    cl.log_ml = r->log_ml;
    cl.members = collect_leaf_indices(*r);
    for (std::int64_t i : cl.members)
      flat.member_of[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(k);
    flat.clusters.push_back(std::move(cl));
  }
  return flat;
}

void extract_leaves(std::unique_ptr<TreeNode> node,
                    std::vector<std::unique_ptr<TreeNode>>& pool) {
  if (node->is_leaf()) {
    node->parent = nullptr;
    pool[static_cast<std::size_t>(node->leaf_index)] = std::move(node);
    return;
  }
  extract_leaves(std::move(node->left), pool);
  extract_leaves(std::move(node->right), pool);
}

// The baselines keep clusters as flat records during a sweep and materialize
// them as left-deep trees joined in index order afterwards.
void rebuild_forest_from_flat(ChainState& state, const FlatPartition& flat) {
  Forest& f = state.forest;
  std::vector<std::unique_ptr<TreeNode>> pool(static_cast<std::size_t>(f.num_points()));
  while (f.num_roots() > 0) extract_leaves(f.take_root(0), pool);
  for (const FlatCluster& cl : flat.clusters) {
    std::unique_ptr<TreeNode> cur = std::move(pool[static_cast<std::size_t>(cl.members[0])]);
    for (std::size_t m = 1; m < cl.members.size(); ++m)
      cur = join(f, std::move(cur), std::move(pool[static_cast<std::size_t>(cl.members[m])]),
                 *state.model, state.prior, state.u);
    f.add_root(std::move(cur));
  }
}

void flat_remove_point(FlatPartition& flat, const LikelihoodModel& model, std::int64_t i) {
  const std::int32_t ci = flat.member_of[static_cast<std::size_t>(i)];
  FlatCluster& cl = flat.clusters[static_cast<std::size_t>(ci)];
  model.remove(cl.stats, i);
  cl.members.erase(std::lower_bound(cl.members.begin(), cl.members.end(), i));
  flat.member_of[static_cast<std::size_t>(i)] = -1;
  if (cl.members.empty()) {
    flat.clusters.erase(flat.clusters.begin() + ci);
    for (auto& m : flat.member_of)
      if (m > ci) --m;
  } else {
    cl.log_ml = model.log_marginal(cl.stats);
  }
}

void flat_add_point(FlatPartition& flat, const LikelihoodModel& model, std::int64_t i,
                    std::size_t dest) {
  if (dest == flat.clusters.size()) {
    FlatCluster cl;
    cl.stats = model.singleton_stats(i);
    cl.log_ml = model.log_marginal(cl.stats);
    cl.members = {i};
    flat.clusters.push_back(std::move(cl));
  } else {
    FlatCluster& cl = flat.clusters[dest];
    model.add(cl.stats, i);
    cl.log_ml = model.log_marginal(cl.stats);
    cl.members.insert(std::lower_bound(cl.members.begin(), cl.members.end(), i), i);
  }
  flat.member_of[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(dest);
}

}  // namespace

std::vector<std::int64_t> sample_subset(Rng& rng, std::int64_t n, double fraction) {
  if (fraction >= 1.0) return identity_order(n);
  if (!(fraction > 0.0)) throw std::domain_error("sample_subset: fraction must be positive");
  const std::int64_t m =
      std::clamp<std::int64_t>(static_cast<std::int64_t>(std::llround(fraction * static_cast<double>(n))), 1, n);
  std::vector<std::int64_t> pool = identity_order(n);
  for (std::int64_t t = 0; t < m; ++t) {
    const std::int64_t j = t + rng.uniform_int(n - t);
    std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(m));
  std::sort(pool.begin(), pool.end());
  return pool;
}

namespace {

// one per-point Gibbs pass over the flat partition; fraction < 1 restricts
// the sweep to a uniform random subset
void flat_gibbs_sweep(ChainState& state, FlatPartition& flat, double fraction) {
  const LikelihoodModel& model = *state.model;
  const CrmPrior& prior = state.prior;
  const double u = state.u;
  const std::vector<std::int64_t> sweep =
      sample_subset(state.rng, state.forest.num_points(), fraction);

  const SuffStats empty = model.empty_stats();
  const double log_new_base = crm::log_kappa(prior, 1, u);
  std::vector<double> log_w;
  for (std::int64_t i : sweep) {
    flat_remove_point(flat, model, i);
    const std::size_t n_cl = flat.clusters.size();
    log_w.assign(n_cl + 1, 0.0);
    for (std::size_t k = 0; k < n_cl; ++k) {
      const FlatCluster& cl = flat.clusters[k];
      log_w[k] = crm::log_kappa_ratio(prior, cl.stats.count, u)
                 + model.log_predictive(cl.stats, i);
    }
    log_w[n_cl] = log_new_base + model.log_predictive(empty, i);
    flat_add_point(flat, model, i, state.rng.categorical_log(log_w));
  }
}

}  // namespace

void marginal_gibbs_iteration(ChainState& state, const GibbsOptions& opt) {
  FlatPartition flat = make_flat(state);
  flat_gibbs_sweep(state, flat, opt.subset_fraction);
  rebuild_forest_from_flat(state, flat);
  if (opt.u_steps > 0) resample_u(state, opt.u_steps);
}

SmOutcome split_merge_iteration(ChainState& state, const SplitMergeOptions& opt) {
  const LikelihoodModel& model = *state.model;
  const CrmPrior& prior = state.prior;
  const double u = state.u;
  const std::int64_t n = state.forest.num_points();
  if (n < 2) throw std::logic_error("split_merge_iteration: needs n >= 2");

  FlatPartition flat = make_flat(state);
  const std::int64_t i = state.rng.uniform_int(n);
  std::int64_t j = state.rng.uniform_int(n - 1);
  if (j >= i) ++j;
  const std::int32_t ci = flat.member_of[static_cast<std::size_t>(i)];
  const std::int32_t cj = flat.member_of[static_cast<std::size_t>(j)];

  // movable points: the union of both clusters minus the anchors
  std::vector<std::int64_t> movable;
  for (std::int64_t k : flat.clusters[static_cast<std::size_t>(ci)].members)
    if (k != i && k != j) movable.push_back(k);
  if (cj != ci)
    for (std::int64_t k : flat.clusters[static_cast<std::size_t>(cj)].members)
      if (k != i && k != j) movable.push_back(k);
  std::sort(movable.begin(), movable.end());

  // launch state: anchors pinned, the rest assigned uniformly
  SuffStats stats_a = model.singleton_stats(i);
  SuffStats stats_b = model.singleton_stats(j);
  std::vector<std::int8_t> side(static_cast<std::size_t>(n), -1);
  side[static_cast<std::size_t>(i)] = 0;
  side[static_cast<std::size_t>(j)] = 1;
  for (std::int64_t k : movable) {
    const bool to_a = state.rng.uniform() < 0.5;
    side[static_cast<std::size_t>(k)] = to_a ? 0 : 1;
    model.add(to_a ? stats_a : stats_b, k);
  }

  // one restricted-Gibbs pass over `points`; sampling pass draws the side,
  // forced pass scores (and applies) the recorded original side
  const auto restricted_pass = [&](const std::vector<std::int64_t>& points, bool sampling,
                                   double* log_prob_acc) {
    for (std::int64_t k : points) {
      SuffStats& cur = side[static_cast<std::size_t>(k)] == 0 ? stats_a : stats_b;
      model.remove(cur, k);
      const double lw_a = crm::log_kappa_ratio(prior, stats_a.count, u)
                          + model.log_predictive(stats_a, k);
      const double lw_b = crm::log_kappa_ratio(prior, stats_b.count, u)
                          + model.log_predictive(stats_b, k);
      const double log_z = logaddexp(lw_a, lw_b);
      bool to_a;
      if (sampling) {
        to_a = state.rng.bernoulli_log(lw_a - log_z);
      } else {
        to_a = flat.member_of[static_cast<std::size_t>(k)] == ci;
      }
      if (log_prob_acc) *log_prob_acc += (to_a ? lw_a : lw_b) - log_z;
      side[static_cast<std::size_t>(k)] = to_a ? 0 : 1;
      model.add(to_a ? stats_a : stats_b, k);
    }
  };

  for (int t = 0; t < opt.t_restricted; ++t) restricted_pass(movable, true, nullptr);

  SmOutcome out;
  const auto cluster_term = [&](std::int64_t size, double log_ml) {
    return crm::log_kappa(prior, size, u) + log_ml;
  };

  if (ci == cj) {
    // split proposal: the final full pass moves the points and yields q_fwd
    out.kind = MoveKind::Split;
    double log_q_fwd = 0.0;
    restricted_pass(movable, true, &log_q_fwd);
    const double log_ml_a = model.log_marginal(stats_a);
    const double log_ml_b = model.log_marginal(stats_b);
    const FlatCluster& old_cl = flat.clusters[static_cast<std::size_t>(ci)];
    const double delta = cluster_term(stats_a.count, log_ml_a)
                         + cluster_term(stats_b.count, log_ml_b)
                         - cluster_term(old_cl.stats.count, old_cl.log_ml);
    out.log_r = delta - log_q_fwd;  // reverse merge proposes with probability 1
    out.proposal_sizes = {stats_a.count, stats_b.count};
    out.accepted = state.rng.bernoulli_log(out.log_r);
    if (out.accepted) {
      FlatCluster a, b;
      a.stats = std::move(stats_a);
      a.log_ml = log_ml_a;
      b.stats = std::move(stats_b);
      b.log_ml = log_ml_b;
      for (std::int64_t k : old_cl.members)
        (side[static_cast<std::size_t>(k)] == 0 ? a : b).members.push_back(k);
      const std::size_t b_index = flat.clusters.size();
      for (std::int64_t k : b.members)
        flat.member_of[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(b_index);
      flat.clusters[static_cast<std::size_t>(ci)] = std::move(a);
      flat.clusters.push_back(std::move(b));
    }
  } else {
    // merge proposal: score the forced pass that recreates the original split
    out.kind = MoveKind::Merge;
    double log_q_rev = 0.0;
    restricted_pass(movable, false, &log_q_rev);
    FlatCluster& cl_i = flat.clusters[static_cast<std::size_t>(ci)];
    FlatCluster& cl_j = flat.clusters[static_cast<std::size_t>(cj)];
    SuffStats merged = model.merged_stats(cl_i.stats, cl_j.stats);
    const double log_ml_merged = model.log_marginal(merged);
    const double delta = cluster_term(merged.count, log_ml_merged)
                         - cluster_term(cl_i.stats.count, cl_i.log_ml)
                         - cluster_term(cl_j.stats.count, cl_j.log_ml);
    out.log_r = delta + log_q_rev;  // forward merge proposes with probability 1
    out.proposal_sizes = {cl_i.stats.count, cl_j.stats.count};
    out.accepted = state.rng.bernoulli_log(out.log_r);
    if (out.accepted) {
      std::vector<std::int64_t> members;
      members.reserve(cl_i.members.size() + cl_j.members.size());
      std::merge(cl_i.members.begin(), cl_i.members.end(), cl_j.members.begin(),
                 cl_j.members.end(), std::back_inserter(members));
      cl_i.stats = std::move(merged);
      cl_i.log_ml = log_ml_merged;
      cl_i.members = std::move(members);
      flat.clusters.erase(flat.clusters.begin() + cj);
      for (auto& m : flat.member_of) {
        if (m == cj) m = ci > cj ? ci - 1 : ci;
        else if (m > cj) --m;
      }
    }
  }

  tally(state.move_stats.sm, out.accepted, out.log_r);
  // one Gibbs sweep per iteration, as in the usual split-merge practice; the
  // _sub variant restricts it to a subset while the move itself stays exact
  flat_gibbs_sweep(state, flat, opt.subset_fraction);
  rebuild_forest_from_flat(state, flat);
  if (opt.u_steps > 0) resample_u(state, opt.u_steps);
  return out;
}

}  // namespace tgmcmc
