#include "tgmcmc/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "tgmcmc/logmath.hpp"

namespace tgmcmc {

std::string partition_key(const std::vector<std::int32_t>& assignment) {
  // relabel blocks in order of first appearance
  std::vector<std::int32_t> relabel(assignment.size(), -1);
  std::string key(assignment.size(), '\0');
  std::int32_t next = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const std::int32_t block = assignment[i];
    if (block < 0) throw std::logic_error("partition_key: unassigned point");
    if (relabel[static_cast<std::size_t>(block)] < 0)
      relabel[static_cast<std::size_t>(block)] = next++;
    key[i] = static_cast<char>(relabel[static_cast<std::size_t>(block)]);
  }
  return key;
}

void enumerate_partitions(std::int64_t n,
                          const std::function<void(const std::vector<std::int32_t>&)>& visit) {
  if (n < 1 || n > 12)
    throw std::domain_error("enumerate_partitions: n must lie in [1, 12]");
  const std::size_t sz = static_cast<std::size_t>(n);
  // rgs[0] = 0 and rgs[i] <= max(rgs[0..i-1]) + 1; maxv[i] = max(rgs[0..i-1])
  std::vector<std::int32_t> rgs(sz, 0);
  std::vector<std::int32_t> maxv(sz, 0);
  while (true) {
    visit(rgs);
    std::size_t i = 0;
    for (std::size_t k = sz; k-- > 1;) {
      if (rgs[k] < maxv[k] + 1) {
        i = k;
        break;
      }
    }
    if (i == 0) return;
    rgs[i] += 1;
    for (std::size_t j = i + 1; j < sz; ++j) {
      maxv[j] = std::max(maxv[j - 1], rgs[j - 1]);
      rgs[j] = 0;
    }
  }
}

std::int64_t bell_number(std::int64_t n) {
  // Bell triangle
  std::vector<std::vector<std::int64_t>> tri{{1}};
  for (std::int64_t r = 1; r <= n; ++r) {
    std::vector<std::int64_t> row{tri.back().back()};
    for (std::size_t k = 0; k < tri.back().size(); ++k)
      row.push_back(row.back() + tri.back()[k]);
    tri.push_back(std::move(row));
  }
  return tri[static_cast<std::size_t>(n)][0];
}

ExactPosterior exact_posterior(const LikelihoodModel& model, const CrmPrior& prior,
                               double u, std::int64_t n) {
  if (n < 1 || n > 10) throw std::domain_error("exact_posterior: n must lie in [1, 10]");
  if (n > model.num_points())
    throw std::invalid_argument("exact_posterior: dataset smaller than n");

  // log marginal of every nonempty subset of [n]
  const std::size_t n_subsets = static_cast<std::size_t>(1) << n;
  std::vector<double> subset_log_ml(n_subsets, 0.0);
  std::vector<std::int32_t> subset_size(n_subsets, 0);
  for (std::size_t mask = 1; mask < n_subsets; ++mask) {
    SuffStats s = model.empty_stats();
    std::int32_t size = 0;
    for (std::int64_t i = 0; i < n; ++i)
      if (mask & (static_cast<std::size_t>(1) << i)) {
        model.add(s, i);
        ++size;
      }
    subset_log_ml[mask] = model.log_marginal(s);
    subset_size[mask] = size;
  }
  std::vector<double> log_kappa_m(static_cast<std::size_t>(n + 1), 0.0);
  for (std::int64_t m = 1; m <= n; ++m)
    log_kappa_m[static_cast<std::size_t>(m)] = crm::log_kappa(prior, m, u);

  ExactPosterior out;
  std::vector<std::string> keys;
  std::vector<double> log_terms;
  enumerate_partitions(n, [&](const std::vector<std::int32_t>& rgs) {
    std::int32_t blocks = 0;
    for (std::int32_t b : rgs) blocks = std::max(blocks, b + 1);
    double lt = 0.0;
    for (std::int32_t b = 0; b < blocks; ++b) {
      std::size_t mask = 0;
      for (std::int64_t i = 0; i < n; ++i)
        if (rgs[static_cast<std::size_t>(i)] == b) mask |= static_cast<std::size_t>(1) << i;
      lt += log_kappa_m[static_cast<std::size_t>(subset_size[mask])] + subset_log_ml[mask];
    }
    keys.push_back(partition_key(rgs));
    log_terms.push_back(lt);
  });

  out.log_normalizer = logsumexp(log_terms);
  out.log_u_terms = static_cast<double>(n - 1) * std::log(u) - crm::psi(prior, u)
                    - std::lgamma(static_cast<double>(n));
  for (std::size_t k = 0; k < keys.size(); ++k)
    out.probs[keys[k]] = std::exp(log_terms[k] - out.log_normalizer);
  return out;
}

LowerBoundCheck check_lower_bound(const Forest& f, const LikelihoodModel& model,
                                  const CrmPrior& prior, double u) {
  const std::int64_t n = f.num_assigned();
  ExactPosterior post = exact_posterior(model, prior, u, n);
  double bound = 0.0;
  for (std::size_t k = 0; k < f.num_roots(); ++k) bound += f.root(k)->log_phi;
  LowerBoundCheck out;
  out.gap = post.log_normalizer - bound;
  out.holds = out.gap >= -1e-9;
  return out;
}

}  // namespace tgmcmc
