#pragma once

#include <memory>
#include <vector>

#include "tgmcmc/data.hpp"
#include "tgmcmc/likelihood.hpp"
#include "tgmcmc/rng.hpp"

namespace fixtures {

inline std::shared_ptr<tgmcmc::Dataset> dense(const std::vector<std::vector<double>>& rows) {
  auto data = std::make_shared<tgmcmc::Dataset>();
  data->points.resize(static_cast<std::int64_t>(rows.size()),
                      static_cast<std::int64_t>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      data->points(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)) = rows[r][c];
  return data;
}

inline std::shared_ptr<tgmcmc::Dataset> docs(
    std::int32_t vocab, const std::vector<std::vector<std::pair<int, int>>>& entries) {
  auto data = std::make_shared<tgmcmc::Dataset>();
  data->vocab_size = vocab;
  for (const auto& doc : entries) {
    std::vector<tgmcmc::DocEntry> d;
    for (const auto& [w, c] : doc)
      d.push_back(tgmcmc::DocEntry{static_cast<std::int32_t>(w), static_cast<std::int32_t>(c)});
    data->docs.push_back(std::move(d));
  }
  return data;
}

// n points around two far-apart centers (even indices near 0, odd near `gap`)
inline std::shared_ptr<tgmcmc::Dataset> two_blobs(std::int64_t n, double gap,
                                                  std::uint64_t seed, std::int64_t dim = 2,
                                                  double sigma = 0.3) {
  tgmcmc::Rng rng(seed);
  std::vector<std::vector<double>> rows;
  for (std::int64_t i = 0; i < n; ++i) {
    std::vector<double> row(static_cast<std::size_t>(dim));
    for (auto& x : row) x = sigma * rng.normal();
    if (i % 2 == 1) row[0] += gap;
    rows.push_back(std::move(row));
  }
  return dense(rows);
}

// n points round-robin over four tight blobs at the corners of a `gap`-sided
// square; the sample covariance is near-isotropic, which keeps the default
// det-normalized prior scale compatible with the blob width
inline std::shared_ptr<tgmcmc::Dataset> four_blobs(std::int64_t n, double gap,
                                                   std::uint64_t seed, double sigma = 0.2) {
  tgmcmc::Rng rng(seed);
  const double cx[4] = {0.0, gap, 0.0, gap};
  const double cy[4] = {0.0, 0.0, gap, gap};
  std::vector<std::vector<double>> rows;
  for (std::int64_t i = 0; i < n; ++i) {
    const int b = static_cast<int>(i % 4);
    rows.push_back({cx[b] + sigma * rng.normal(), cy[b] + sigma * rng.normal()});
  }
  return dense(rows);
}

inline tgmcmc::GaussianWishartParams unit_params(std::int64_t d) {
  tgmcmc::GaussianWishartParams p;
  p.m = Eigen::VectorXd::Zero(d);
  p.r = 1.0;
  p.nu = static_cast<double>(d) + 2.0;
  p.psi = Eigen::MatrixXd::Identity(d, d);
  return p;
}

// Likelihood with P(dX_c) = 1 for every cluster: potentials reduce to pure
// kappa terms, which makes dissimilarities exactly computable by hand.
class UnitLikelihood final : public tgmcmc::LikelihoodModel {
 public:
  explicit UnitLikelihood(std::int64_t n) : n_(n) {}
  std::int64_t num_points() const override { return n_; }
  tgmcmc::SuffStats empty_stats() const override { return {}; }
  void add(tgmcmc::SuffStats& s, std::int64_t) const override { s.count += 1; }
  void remove(tgmcmc::SuffStats& s, std::int64_t) const override {
    if (s.count <= 0) throw std::logic_error("remove from empty");
    s.count -= 1;
  }
  void merge_into(tgmcmc::SuffStats& s, const tgmcmc::SuffStats& o) const override {
    s.count += o.count;
  }
  double log_marginal(const tgmcmc::SuffStats&) const override { return 0.0; }
  double log_predictive(const tgmcmc::SuffStats&, std::int64_t) const override { return 0.0; }

 private:
  std::int64_t n_;
};

}  // namespace fixtures
