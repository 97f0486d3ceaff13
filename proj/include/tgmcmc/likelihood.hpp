#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "tgmcmc/data.hpp"

namespace tgmcmc {

// Incremental sufficient statistics of one cluster. The Gaussian model uses
// (count, sum, outer); the multinomial model uses (count, word_counts,
// token_total). Counts are integers so add/remove round-trips restore them
// exactly; real accumulators round-trip within 1e-9.
struct SuffStats {
  std::int64_t count = 0;
  Eigen::VectorXd sum;
  Eigen::MatrixXd outer;
  std::vector<std::int64_t> word_counts;
  std::int64_t token_total = 0;
};

// Conjugate likelihood with closed-form log marginal P(dX_c) and log
// predictive P(dx|X_c). Owns no data; points are referenced by index into the
// dataset bound at construction. Read-only after construction, so one model
// may serve any number of concurrent chains.
class LikelihoodModel {
 public:
  virtual ~LikelihoodModel() = default;

  virtual std::int64_t num_points() const = 0;
  virtual SuffStats empty_stats() const = 0;
  virtual void add(SuffStats& s, std::int64_t i) const = 0;
  virtual void remove(SuffStats& s, std::int64_t i) const = 0;
  // union of stats over disjoint index sets
  virtual void merge_into(SuffStats& s, const SuffStats& other) const = 0;

  virtual double log_marginal(const SuffStats& s) const = 0;
  // closed form, equal to log_marginal(add(s,i)) - log_marginal(s)
  virtual double log_predictive(const SuffStats& s, std::int64_t i) const = 0;

  SuffStats singleton_stats(std::int64_t i) const {
    SuffStats s = empty_stats();
    add(s, i);
    return s;
  }
  SuffStats merged_stats(const SuffStats& a, const SuffStats& b) const {
    SuffStats s = a;
    merge_into(s, b);
    return s;
  }
};

struct GaussianWishartParams {
  Eigen::VectorXd m;      // prior mean
  double r = 0.1;         // mean-precision scale
  double nu = 0.0;        // degrees of freedom, > d - 1
  Eigen::MatrixXd psi;    // scale matrix, SPD
};

// Gaussian likelihood with Gaussian-Wishart base measure
// H(dmu, dLambda) = N(mu | m, (r Lambda)^-1) W(Lambda | Psi^-1, nu).
class GaussianWishartModel final : public LikelihoodModel {
 public:
  GaussianWishartModel(std::shared_ptr<const Dataset> data, GaussianWishartParams params);

  // r=0.1, nu=d+6, m = sample mean, Psi = Sigma/(10 det Sigma)^{1/d};
  // falls back to Psi = I * 10^{-1/d} when the sample covariance is singular.
  static GaussianWishartParams default_params(const Dataset& data);

  std::int64_t num_points() const override { return data_->points.rows(); }
  SuffStats empty_stats() const override;
  void add(SuffStats& s, std::int64_t i) const override;
  void remove(SuffStats& s, std::int64_t i) const override;
  void merge_into(SuffStats& s, const SuffStats& other) const override;
  double log_marginal(const SuffStats& s) const override;
  double log_predictive(const SuffStats& s, std::int64_t i) const override;

  const GaussianWishartParams& params() const { return params_; }

 private:
  struct Posterior {
    double kappa, nu;
    Eigen::VectorXd mean;
    Eigen::LLT<Eigen::MatrixXd> chol;  // of Psi_n
    double logdet;
  };
  Posterior posterior(const SuffStats& s) const;
  double lmvgamma_shift(std::int64_t n_c) const;  // lgamma_d((nu + n_c)/2)

  std::shared_ptr<const Dataset> data_;
  GaussianWishartParams params_;
  std::int64_t dim_;
  double log_det_psi_;
  double lmvgamma_prior_;
  std::vector<double> lgamma_table_;  // lgamma((nu + t)/2), t = 1-d .. n_max+1
  std::int64_t table_offset_ = 0;
};

// Multinomial likelihood over documents with symmetric Dirichlet(gamma) base
// measure on the word simplex.
class DirichletMultinomialModel final : public LikelihoodModel {
 public:
  DirichletMultinomialModel(std::shared_ptr<const Dataset> data, double gamma);

  std::int64_t num_points() const override {
    return static_cast<std::int64_t>(data_->docs.size());
  }
  SuffStats empty_stats() const override;
  void add(SuffStats& s, std::int64_t i) const override;
  void remove(SuffStats& s, std::int64_t i) const override;
  void merge_into(SuffStats& s, const SuffStats& other) const override;
  double log_marginal(const SuffStats& s) const override;
  double log_predictive(const SuffStats& s, std::int64_t i) const override;

  double gamma() const { return gamma_; }
  std::int32_t vocab_size() const { return vocab_; }

 private:
  double lgamma_gamma_plus(std::int64_t t) const;

  std::shared_ptr<const Dataset> data_;
  double gamma_;
  std::int32_t vocab_;
  double lgamma_gamma_;
  double lgamma_vgamma_;
  std::vector<double> lgamma_table_;  // lgamma(gamma + t), t = 0 .. max word total
};

}  // namespace tgmcmc
