#include "tgmcmc/likelihood.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace tgmcmc {

namespace {
constexpr double kLogPi = 1.1447298858494001741;

double lmvgamma(std::int64_t d, double a) {
  double v = 0.25 * static_cast<double>(d * (d - 1)) * kLogPi;
  for (std::int64_t j = 1; j <= d; ++j)
    v += std::lgamma(a + 0.5 * static_cast<double>(1 - j));
  return v;
}
}  // namespace

// ---------------------------------------------------------------------------
// Gaussian-Wishart
// ---------------------------------------------------------------------------

GaussianWishartModel::GaussianWishartModel(std::shared_ptr<const Dataset> data,
                                           GaussianWishartParams params)
    : data_(std::move(data)), params_(std::move(params)) {
  if (data_->sparse())
    throw std::invalid_argument("GaussianWishartModel requires dense points");
  dim_ = data_->points.cols();
  if (!(params_.r > 0.0))
    throw std::invalid_argument("GaussianWishartModel: r must be positive");
  if (!(params_.nu > static_cast<double>(dim_ - 1)))
    throw std::invalid_argument("GaussianWishartModel: nu must exceed d - 1");
  if (params_.m.size() != dim_ || params_.psi.rows() != dim_ || params_.psi.cols() != dim_)
    throw std::invalid_argument("GaussianWishartModel: hyperparameter dimensions mismatch");

  Eigen::LLT<Eigen::MatrixXd> llt(params_.psi);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("GaussianWishartModel: Psi is not positive definite");
  log_det_psi_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  lmvgamma_prior_ = lmvgamma(dim_, 0.5 * params_.nu);

  // lgamma((nu + t)/2) lookup for the multivariate gamma; arguments are
  // (nu + n_c + 1 - j)/2 with j in 1..d, n_c in 0..n.
  const std::int64_t n_max = data_->points.rows();
  table_offset_ = 1 - dim_;
  lgamma_table_.resize(static_cast<std::size_t>(n_max + 1 + dim_));
  for (std::int64_t t = table_offset_; t <= n_max + 1; ++t)
    lgamma_table_[static_cast<std::size_t>(t - table_offset_)] =
        std::lgamma(0.5 * (params_.nu + static_cast<double>(t)));
}

GaussianWishartParams GaussianWishartModel::default_params(const Dataset& data) {
  const std::int64_t n = data.points.rows();
  const std::int64_t d = data.points.cols();
  GaussianWishartParams p;
  p.r = 0.1;
  p.nu = static_cast<double>(d) + 6.0;
  p.m = data.points.colwise().mean();
  Eigen::MatrixXd centered = data.points.rowwise() - p.m.transpose();
  Eigen::MatrixXd sigma = centered.transpose() * centered
                          / std::max<std::int64_t>(n - 1, 1);
  // a rank-deficient covariance (duplicated data, n <= d) can sneak a tiny
  // positive determinant past a naive test; check the spectrum instead
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  const double ev_min = eig.eigenvalues().minCoeff();
  const double ev_max = eig.eigenvalues().maxCoeff();
  if (ev_min > 1e-10 * ev_max && ev_max > 0.0 && sigma.allFinite()) {
    p.psi = sigma / std::pow(10.0 * sigma.determinant(), 1.0 / static_cast<double>(d));
  } else {
    std::cerr << "warning: singular sample covariance, using identity scale matrix\n";
    p.psi = Eigen::MatrixXd::Identity(d, d) * std::pow(10.0, -1.0 / static_cast<double>(d));
  }
  return p;
}

SuffStats GaussianWishartModel::empty_stats() const {
  SuffStats s;
  s.sum = Eigen::VectorXd::Zero(dim_);
  s.outer = Eigen::MatrixXd::Zero(dim_, dim_);
  return s;
}

void GaussianWishartModel::add(SuffStats& s, std::int64_t i) const {
  const auto x = data_->points.row(i).transpose();
  s.count += 1;
  s.sum += x;
  s.outer += x * x.transpose();
}

void GaussianWishartModel::remove(SuffStats& s, std::int64_t i) const {
  if (s.count <= 0) throw std::logic_error("SuffStats: remove from empty stats");
  const auto x = data_->points.row(i).transpose();
  s.count -= 1;
  s.sum -= x;
  s.outer -= x * x.transpose();
}

void GaussianWishartModel::merge_into(SuffStats& s, const SuffStats& other) const {
  s.count += other.count;
  s.sum += other.sum;
  s.outer += other.outer;
}

double GaussianWishartModel::lmvgamma_shift(std::int64_t n_c) const {
  double v = 0.25 * static_cast<double>(dim_ * (dim_ - 1)) * kLogPi;
  for (std::int64_t j = 1; j <= dim_; ++j)
    v += lgamma_table_[static_cast<std::size_t>(n_c + 1 - j - table_offset_)];
  return v;
}

GaussianWishartModel::Posterior GaussianWishartModel::posterior(const SuffStats& s) const {
  Posterior post;
  post.kappa = params_.r + static_cast<double>(s.count);
  post.nu = params_.nu + static_cast<double>(s.count);
  post.mean = (params_.r * params_.m + s.sum) / post.kappa;
  Eigen::MatrixXd psi_n = params_.psi + s.outer
                          + params_.r * params_.m * params_.m.transpose()
                          - post.kappa * post.mean * post.mean.transpose();
  post.chol.compute(psi_n);
  if (post.chol.info() != Eigen::Success)
    throw std::runtime_error("GaussianWishartModel: posterior scale not positive definite");
  post.logdet = 2.0 * post.chol.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return post;
}

double GaussianWishartModel::log_marginal(const SuffStats& s) const {
  if (s.count == 0) return 0.0;
  const Posterior post = posterior(s);
  const double n = static_cast<double>(s.count);
  const double d = static_cast<double>(dim_);
  return -0.5 * n * d * kLogPi
         + lmvgamma_shift(s.count) - lmvgamma_prior_
         + 0.5 * params_.nu * log_det_psi_ - 0.5 * post.nu * post.logdet
         + 0.5 * d * (std::log(params_.r) - std::log(post.kappa));
}

double GaussianWishartModel::log_predictive(const SuffStats& s, std::int64_t i) const {
  // multivariate Student-t predictive of the Gaussian-Wishart posterior
  const Posterior post = posterior(s);
  const double d = static_cast<double>(dim_);
  const double dof = post.nu - d + 1.0;
  const double scale = (post.kappa + 1.0) / (post.kappa * dof);
  const Eigen::VectorXd z = data_->points.row(i).transpose() - post.mean;
  const Eigen::VectorXd w = post.chol.matrixL().solve(z);  // L w = z
  const double quad = w.squaredNorm() / scale;
  const double logdet_scale = post.logdet + d * std::log(scale);
  return std::lgamma(0.5 * (dof + d)) - std::lgamma(0.5 * dof)
         - 0.5 * d * (std::log(dof) + kLogPi) - 0.5 * logdet_scale
         - 0.5 * (dof + d) * std::log1p(quad / dof);
}

// ---------------------------------------------------------------------------
// Dirichlet-multinomial
// ---------------------------------------------------------------------------

DirichletMultinomialModel::DirichletMultinomialModel(std::shared_ptr<const Dataset> data,
                                                     double gamma)
    : data_(std::move(data)), gamma_(gamma) {
  if (!data_->sparse())
    throw std::invalid_argument("DirichletMultinomialModel requires documents");
  if (!(gamma_ > 0.0))
    throw std::invalid_argument("DirichletMultinomialModel: gamma must be positive");
  vocab_ = data_->vocab_size;
  if (vocab_ < 1)
    throw std::invalid_argument("DirichletMultinomialModel: vocabulary must be nonempty");
  lgamma_gamma_ = std::lgamma(gamma_);
  lgamma_vgamma_ = std::lgamma(gamma_ * static_cast<double>(vocab_));

  std::vector<std::int64_t> word_totals(static_cast<std::size_t>(vocab_), 0);
  for (const auto& doc : data_->docs)
    for (const auto& e : doc) word_totals[static_cast<std::size_t>(e.word)] += e.count;
  std::int64_t max_total = 0;
  for (std::int64_t t : word_totals) max_total = std::max(max_total, t);
  lgamma_table_.resize(static_cast<std::size_t>(max_total + 1));
  for (std::int64_t t = 0; t <= max_total; ++t)
    lgamma_table_[static_cast<std::size_t>(t)] = std::lgamma(gamma_ + static_cast<double>(t));
}

double DirichletMultinomialModel::lgamma_gamma_plus(std::int64_t t) const {
  if (t >= 0 && static_cast<std::size_t>(t) < lgamma_table_.size())
    return lgamma_table_[static_cast<std::size_t>(t)];
  return std::lgamma(gamma_ + static_cast<double>(t));
}

SuffStats DirichletMultinomialModel::empty_stats() const {
  SuffStats s;
  s.word_counts.assign(static_cast<std::size_t>(vocab_), 0);
  return s;
}

void DirichletMultinomialModel::add(SuffStats& s, std::int64_t i) const {
  s.count += 1;
  for (const auto& e : data_->docs[static_cast<std::size_t>(i)]) {
    s.word_counts[static_cast<std::size_t>(e.word)] += e.count;
    s.token_total += e.count;
  }
}

void DirichletMultinomialModel::remove(SuffStats& s, std::int64_t i) const {
  if (s.count <= 0) throw std::logic_error("SuffStats: remove from empty stats");
  s.count -= 1;
  for (const auto& e : data_->docs[static_cast<std::size_t>(i)]) {
    s.word_counts[static_cast<std::size_t>(e.word)] -= e.count;
    s.token_total -= e.count;
  }
}

void DirichletMultinomialModel::merge_into(SuffStats& s, const SuffStats& other) const {
  s.count += other.count;
  s.token_total += other.token_total;
  for (std::size_t v = 0; v < s.word_counts.size(); ++v)
    s.word_counts[v] += other.word_counts[v];
}

double DirichletMultinomialModel::log_marginal(const SuffStats& s) const {
  if (s.count == 0) return 0.0;
  double lp = lgamma_vgamma_
              - std::lgamma(gamma_ * static_cast<double>(vocab_)
                            + static_cast<double>(s.token_total));
  for (std::int64_t t : s.word_counts)
    if (t != 0) lp += lgamma_gamma_plus(t) - lgamma_gamma_;
  return lp;
}

double DirichletMultinomialModel::log_predictive(const SuffStats& s, std::int64_t i) const {
  const double vg = gamma_ * static_cast<double>(vocab_);
  const auto& doc = data_->docs[static_cast<std::size_t>(i)];
  std::int64_t doc_total = 0;
  double lp = 0.0;
  for (const auto& e : doc) {
    const std::int64_t t = s.word_counts[static_cast<std::size_t>(e.word)];
    lp += lgamma_gamma_plus(t + e.count) - lgamma_gamma_plus(t);
    doc_total += e.count;
  }
  lp += std::lgamma(vg + static_cast<double>(s.token_total))
        - std::lgamma(vg + static_cast<double>(s.token_total + doc_total));
  return lp;
}

}  // namespace tgmcmc
