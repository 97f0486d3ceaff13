#include "tgmcmc/crm.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tgmcmc {

CrmPrior CrmPrior::dirichlet(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("CrmPrior: alpha must be positive");
  return CrmPrior{CrmKind::DirichletProcess, alpha, 0.0};
}

CrmPrior CrmPrior::generalized_gamma(double alpha, double sigma) {
  if (!(alpha > 0.0)) throw std::domain_error("CrmPrior: alpha must be positive");
  if (!(sigma >= 0.0 && sigma < 1.0))
    throw std::domain_error("CrmPrior: sigma must lie in [0, 1)");
  return CrmPrior{CrmKind::GeneralizedGamma, alpha, sigma};
}

namespace crm {

double log_levy_density(const CrmPrior& prior, double w) {
  if (!(w > 0.0)) throw std::domain_error("log_levy_density: w must be positive");
  if (prior.kind == CrmKind::DirichletProcess || prior.sigma == 0.0)
    return std::log(prior.alpha) - std::log(w) - w;
  return std::log(prior.alpha) + std::log(prior.sigma) - std::lgamma(1.0 - prior.sigma)
         - (prior.sigma + 1.0) * std::log(w) - w;
}

double psi(const CrmPrior& prior, double u) {
  if (!(u >= 0.0)) throw std::domain_error("psi: u must be nonnegative");
  if (prior.kind == CrmKind::DirichletProcess || prior.sigma == 0.0)
    return prior.alpha * std::log1p(u);
  return prior.alpha * std::expm1(prior.sigma * std::log1p(u));
}

double log_kappa(const CrmPrior& prior, std::int64_t m, double u) {
  if (m < 1) throw std::domain_error("log_kappa: m must be >= 1");
  if (!(u >= 0.0)) throw std::domain_error("log_kappa: u must be nonnegative");
  const double md = static_cast<double>(m);
  if (prior.kind == CrmKind::DirichletProcess || prior.sigma == 0.0)
    return std::log(prior.alpha) + std::lgamma(md) - md * std::log1p(u);
  return std::log(prior.alpha) + std::log(prior.sigma) + std::lgamma(md - prior.sigma)
         - std::lgamma(1.0 - prior.sigma) + (prior.sigma - md) * std::log1p(u);
}

double log_kappa_ratio(const CrmPrior& prior, std::int64_t m, double u) {
  if (m < 1) throw std::domain_error("log_kappa_ratio: m must be >= 1");
  if (!(u >= 0.0)) throw std::domain_error("log_kappa_ratio: u must be nonnegative");
  const double md = static_cast<double>(m);
  if (prior.kind == CrmKind::DirichletProcess || prior.sigma == 0.0)
    return std::log(md) - std::log1p(u);
  return std::log(md - prior.sigma) - std::log1p(u);
}

double log_partition_prior(const CrmPrior& prior, double u,
                           const std::vector<std::int64_t>& sizes, std::int64_t n) {
  if (!(u > 0.0)) throw std::domain_error("log_partition_prior: u must be positive");
  std::int64_t total = std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0});
  if (total != n || n < 1)
    throw std::invalid_argument("log_partition_prior: cluster sizes must sum to n");
  double lp = static_cast<double>(n - 1) * std::log(u) - psi(prior, u)
              - std::lgamma(static_cast<double>(n));
  for (std::int64_t s : sizes) lp += log_kappa(prior, s, u);
  return lp;
}

}  // namespace crm
}  // namespace tgmcmc
