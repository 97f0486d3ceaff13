#pragma once

#include <cstdint>
#include <vector>

namespace tgmcmc {

enum class CrmKind { DirichletProcess, GeneralizedGamma };

// Random-measure prior with Levy intensity rho(dw) = alpha*sigma/Gamma(1-sigma)
// * w^{-sigma-1} e^{-w} dw; sigma = 0 is the Dirichlet process limit
// rho(dw) = alpha * w^{-1} e^{-w} dw. All derived quantities are evaluated in
// log space; kappa underflows long before |c| reaches realistic cluster sizes.
struct CrmPrior {
  CrmKind kind = CrmKind::DirichletProcess;
  double alpha = 1.0;
  double sigma = 0.0;

  static CrmPrior dirichlet(double alpha);
  static CrmPrior generalized_gamma(double alpha, double sigma);
};

namespace crm {

// log of the Levy density at w > 0
double log_levy_density(const CrmPrior& prior, double w);

// psi(u) = int (1 - e^{-uw}) rho(dw); DP: alpha*log(1+u), GG: alpha*((1+u)^sigma - 1)
double psi(const CrmPrior& prior, double u);

// log kappa(m, u) = log int w^m e^{-uw} rho(dw), m >= 1
double log_kappa(const CrmPrior& prior, std::int64_t m, double u);

// log[kappa(m+1,u)/kappa(m,u)] in closed form (no lgamma cancellation):
// DP: log m - log(1+u); GG: log(m - sigma) - log(1+u)
double log_kappa_ratio(const CrmPrior& prior, std::int64_t m, double u);

// log of the Eq-4 partition factor:
// (n-1)log u - psi(u) - lgamma(n) + sum_c log kappa(|c|, u)
double log_partition_prior(const CrmPrior& prior, double u,
                           const std::vector<std::int64_t>& sizes, std::int64_t n);

}  // namespace crm
}  // namespace tgmcmc
