#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tgmcmc {

// Parsed experiment configuration. The on-disk format is one `key = value`
// pair per line, '#' comments; unknown keys are rejected outright.
struct ExperimentConfig {
  // dataset
  std::string dataset_kind = "gaussian_mixture";  // gaussian_mixture|py_gaussian|csv|uci_bow
  std::int64_t k = 13;
  std::int64_t n = 1300;
  std::int64_t d = 2;
  double separation = 8.0;
  std::uint64_t data_seed = 0;
  double theta = 3.0;     // py_gaussian
  double discount = 0.8;  // py_gaussian
  std::string dataset_path;

  // model
  std::string model_kind = "gaussian_wishart";  // gaussian_wishart|dirichlet_multinomial
  double gamma = 0.1;

  // prior
  std::string prior_kind = "dp";  // dp|nggp
  double alpha = 1.0;
  double sigma = 0.5;

  // kernels and options
  std::vector<std::string> kernels{"tgmcmc"};  // tgmcmc|gibbs|sm|gibbs_sub|sm_sub
  int G = 20;
  int D = 2;
  int t_restricted = 5;
  double gibbs_sub_fraction = 0.1;
  double sm_sub_fraction = 0.1;
  double u_init = 1.0;
  int u_steps = 5;
  std::string init = "flat";  // flat|ibhc
  int ibhc_restarts = 1;

  // run control
  double budget_seconds = 0.0;        // exactly one of the two budgets
  std::int64_t budget_iterations = 0;
  int repeats = 1;
  std::uint64_t base_seed = 0;
  std::string output_dir = "out";
  int workers = 1;
};

// Throws std::runtime_error with a line-tagged message on any violation.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

}  // namespace tgmcmc
