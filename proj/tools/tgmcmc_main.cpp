// Command-line front end: dataset generation, experiment runs, trace
// summaries, and the exact-enumeration oracle for desk-scale debugging.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tgmcmc/config.hpp"
#include "tgmcmc/data.hpp"
#include "tgmcmc/diagnostics.hpp"
#include "tgmcmc/oracle.hpp"
#include "tgmcmc/runner.hpp"

namespace {

int cmd_generate(const std::string& kind, std::int64_t k, std::int64_t n, std::int64_t d,
                 double separation, double theta, double discount, std::uint64_t seed,
                 const std::string& out, const std::string& labels_out) {
  tgmcmc::LabeledDataset ds;
  if (kind == "gaussian_mixture") {
    ds = tgmcmc::gen_gaussian_mixture(k, n, d, separation, seed);
  } else if (kind == "py_gaussian") {
    ds = tgmcmc::gen_py_gaussian_mixture(n, d, theta, discount, separation, seed);
  } else if (kind == "py_labels") {
    const auto labels = tgmcmc::gen_py_labels(n, theta, discount, seed);
    tgmcmc::write_csv_labels(labels, labels_out.empty() ? out : labels_out);
    std::cout << "wrote " << labels.size() << " labels\n";
    return 0;
  } else {
    std::cerr << "unknown generator kind: " << kind << "\n";
    return 1;
  }
  tgmcmc::write_csv_points(ds.data, out);
  if (!labels_out.empty()) tgmcmc::write_csv_labels(ds.labels, labels_out);
  std::cout << "wrote " << ds.data.size() << " points (d=" << ds.data.points.cols()
            << ") to " << out << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, std::uint64_t seed, const std::string& output) {
  tgmcmc::ExperimentConfig cfg;
  try {
    cfg = tgmcmc::parse_config_file(config_path);
    cfg.base_seed = seed;
    if (!output.empty()) cfg.output_dir = output;
    tgmcmc::validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  const tgmcmc::ExperimentResult result = tgmcmc::run_experiment(cfg);
  std::cout << tgmcmc::summary_to_csv(result.summary);
  std::cout << "traces and summary.csv written to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_summarize(const std::vector<std::string>& files, const std::string& dir,
                  const std::string& out_csv) {
  namespace fs = std::filesystem;
  std::map<std::string, std::vector<std::vector<tgmcmc::TraceRecord>>> by_kernel;
  std::vector<std::string> all = files;
  if (!dir.empty()) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("trace_", 0) == 0 && entry.path().extension() == ".jsonl")
        all.push_back(entry.path().string());
    }
    std::sort(all.begin(), all.end());
  }
  if (all.empty()) {
    std::cerr << "no trace files given\n";
    return 1;
  }
  for (const auto& path : all) {
    auto trace = tgmcmc::read_trace_file(path);
    if (trace.empty()) continue;
    by_kernel[trace.front().kernel].push_back(std::move(trace));
  }
  const auto summary = tgmcmc::summarize(by_kernel);
  const std::string csv = tgmcmc::summary_to_csv(summary);
  std::cout << csv;
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    out << csv;
  }
  return 0;
}

int cmd_oracle(const std::string& data_path, const std::string& prior_kind, double alpha,
               double sigma, double u, std::int64_t top) {
  const auto data = std::make_shared<tgmcmc::Dataset>(tgmcmc::read_csv_points(data_path));
  if (data->size() > 10) {
    std::cerr << "oracle: dataset too large (max 10 points)\n";
    return 1;
  }
  const tgmcmc::GaussianWishartModel model(
      data, tgmcmc::GaussianWishartModel::default_params(*data));
  const tgmcmc::CrmPrior prior = prior_kind == "dp"
                                     ? tgmcmc::CrmPrior::dirichlet(alpha)
                                     : tgmcmc::CrmPrior::generalized_gamma(alpha, sigma);
  const tgmcmc::ExactPosterior post =
      tgmcmc::exact_posterior(model, prior, u, data->size());

  std::vector<std::pair<std::string, double>> ranked(post.probs.begin(), post.probs.end());
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  std::cout << "partitions: " << ranked.size() << "\n";
  std::cout << "log_normalizer: " << post.log_normalizer << "\n";
  std::cout << "log_u_terms: " << post.log_u_terms << "\n";
  for (std::int64_t r = 0; r < std::min<std::int64_t>(top, static_cast<std::int64_t>(ranked.size())); ++r) {
    std::cout << "p=" << ranked[static_cast<std::size_t>(r)].second << "  [";
    for (char c : ranked[static_cast<std::size_t>(r)].first)
      std::cout << static_cast<int>(c) << ' ';
    std::cout << "]\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tgMCMC: tree-guided MCMC for normalized random measure mixtures"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a synthetic dataset");
  std::string gen_kind = "gaussian_mixture";
  std::int64_t gen_k = 13, gen_n = 1300, gen_d = 2, oracle_top = 10;
  double gen_sep = 8.0, gen_theta = 3.0, gen_discount = 0.8;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "points.csv", gen_labels;
  gen->add_option("--kind", gen_kind, "gaussian_mixture | py_gaussian | py_labels");
  gen->add_option("--k", gen_k, "number of mixture components");
  gen->add_option("--n", gen_n, "number of points");
  gen->add_option("--d", gen_d, "dimensionality");
  gen->add_option("--separation", gen_sep, "grid scale for component means");
  gen->add_option("--theta", gen_theta, "Pitman-Yor concentration");
  gen->add_option("--discount", gen_discount, "Pitman-Yor discount");
  gen->add_option("--seed", gen_seed, "generator seed")->required();
  gen->add_option("--out", gen_out, "output CSV path");
  gen->add_option("--labels-out", gen_labels, "sidecar label CSV path");

  // run
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  std::string run_config, run_output;
  std::uint64_t run_seed = 0;
  run->add_option("--config", run_config, "experiment config file")->required();
  run->add_option("--seed", run_seed, "base seed (chain r uses seed+r)")->required();
  run->add_option("--output", run_output, "override output directory");

  // summarize
  auto* sum = app.add_subcommand("summarize", "summarize trace files into the metric table");
  std::vector<std::string> sum_files;
  std::string sum_dir, sum_out;
  sum->add_option("--traces", sum_files, "trace files (JSON lines)");
  sum->add_option("--dir", sum_dir, "directory containing trace_*.jsonl");
  sum->add_option("--out", sum_out, "also write the CSV here");

  // oracle
  auto* orc = app.add_subcommand("oracle", "exact posterior over partitions (n <= 10)");
  std::string orc_data, orc_prior = "dp";
  double orc_alpha = 1.0, orc_sigma = 0.5, orc_u = 1.0;
  orc->add_option("--data", orc_data, "dense CSV dataset")->required();
  orc->add_option("--prior", orc_prior, "dp | nggp");
  orc->add_option("--alpha", orc_alpha, "prior mass");
  orc->add_option("--sigma", orc_sigma, "nggp discount");
  orc->add_option("--u", orc_u, "auxiliary variable value");
  orc->add_option("--top", oracle_top, "partitions to print");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(gen_kind, gen_k, gen_n, gen_d, gen_sep, gen_theta, gen_discount,
                          gen_seed, gen_out, gen_labels);
    if (run->parsed()) return cmd_run(run_config, run_seed, run_output);
    if (sum->parsed()) return cmd_summarize(sum_files, sum_dir, sum_out);
    if (orc->parsed()) return cmd_oracle(orc_data, orc_prior, orc_alpha, orc_sigma, orc_u, oracle_top);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
