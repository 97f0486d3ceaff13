#include "tgmcmc/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tgmcmc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::int64_t to_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const std::int64_t x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config: key '" + key + "' needs an integer, got '" + v + "'");
  }
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config: key '" + key + "' needs a number, got '" + v + "'");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no)
                               + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw std::runtime_error("config line " + std::to_string(line_no) + ": duplicate key '"
                               + key + "'");

    if (key == "dataset.kind") cfg.dataset_kind = value;
    else if (key == "dataset.k") cfg.k = to_int(value, key);
    else if (key == "dataset.n") cfg.n = to_int(value, key);
    else if (key == "dataset.d") cfg.d = to_int(value, key);
    else if (key == "dataset.separation") cfg.separation = to_double(value, key);
    else if (key == "dataset.seed") cfg.data_seed = static_cast<std::uint64_t>(to_int(value, key));
    else if (key == "dataset.theta") cfg.theta = to_double(value, key);
    else if (key == "dataset.discount") cfg.discount = to_double(value, key);
    else if (key == "dataset.path") cfg.dataset_path = value;
    else if (key == "model.kind") cfg.model_kind = value;
    else if (key == "model.gamma") cfg.gamma = to_double(value, key);
    else if (key == "prior.kind") cfg.prior_kind = value;
    else if (key == "prior.alpha") cfg.alpha = to_double(value, key);
    else if (key == "prior.sigma") cfg.sigma = to_double(value, key);
    else if (key == "kernels") {
      cfg.kernels.clear();
      std::stringstream ks(value);
      std::string item;
      while (std::getline(ks, item, ',')) {
        item = trim(item);
        if (!item.empty()) cfg.kernels.push_back(item);
      }
    }
    else if (key == "tgmcmc.G") cfg.G = static_cast<int>(to_int(value, key));
    else if (key == "tgmcmc.D") cfg.D = static_cast<int>(to_int(value, key));
    else if (key == "sm.t_restricted") cfg.t_restricted = static_cast<int>(to_int(value, key));
    else if (key == "gibbs_sub.fraction") cfg.gibbs_sub_fraction = to_double(value, key);
    else if (key == "sm_sub.fraction") cfg.sm_sub_fraction = to_double(value, key);
    else if (key == "u.init") cfg.u_init = to_double(value, key);
    else if (key == "u.steps") cfg.u_steps = static_cast<int>(to_int(value, key));
    else if (key == "init") cfg.init = value;
    else if (key == "ibhc.restarts") cfg.ibhc_restarts = static_cast<int>(to_int(value, key));
    else if (key == "budget.seconds") cfg.budget_seconds = to_double(value, key);
    else if (key == "budget.iterations") cfg.budget_iterations = to_int(value, key);
    else if (key == "repeats") cfg.repeats = static_cast<int>(to_int(value, key));
    else if (key == "seed") cfg.base_seed = static_cast<std::uint64_t>(to_int(value, key));
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "workers") cfg.workers = static_cast<int>(to_int(value, key));
    else
      throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown key '"
                               + key + "'");
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_config_text(ss.str());
  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  const std::set<std::string> dataset_kinds{"gaussian_mixture", "py_gaussian", "csv",
                                            "uci_bow"};
  if (!dataset_kinds.count(cfg.dataset_kind))
    throw std::runtime_error("config: unknown dataset.kind '" + cfg.dataset_kind + "'");
  if (cfg.dataset_kind == "csv" || cfg.dataset_kind == "uci_bow") {
    if (cfg.dataset_path.empty())
      throw std::runtime_error("config: dataset.path required for " + cfg.dataset_kind);
    std::ifstream probe(cfg.dataset_path);
    if (!probe)
      throw std::runtime_error("config: dataset.path does not exist: " + cfg.dataset_path);
  }
  if (cfg.model_kind != "gaussian_wishart" && cfg.model_kind != "dirichlet_multinomial")
    throw std::runtime_error("config: unknown model.kind '" + cfg.model_kind + "'");
  if (cfg.prior_kind != "dp" && cfg.prior_kind != "nggp")
    throw std::runtime_error("config: unknown prior.kind '" + cfg.prior_kind + "'");
  if (!(cfg.alpha > 0.0)) throw std::runtime_error("config: prior.alpha must be positive");
  if (cfg.prior_kind == "nggp" && !(cfg.sigma >= 0.0 && cfg.sigma < 1.0))
    throw std::runtime_error("config: prior.sigma must lie in [0, 1)");
  if (cfg.kernels.empty()) throw std::runtime_error("config: no kernels requested");
  const std::set<std::string> kernel_names{"tgmcmc", "gibbs", "sm", "gibbs_sub", "sm_sub"};
  for (const auto& k : cfg.kernels)
    if (!kernel_names.count(k))
      throw std::runtime_error("config: unknown kernel '" + k + "'");
  const bool has_sec = cfg.budget_seconds > 0.0;
  const bool has_iter = cfg.budget_iterations > 0;
  if (has_sec == has_iter)
    throw std::runtime_error(
        "config: exactly one of budget.seconds and budget.iterations must be positive");
  if (cfg.repeats < 1) throw std::runtime_error("config: repeats must be >= 1");
  if (cfg.workers < 1) throw std::runtime_error("config: workers must be >= 1");
  if (!(cfg.gibbs_sub_fraction > 0.0 && cfg.gibbs_sub_fraction <= 1.0)
      || !(cfg.sm_sub_fraction > 0.0 && cfg.sm_sub_fraction <= 1.0))
    throw std::runtime_error("config: subset fractions must lie in (0, 1]");
  if (cfg.init != "flat" && cfg.init != "ibhc")
    throw std::runtime_error("config: init must be 'flat' or 'ibhc'");
  if (!(cfg.u_init > 0.0)) throw std::runtime_error("config: u.init must be positive");
  if (cfg.u_steps < 0) throw std::runtime_error("config: u.steps must be >= 0");
  if (cfg.G < 0 || cfg.D < 1 || cfg.t_restricted < 1)
    throw std::runtime_error("config: bad kernel options (need G >= 0, D >= 1, t >= 1)");
}

}  // namespace tgmcmc
