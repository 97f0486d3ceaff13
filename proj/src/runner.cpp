#include "tgmcmc/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tgmcmc/data.hpp"
#include "tgmcmc/ibhc.hpp"

namespace tgmcmc {

namespace {

double elapsed_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::shared_ptr<const Dataset> build_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset_kind == "gaussian_mixture") {
    return std::make_shared<Dataset>(
        gen_gaussian_mixture(cfg.k, cfg.n, cfg.d, cfg.separation, cfg.data_seed).data);
  }
  if (cfg.dataset_kind == "py_gaussian") {
    return std::make_shared<Dataset>(
        gen_py_gaussian_mixture(cfg.n, cfg.d, cfg.theta, cfg.discount, cfg.separation,
                                cfg.data_seed)
            .data);
  }
  if (cfg.dataset_kind == "csv")
    return std::make_shared<Dataset>(read_csv_points(cfg.dataset_path));
  if (cfg.dataset_kind == "uci_bow")
    return std::make_shared<Dataset>(read_uci_bow(cfg.dataset_path));
  throw std::runtime_error("unknown dataset kind: " + cfg.dataset_kind);
}

std::shared_ptr<const LikelihoodModel> build_model(const ExperimentConfig& cfg,
                                                   std::shared_ptr<const Dataset> data) {
  if (cfg.model_kind == "gaussian_wishart") {
    return std::make_shared<GaussianWishartModel>(
        data, GaussianWishartModel::default_params(*data));
  }
  return std::make_shared<DirichletMultinomialModel>(data, cfg.gamma);
}

CrmPrior build_prior(const ExperimentConfig& cfg) {
  if (cfg.prior_kind == "dp") return CrmPrior::dirichlet(cfg.alpha);
  return CrmPrior::generalized_gamma(cfg.alpha, cfg.sigma);
}

ChainState build_chain(const ExperimentConfig& cfg,
                       const std::shared_ptr<const LikelihoodModel>& model,
                       std::uint64_t seed) {
  const CrmPrior prior = build_prior(cfg);
  Rng init_rng(seed);
  std::vector<std::int64_t> order = identity_order(model->num_points());
  init_rng.shuffle(order);
  Forest forest = cfg.init == "ibhc"
                      ? ibhc_build(order, *model, prior, cfg.u_init, cfg.ibhc_restarts,
                                   init_rng)
                      : flat_init(order, *model, prior, cfg.u_init);
  ChainState state(prior, model.get(), std::move(forest), cfg.u_init, seed ^ 0x5851f42d4c957f2dULL);
  return state;
}

std::vector<TraceRecord> run_chain(const ExperimentConfig& cfg, const std::string& kernel,
                                   ChainState& state, std::ostream* sink) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<TraceRecord> trace;
  const TgmcmcOptions tg{cfg.G, cfg.D, cfg.u_steps};
  GibbsOptions gibbs;
  gibbs.u_steps = cfg.u_steps;
  GibbsOptions gibbs_sub = gibbs;
  gibbs_sub.subset_fraction = cfg.gibbs_sub_fraction;
  SplitMergeOptions sm;
  sm.t_restricted = cfg.t_restricted;
  sm.u_steps = cfg.u_steps;
  SplitMergeOptions sm_sub = sm;
  sm_sub.subset_fraction = cfg.sm_sub_fraction;

  std::int64_t iter = 0;
  while (true) {
    if (cfg.budget_iterations > 0) {
      if (iter >= cfg.budget_iterations) break;
    } else if (iter > 0 && elapsed_seconds(t0) >= cfg.budget_seconds) {
      break;
    }

    TraceRecord rec;
    rec.iter = iter;
    rec.kernel = kernel;
    if (kernel == "tgmcmc") {
      const auto records = tgmcmc_iteration(state, tg);
      double lr_sum = 0.0;
      std::int64_t lr_n = 0;
      bool any_accept = false;
      for (const auto& r : records) {
        if (r.kind != MoveKind::Noop && std::isfinite(r.log_r)) {
          lr_sum += r.log_r;
          ++lr_n;
        }
        any_accept = any_accept || r.accepted;
      }
      if (lr_n > 0) rec.log_r = lr_sum / static_cast<double>(lr_n);
      rec.accepted = any_accept;
    } else if (kernel == "gibbs") {
      marginal_gibbs_iteration(state, gibbs);
    } else if (kernel == "gibbs_sub") {
      marginal_gibbs_iteration(state, gibbs_sub);
    } else if (kernel == "sm" || kernel == "sm_sub") {
      const SmOutcome out =
          split_merge_iteration(state, kernel == "sm" ? sm : sm_sub);
      if (std::isfinite(out.log_r)) rec.log_r = out.log_r;
      rec.accepted = out.accepted;
    } else {
      throw std::runtime_error("unknown kernel: " + kernel);
    }
    rec.wall_seconds = elapsed_seconds(t0);
    rec.joint_log_prob = joint_log_prob(state);
    rec.num_clusters = static_cast<std::int64_t>(state.forest.num_roots());
    if (sink) {
      *sink << trace_to_json(rec) << '\n';
      sink->flush();
    }
    trace.push_back(std::move(rec));
    ++iter;
  }
  return trace;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  {
    std::ofstream probe(fs::path(cfg.output_dir) / ".write_probe");
    if (!probe) throw std::runtime_error("output directory is not writable: " + cfg.output_dir);
  }
  fs::remove(fs::path(cfg.output_dir) / ".write_probe", ec);

  const std::shared_ptr<const Dataset> data = build_dataset(cfg);
  const std::shared_ptr<const LikelihoodModel> model = build_model(cfg, data);

  struct Job {
    std::string kernel;
    int repeat;
  };
  std::vector<Job> jobs;
  for (const auto& kernel : cfg.kernels)
    for (int r = 0; r < cfg.repeats; ++r) jobs.push_back(Job{kernel, r});

  ExperimentResult result;
  for (const auto& kernel : cfg.kernels)
    result.traces[kernel].resize(static_cast<std::size_t>(cfg.repeats));

  std::atomic<std::size_t> next{0};
  std::mutex result_mutex;
  const auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      const Job& job = jobs[idx];
      ChainState state = build_chain(cfg, model, cfg.base_seed + static_cast<std::uint64_t>(job.repeat));
      const fs::path trace_path =
          fs::path(cfg.output_dir)
          / ("trace_" + job.kernel + "_rep" + std::to_string(job.repeat) + ".jsonl");
      std::ofstream sink(trace_path);
      if (!sink) throw std::runtime_error("cannot write " + trace_path.string());
      std::vector<TraceRecord> trace = run_chain(cfg, job.kernel, state, &sink);
      std::lock_guard<std::mutex> lock(result_mutex);
      result.traces[job.kernel][static_cast<std::size_t>(job.repeat)] = std::move(trace);
    }
  };

  const int n_workers = std::min<int>(cfg.workers, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  result.summary = summarize(result.traces);
  std::ofstream csv(fs::path(cfg.output_dir) / "summary.csv");
  csv << summary_to_csv(result.summary);
  return result;
}

}  // namespace tgmcmc
