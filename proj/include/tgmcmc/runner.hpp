#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tgmcmc/config.hpp"
#include "tgmcmc/diagnostics.hpp"
#include "tgmcmc/likelihood.hpp"
#include "tgmcmc/samplers.hpp"

namespace tgmcmc {

struct ExperimentResult {
  // kernel -> repeat -> trace
  std::map<std::string, std::vector<std::vector<TraceRecord>>> traces;
  std::vector<KernelSummary> summary;
};

std::shared_ptr<const Dataset> build_dataset(const ExperimentConfig& cfg);
std::shared_ptr<const LikelihoodModel> build_model(const ExperimentConfig& cfg,
                                                   std::shared_ptr<const Dataset> data);
CrmPrior build_prior(const ExperimentConfig& cfg);

// Initial chain for (kernel-independent) repeat r: seed = base_seed + r,
// random insertion order, flat or IBHC construction per config.
ChainState build_chain(const ExperimentConfig& cfg,
                       const std::shared_ptr<const LikelihoodModel>& model,
                       std::uint64_t seed);

// Run one kernel until the budget expires, appending one trace record per
// iteration. When `sink` is non-null every record is written (and flushed)
// as a JSON line as soon as it exists.
std::vector<TraceRecord> run_chain(const ExperimentConfig& cfg, const std::string& kernel,
                                   ChainState& state, std::ostream* sink);

// Full protocol: repeats x kernels on a worker pool, trace files named
// trace_<kernel>_rep<r>.jsonl plus summary.csv in the output directory.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace tgmcmc
