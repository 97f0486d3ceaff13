#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tgmcmc {

// One diagnostic sample per kernel iteration; serialized as one JSON line.
struct TraceRecord {
  std::int64_t iter = 0;
  double wall_seconds = 0.0;
  double joint_log_prob = 0.0;
  std::int64_t num_clusters = 0;
  std::optional<double> log_r;
  std::optional<bool> accepted;
  std::string kernel;
};

std::string trace_to_json(const TraceRecord& rec);
TraceRecord trace_from_json(const std::string& line);
std::vector<TraceRecord> read_trace_file(const std::string& path);

// ESS = N / (1 + 2 sum_k rho_k) with Geyer initial-monotone-positive-sequence
// truncation of the empirical autocorrelations. A constant series yields N.
double ess(std::span<const double> series);
double ess(const std::vector<double>& series);

// (1/2) sum |p - q| over the union of supports; both maps must be normalized.
double tv_distance(const std::map<std::string, double>& p,
                   const std::map<std::string, double>& q);

// Per-kernel mean and sample standard deviation of the paper's four metrics.
struct KernelSummary {
  std::string kernel;
  int runs = 0;
  double max_joint_mean = 0.0, max_joint_std = 0.0;
  double ess_mean = 0.0, ess_std = 0.0;
  double log_r_mean = 0.0, log_r_std = 0.0;  // NaN when the kernel has no log r
  double sec_per_iter_mean = 0.0, sec_per_iter_std = 0.0;
};

KernelSummary summarize_kernel(const std::string& kernel,
                               const std::vector<std::vector<TraceRecord>>& runs);
std::vector<KernelSummary> summarize(
    const std::map<std::string, std::vector<std::vector<TraceRecord>>>& runs_by_kernel);
std::string summary_to_csv(const std::vector<KernelSummary>& rows);

}  // namespace tgmcmc
