#include "tgmcmc/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tgmcmc {

std::string trace_to_json(const TraceRecord& rec) {
  nlohmann::json j;
  j["iter"] = rec.iter;
  j["wall_seconds"] = rec.wall_seconds;
  j["joint_log_prob"] = rec.joint_log_prob;
  j["num_clusters"] = rec.num_clusters;
  if (rec.log_r && std::isfinite(*rec.log_r))
    j["log_r"] = *rec.log_r;
  else
    j["log_r"] = nullptr;
  if (rec.accepted)
    j["accepted"] = *rec.accepted;
  else
    j["accepted"] = nullptr;
  j["kernel"] = rec.kernel;
  return j.dump();
}

TraceRecord trace_from_json(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  TraceRecord rec;
  rec.iter = j.at("iter").get<std::int64_t>();
  rec.wall_seconds = j.at("wall_seconds").get<double>();
  rec.joint_log_prob = j.at("joint_log_prob").get<double>();
  rec.num_clusters = j.at("num_clusters").get<std::int64_t>();
  if (j.contains("log_r") && !j.at("log_r").is_null())
    rec.log_r = j.at("log_r").get<double>();
  if (j.contains("accepted") && !j.at("accepted").is_null())
    rec.accepted = j.at("accepted").get<bool>();
  rec.kernel = j.at("kernel").get<std::string>();
  return rec;
}

std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::vector<TraceRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(trace_from_json(line));
  }
  return out;
}

double ess(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 10) throw std::domain_error("ess: series must have at least 10 samples");
  const double nd = static_cast<double>(n);
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= nd;
  double var = 0.0;
  for (double x : series) var += (x - mean) * (x - mean);
  var /= nd;
  if (var <= 0.0) {
    std::cerr << "ess: constant series, returning N by convention\n";
    return nd;
  }

  const auto rho = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t)
      acc += (series[t] - mean) * (series[t + lag] - mean);
    return acc / (nd * var);
  };

  // Geyer: pair sums Gamma_m = rho_{2m} + rho_{2m+1}, truncated at the first
  // non-positive pair, then forced non-increasing.
  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    double pair = rho(2 * m) + rho(2 * m + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0);  // ESS never exceeds N
  return nd / tau;
}

double ess(const std::vector<double>& series) { return ess(std::span<const double>(series)); }

double tv_distance(const std::map<std::string, double>& p,
                   const std::map<std::string, double>& q) {
  double sum_p = 0.0, sum_q = 0.0;
  for (const auto& [k, v] : p) sum_p += v;
  for (const auto& [k, v] : q) sum_q += v;
  if (std::abs(sum_p - 1.0) > 1e-6 || std::abs(sum_q - 1.0) > 1e-6)
    throw std::logic_error("tv_distance: inputs must be normalized");
  double tv = 0.0;
  for (const auto& [k, v] : p) {
    const auto it = q.find(k);
    tv += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (p.find(k) == p.end()) tv += v;
  return 0.5 * tv;
}

namespace {
struct MeanStd {
  double mean = 0.0, std = 0.0;
};
MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  return out;
}
}  // namespace

KernelSummary summarize_kernel(const std::string& kernel,
                               const std::vector<std::vector<TraceRecord>>& runs) {
  if (runs.empty()) throw std::invalid_argument("summarize_kernel: no runs");
  std::vector<double> max_joint, run_ess, mean_log_r, sec_per_iter;
  for (const auto& trace : runs) {
    if (trace.empty()) continue;
    double mx = trace.front().joint_log_prob;
    std::vector<double> clusters;
    clusters.reserve(trace.size());
    double lr_sum = 0.0;
    std::int64_t lr_n = 0;
    for (const auto& rec : trace) {
      mx = std::max(mx, rec.joint_log_prob);
      clusters.push_back(static_cast<double>(rec.num_clusters));
      if (rec.log_r && std::isfinite(*rec.log_r)) {
        lr_sum += *rec.log_r;
        ++lr_n;
      }
    }
    max_joint.push_back(mx);
    if (clusters.size() >= 10) run_ess.push_back(ess(clusters));
    if (lr_n > 0) mean_log_r.push_back(lr_sum / static_cast<double>(lr_n));
    if (trace.size() >= 2) {
      sec_per_iter.push_back((trace.back().wall_seconds - trace.front().wall_seconds)
                             / static_cast<double>(trace.size() - 1));
    } else {
      sec_per_iter.push_back(trace.back().wall_seconds);
    }
  }
  KernelSummary s;
  s.kernel = kernel;
  s.runs = static_cast<int>(runs.size());
  const MeanStd mj = mean_std(max_joint);
  s.max_joint_mean = mj.mean;
  s.max_joint_std = mj.std;
  const MeanStd me = mean_std(run_ess);
  s.ess_mean = me.mean;
  s.ess_std = me.std;
  if (mean_log_r.empty()) {
    s.log_r_mean = std::numeric_limits<double>::quiet_NaN();
    s.log_r_std = std::numeric_limits<double>::quiet_NaN();
  } else {
    const MeanStd ml = mean_std(mean_log_r);
    s.log_r_mean = ml.mean;
    s.log_r_std = ml.std;
  }
  const MeanStd ms = mean_std(sec_per_iter);
  s.sec_per_iter_mean = ms.mean;
  s.sec_per_iter_std = ms.std;
  return s;
}

std::vector<KernelSummary> summarize(
    const std::map<std::string, std::vector<std::vector<TraceRecord>>>& runs_by_kernel) {
  std::vector<KernelSummary> out;
  for (const auto& [kernel, runs] : runs_by_kernel)
    out.push_back(summarize_kernel(kernel, runs));
  return out;
}

std::string summary_to_csv(const std::vector<KernelSummary>& rows) {
  std::ostringstream os;
  os << "kernel,runs,max_log_lik_mean,max_log_lik_std,ess_mean,ess_std,"
        "log_r_mean,log_r_std,sec_per_iter_mean,sec_per_iter_std\n";
  os.precision(10);
  for (const auto& s : rows) {
    os << s.kernel << ',' << s.runs << ',' << s.max_joint_mean << ',' << s.max_joint_std
       << ',' << s.ess_mean << ',' << s.ess_std << ',';
    if (std::isnan(s.log_r_mean))
      os << ",,";
    else
      os << s.log_r_mean << ',' << s.log_r_std << ',';
    os << s.sec_per_iter_mean << ',' << s.sec_per_iter_std << '\n';
  }
  return os.str();
}

}  // namespace tgmcmc
