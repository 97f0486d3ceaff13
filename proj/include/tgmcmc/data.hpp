#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace tgmcmc {

// One nonzero entry of a bag-of-words document.
struct DocEntry {
  std::int32_t word = 0;   // 0-based word id
  std::int32_t count = 0;  // > 0
};

// Either a dense point set (points: n x d, row per point) or a sparse
// bag-of-words corpus (docs + vocab_size). Immutable for the lifetime of a run.
struct Dataset {
  Eigen::MatrixXd points;
  std::vector<std::vector<DocEntry>> docs;
  std::int32_t vocab_size = 0;

  bool sparse() const { return !docs.empty(); }
  std::int64_t size() const {
    return sparse() ? static_cast<std::int64_t>(docs.size()) : points.rows();
  }
};

struct LabeledDataset {
  Dataset data;
  std::vector<std::int32_t> labels;
};

// k Gaussian components with means on a jittered grid scaled by `separation`,
// unit-trace random SPD covariances, equal weights. Deterministic per seed.
LabeledDataset gen_gaussian_mixture(std::int64_t k, std::int64_t n, std::int64_t d,
                                    double separation, std::uint64_t seed);

// Sequential Pitman-Yor CRP labels: new table w.p. (theta + K*discount)/(theta+i),
// table t w.p. (n_t - discount)/(theta + i).
std::vector<std::int32_t> gen_py_labels(std::int64_t n, double theta, double discount,
                                        std::uint64_t seed);

// Gaussian mixture whose labels come from a Pitman-Yor draw (one component per
// realized label, grid-placed means as above).
LabeledDataset gen_py_gaussian_mixture(std::int64_t n, std::int64_t d, double theta,
                                       double discount, double separation,
                                       std::uint64_t seed);

// UCI Bag-of-Words format: three header lines (D, W, NNZ) then 1-indexed
// "docID wordID count" triples. Malformed input throws std::runtime_error
// with the offending line number.
Dataset read_uci_bow(const std::string& docword_path);

// Dense CSV, one row per point, no header; optional sidecar labels.
Dataset read_csv_points(const std::string& path);
void write_csv_points(const Dataset& data, const std::string& path);
void write_csv_labels(const std::vector<std::int32_t>& labels, const std::string& path);
std::vector<std::int32_t> read_csv_labels(const std::string& path);

}  // namespace tgmcmc
