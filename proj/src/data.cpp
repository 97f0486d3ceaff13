#include "tgmcmc/data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tgmcmc/rng.hpp"

namespace tgmcmc {

namespace {

// component means on a jittered integer grid scaled by `separation`
Eigen::MatrixXd grid_means(std::int64_t k, std::int64_t d, double separation, Rng& rng) {
  const std::int64_t per_axis = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(k),
                                                      1.0 / static_cast<double>(d)))));
  Eigen::MatrixXd means(k, d);
  for (std::int64_t c = 0; c < k; ++c) {
    std::int64_t rem = c;
    for (std::int64_t a = 0; a < d; ++a) {
      const std::int64_t cell = rem % per_axis;
      rem /= per_axis;
      means(c, a) = separation * (static_cast<double>(cell) + 0.5 * (rng.uniform() - 0.5));
    }
  }
  return means;
}

// random SPD covariance normalized to unit trace
Eigen::MatrixXd random_unit_trace_cov(std::int64_t d, Rng& rng) {
  Eigen::MatrixXd a(d, d);
  for (std::int64_t r = 0; r < d; ++r)
    for (std::int64_t c = 0; c < d; ++c) a(r, c) = rng.normal();
  Eigen::MatrixXd cov = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
  return cov / cov.trace();
}

LabeledDataset mixture_from_labels(const std::vector<std::int32_t>& labels, std::int64_t d,
                                   double separation, Rng& rng) {
  const std::int64_t n = static_cast<std::int64_t>(labels.size());
  std::int32_t k = 0;
  for (std::int32_t l : labels) k = std::max(k, l + 1);
  const Eigen::MatrixXd means = grid_means(k, d, separation, rng);
  std::vector<Eigen::MatrixXd> chols;
  chols.reserve(static_cast<std::size_t>(k));
  for (std::int32_t c = 0; c < k; ++c)
    chols.push_back(Eigen::MatrixXd(
        Eigen::LLT<Eigen::MatrixXd>(random_unit_trace_cov(d, rng)).matrixL()));

  LabeledDataset out;
  out.labels = labels;
  out.data.points.resize(n, d);
  Eigen::VectorXd z(d);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t a = 0; a < d; ++a) z(a) = rng.normal();
    out.data.points.row(i) =
        (means.row(labels[static_cast<std::size_t>(i)]).transpose()
         + chols[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] * z)
            .transpose();
  }
  return out;
}

}  // namespace

LabeledDataset gen_gaussian_mixture(std::int64_t k, std::int64_t n, std::int64_t d,
                                    double separation, std::uint64_t seed) {
  if (k < 1 || n < 1 || d < 1)
    throw std::domain_error("gen_gaussian_mixture: k, n, d must be >= 1");
  Rng rng(seed);
  std::vector<std::int32_t> labels(static_cast<std::size_t>(n));
  for (auto& l : labels) l = static_cast<std::int32_t>(rng.uniform_int(k));
  return mixture_from_labels(labels, d, separation, rng);
}

std::vector<std::int32_t> gen_py_labels(std::int64_t n, double theta, double discount,
                                        std::uint64_t seed) {
  if (!(discount >= 0.0 && discount < 1.0) || !(theta > -discount))
    throw std::domain_error("gen_py_labels: need 0 <= discount < 1 and theta > -discount");
  if (n < 1) throw std::domain_error("gen_py_labels: n must be >= 1");
  Rng rng(seed);
  std::vector<std::int32_t> labels(static_cast<std::size_t>(n));
  std::vector<double> counts;
  for (std::int64_t i = 0; i < n; ++i) {
    if (i == 0) {
      labels[0] = 0;
      counts.push_back(1.0);
      continue;
    }
    const double k = static_cast<double>(counts.size());
    const double denom = theta + static_cast<double>(i);
    const double p_new = (theta + k * discount) / denom;
    const double r = rng.uniform();
    if (r < p_new) {
      labels[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(counts.size());
      counts.push_back(1.0);
    } else {
      // residual mass over existing tables, proportional to n_t - discount
      double acc = p_new;
      std::size_t pick = counts.size() - 1;
      for (std::size_t t = 0; t < counts.size(); ++t) {
        acc += (counts[t] - discount) / denom;
        if (r < acc) {
          pick = t;
          break;
        }
      }
      labels[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(pick);
      counts[pick] += 1.0;
    }
  }
  return labels;
}

LabeledDataset gen_py_gaussian_mixture(std::int64_t n, std::int64_t d, double theta,
                                       double discount, double separation,
                                       std::uint64_t seed) {
  const std::vector<std::int32_t> labels = gen_py_labels(n, theta, discount, seed);
  Rng rng(seed + 0x9e3779b97f4a7c15ULL);
  return mixture_from_labels(labels, d, separation, rng);
}

Dataset read_uci_bow(const std::string& docword_path) {
  std::ifstream in(docword_path);
  if (!in) throw std::runtime_error("cannot open " + docword_path);
  std::string line;
  std::int64_t line_no = 0;
  const auto next_line = [&]() {
    if (!std::getline(in, line))
      throw std::runtime_error(docword_path + ": unexpected end of file at line "
                               + std::to_string(line_no + 1));
    ++line_no;
  };
  const auto parse_int = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(s, &pos);
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos != s.size()) throw std::invalid_argument("trailing garbage");
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error(docword_path + ": malformed header at line "
                               + std::to_string(line_no));
    }
  };

  next_line();
  const std::int64_t n_docs = parse_int(line);
  next_line();
  const std::int64_t n_words = parse_int(line);
  next_line();
  const std::int64_t nnz = parse_int(line);
  if (n_docs < 1 || n_words < 1 || nnz < 0)
    throw std::runtime_error(docword_path + ": invalid header values");

  Dataset out;
  out.vocab_size = static_cast<std::int32_t>(n_words);
  out.docs.resize(static_cast<std::size_t>(n_docs));
  std::int64_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::int64_t doc = 0, word = 0, count = 0;
    if (!(ls >> doc >> word >> count))
      throw std::runtime_error(docword_path + ": malformed triple at line "
                               + std::to_string(line_no));
    if (doc < 1 || doc > n_docs || word < 1 || word > n_words || count < 1)
      throw std::runtime_error(docword_path + ": index out of range at line "
                               + std::to_string(line_no));
    out.docs[static_cast<std::size_t>(doc - 1)].push_back(
        DocEntry{static_cast<std::int32_t>(word - 1), static_cast<std::int32_t>(count)});
    ++seen;
  }
  if (seen != nnz)
    throw std::runtime_error(docword_path + ": NNZ mismatch, header says "
                             + std::to_string(nnz) + " but file has "
                             + std::to_string(seen));
  return out;
}

Dataset read_csv_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": bad number at line " + std::to_string(line_no));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path + ": ragged row at line " + std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty dataset");
  Dataset out;
  out.points.resize(static_cast<std::int64_t>(rows.size()),
                    static_cast<std::int64_t>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      out.points(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)) = rows[r][c];
  return out;
}

void write_csv_points(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  for (std::int64_t r = 0; r < data.points.rows(); ++r) {
    for (std::int64_t c = 0; c < data.points.cols(); ++c) {
      if (c) out << ',';
      out << data.points(r, c);
    }
    out << '\n';
  }
}

void write_csv_labels(const std::vector<std::int32_t>& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::int32_t l : labels) out << l << '\n';
}

std::vector<std::int32_t> read_csv_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::int32_t> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    labels.push_back(static_cast<std::int32_t>(std::stol(line)));
  }
  return labels;
}

}  // namespace tgmcmc
