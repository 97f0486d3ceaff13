#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "tgmcmc/config.hpp"
#include "tgmcmc/data.hpp"
#include "tgmcmc/runner.hpp"

using namespace tgmcmc;

namespace {
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path()
           / ("tgmcmc_test_" + std::to_string(::getpid()) + "_"
              + std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};
}  // namespace

TEST_CASE("gaussian mixture generator") {
  const LabeledDataset one = gen_gaussian_mixture(1, 50, 2, 5.0, 3);
  for (std::int32_t l : one.labels) CHECK(l == 0);
  CHECK(one.data.points.rows() == 50);
  CHECK(one.data.points.cols() == 2);

  const LabeledDataset a = gen_gaussian_mixture(13, 100, 2, 8.0, 7);
  const LabeledDataset b = gen_gaussian_mixture(13, 100, 2, 8.0, 7);
  CHECK(a.data.points == b.data.points);  // pure function of (params, seed)
  CHECK(a.labels == b.labels);
  const LabeledDataset c = gen_gaussian_mixture(13, 100, 2, 8.0, 8);
  CHECK(a.data.points != c.data.points);

  CHECK_THROWS_AS(gen_gaussian_mixture(0, 10, 2, 1.0, 1), std::domain_error);
}

TEST_CASE("pitman-yor label generator") {
  CHECK(gen_py_labels(1, 3.0, 0.8, 5) == std::vector<std::int32_t>{0});

  // P(second point joins the first) = (1 - 0.8)/(1 + 3) = 0.05
  int joined = 0;
  const int n_draws = 200000;
  for (int s = 0; s < n_draws; ++s) {
    const auto labels = gen_py_labels(2, 3.0, 0.8, static_cast<std::uint64_t>(s));
    joined += labels[1] == 0 ? 1 : 0;
  }
  const double freq = static_cast<double>(joined) / n_draws;
  CHECK(std::abs(freq - 0.05) <= 3.0 * std::sqrt(0.05 * 0.95 / n_draws));

  // discount 0 reduces to the CRP: new-table chance theta/(theta+1) at i=1
  int new_table = 0;
  for (int s = 0; s < n_draws; ++s) {
    const auto labels = gen_py_labels(2, 1.0, 0.0, static_cast<std::uint64_t>(s) + 7);
    new_table += labels[1] == 1 ? 1 : 0;
  }
  const double crp_freq = static_cast<double>(new_table) / n_draws;
  CHECK(std::abs(crp_freq - 0.5) <= 3.0 * std::sqrt(0.25 / n_draws));

  CHECK_THROWS_AS(gen_py_labels(5, -1.0, 0.8, 1), std::domain_error);
  CHECK_THROWS_AS(gen_py_labels(5, 1.0, 1.0, 1), std::domain_error);
}

TEST_CASE("uci bag-of-words reader") {
  TempDir dir;
  {
    std::ofstream out(dir.file("docword.txt"));
    out << "2\n3\n4\n1 1 2\n1 3 1\n2 2 5\n2 3 1\n";
  }
  const Dataset corpus = read_uci_bow(dir.file("docword.txt"));
  CHECK(corpus.docs.size() == 2);
  CHECK(corpus.vocab_size == 3);
  CHECK(corpus.docs[0].size() == 2);
  CHECK(corpus.docs[0][0].word == 0);
  CHECK(corpus.docs[0][0].count == 2);
  CHECK(corpus.docs[1][0].word == 1);
  CHECK(corpus.docs[1][0].count == 5);

  {
    std::ofstream out(dir.file("bad_nnz.txt"));
    out << "2\n3\n5\n1 1 2\n1 3 1\n2 2 5\n2 3 1\n";
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(read_uci_bow(dir.file("bad_nnz.txt"))),
                       doctest::Contains("NNZ mismatch"), std::runtime_error);

  {
    std::ofstream out(dir.file("bad_idx.txt"));
    out << "2\n3\n1\n2 9 1\n";
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(read_uci_bow(dir.file("bad_idx.txt"))),
                       doctest::Contains("line 4"), std::runtime_error);

  {
    std::ofstream out(dir.file("bad_header.txt"));
    out << "two\n3\n1\n1 1 1\n";
  }
  CHECK_THROWS_AS(static_cast<void>(read_uci_bow(dir.file("bad_header.txt"))),
                  std::runtime_error);
}

TEST_CASE("csv round trip") {
  TempDir dir;
  const LabeledDataset ds = gen_gaussian_mixture(3, 20, 4, 5.0, 11);
  write_csv_points(ds.data, dir.file("points.csv"));
  write_csv_labels(ds.labels, dir.file("labels.csv"));
  const Dataset back = read_csv_points(dir.file("points.csv"));
  CHECK((back.points - ds.data.points).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(read_csv_labels(dir.file("labels.csv")) == ds.labels);
}

TEST_CASE("config parsing is strict") {
  const ExperimentConfig cfg = parse_config_text(
      "# toy protocol\n"
      "dataset.kind = gaussian_mixture\n"
      "dataset.k = 13\n"
      "dataset.n = 130\n"
      "kernels = tgmcmc, gibbs\n"
      "tgmcmc.G = 10\n"
      "budget.iterations = 5\n"
      "repeats = 2\n");
  CHECK(cfg.k == 13);
  CHECK(cfg.n == 130);
  CHECK(cfg.kernels == std::vector<std::string>{"tgmcmc", "gibbs"});
  CHECK(cfg.G == 10);
  validate_config(cfg);

  CHECK_THROWS_WITH_AS(static_cast<void>(parse_config_text("dataset.knd = csv\n")),
                       doctest::Contains("unknown key"), std::runtime_error);
  CHECK_THROWS_WITH_AS(static_cast<void>(parse_config_text("repeats = 1\nrepeats = 2\n")),
                       doctest::Contains("duplicate"), std::runtime_error);

  ExperimentConfig both = cfg;
  both.budget_seconds = 1.0;
  CHECK_THROWS_AS(validate_config(both), std::runtime_error);
  ExperimentConfig neither = cfg;
  neither.budget_iterations = 0;
  CHECK_THROWS_AS(validate_config(neither), std::runtime_error);
  ExperimentConfig missing = cfg;
  missing.dataset_kind = "csv";
  missing.dataset_path = "/nonexistent/file.csv";
  CHECK_THROWS_AS(validate_config(missing), std::runtime_error);
  ExperimentConfig bad_kernel = cfg;
  bad_kernel.kernels = {"gibs"};
  CHECK_THROWS_AS(validate_config(bad_kernel), std::runtime_error);
}

TEST_CASE("run_experiment produces traces and a summary") {
  TempDir dir;
  ExperimentConfig cfg;
  cfg.dataset_kind = "gaussian_mixture";
  cfg.k = 3;
  cfg.n = 40;
  cfg.d = 2;
  cfg.separation = 6.0;
  cfg.data_seed = 5;
  cfg.kernels = {"tgmcmc", "gibbs", "sm", "gibbs_sub", "sm_sub"};
  cfg.G = 2;
  cfg.budget_iterations = 4;
  cfg.repeats = 2;
  cfg.base_seed = 100;
  cfg.output_dir = dir.file("out");
  cfg.workers = 2;
  validate_config(cfg);

  const ExperimentResult result = run_experiment(cfg);
  for (const auto& kernel : cfg.kernels) {
    REQUIRE(result.traces.at(kernel).size() == 2);
    for (const auto& trace : result.traces.at(kernel)) {
      REQUIRE(trace.size() == 4);  // one record per iteration
      for (const auto& rec : trace) CHECK(std::isfinite(rec.joint_log_prob));
    }
    for (int r = 0; r < 2; ++r) {
      const std::string path =
          dir.file("out/trace_" + kernel + "_rep" + std::to_string(r) + ".jsonl");
      const auto loaded = read_trace_file(path);
      CHECK(loaded.size() == 4);
      CHECK(loaded.front().kernel == kernel);
    }
  }
  CHECK(std::filesystem::exists(dir.file("out/summary.csv")));
  CHECK(result.summary.size() == cfg.kernels.size());

  // identical config and seed replays identically (wall clock aside)
  cfg.output_dir = dir.file("out2");
  const ExperimentResult again = run_experiment(cfg);
  for (const auto& kernel : cfg.kernels) {
    for (std::size_t r = 0; r < 2; ++r) {
      const auto& t1 = result.traces.at(kernel)[r];
      const auto& t2 = again.traces.at(kernel)[r];
      REQUIRE(t1.size() == t2.size());
      for (std::size_t k = 0; k < t1.size(); ++k) {
        CHECK(t1[k].joint_log_prob == t2[k].joint_log_prob);
        CHECK(t1[k].num_clusters == t2[k].num_clusters);
        CHECK(t1[k].log_r == t2[k].log_r);
      }
    }
  }
}
