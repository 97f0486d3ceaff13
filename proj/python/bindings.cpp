// Python bindings for the core operations: CRM math, likelihood models,
// IBHC construction, the three MCMC kernels, the exact oracle and the
// diagnostics. Heavy lifting stays in C++; python sees numpy-friendly views.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "tgmcmc/crm.hpp"
#include "tgmcmc/data.hpp"
#include "tgmcmc/diagnostics.hpp"
#include "tgmcmc/ibhc.hpp"
#include "tgmcmc/likelihood.hpp"
#include "tgmcmc/oracle.hpp"
#include "tgmcmc/samplers.hpp"

namespace py = pybind11;
using namespace tgmcmc;

namespace {

struct PyModel {
  std::shared_ptr<const Dataset> data;
  std::shared_ptr<const LikelihoodModel> model;
  std::int64_t size() const { return model->num_points(); }
};

PyModel gaussian_model(const py::array_t<double>& points) {
  auto info = points.request();
  if (info.ndim != 2) throw std::invalid_argument("points must be a 2-d array");
  auto data = std::make_shared<Dataset>();
  data->points.resize(info.shape[0], info.shape[1]);
  const auto view = points.unchecked<2>();
  for (py::ssize_t r = 0; r < info.shape[0]; ++r)
    for (py::ssize_t c = 0; c < info.shape[1]; ++c) data->points(r, c) = view(r, c);
  auto model = std::make_shared<GaussianWishartModel>(
      data, GaussianWishartModel::default_params(*data));
  return PyModel{data, model};
}

PyModel multinomial_model(const std::vector<std::vector<std::pair<int, int>>>& docs,
                          std::int32_t vocab_size, double gamma) {
  auto data = std::make_shared<Dataset>();
  data->vocab_size = vocab_size;
  for (const auto& doc : docs) {
    std::vector<DocEntry> entries;
    for (const auto& [word, count] : doc)
      entries.push_back(DocEntry{static_cast<std::int32_t>(word),
                                 static_cast<std::int32_t>(count)});
    data->docs.push_back(std::move(entries));
  }
  auto model = std::make_shared<DirichletMultinomialModel>(data, gamma);
  return PyModel{data, model};
}

PyModel uci_bow_model(const std::string& path, double gamma) {
  auto data = std::make_shared<Dataset>(read_uci_bow(path));
  auto model = std::make_shared<DirichletMultinomialModel>(data, gamma);
  return PyModel{data, model};
}

// One MCMC chain bound to a model; mirrors the CLI kernels.
class PyChain {
 public:
  PyChain(PyModel model, const CrmPrior& prior, double u, std::uint64_t seed,
          const std::string& init, int ibhc_restarts)
      : holder_(std::move(model)),
        state_(prior, holder_.model.get(), Forest(0), u, seed + 1000) {
    Rng init_rng(seed);
    std::vector<std::int64_t> order = identity_order(holder_.size());
    init_rng.shuffle(order);
    if (init == "ibhc")
      state_.forest = ibhc_build(order, *holder_.model, prior, u, ibhc_restarts, init_rng);
    else if (init == "flat")
      state_.forest = flat_init(order, *holder_.model, prior, u);
    else
      throw std::invalid_argument("init must be 'flat' or 'ibhc'");
  }

  py::dict tgmcmc_step(int G, int D, int u_steps) {
    const auto records = tgmcmc_iteration(state_, TgmcmcOptions{G, D, u_steps});
    double lr_sum = 0.0;
    std::int64_t lr_n = 0;
    int accepts = 0;
    for (const auto& r : records) {
      if (r.kind != MoveKind::Noop && std::isfinite(r.log_r)) {
        lr_sum += r.log_r;
        ++lr_n;
      }
      accepts += r.accepted ? 1 : 0;
    }
    py::dict out;
    out["accepted"] = accepts;
    out["proposals"] = static_cast<int>(records.size());
    if (lr_n > 0) out["mean_log_r"] = lr_sum / static_cast<double>(lr_n);
    return out;
  }

  void gibbs_step(double subset_fraction, int u_steps) {
    GibbsOptions opt;
    opt.subset_fraction = subset_fraction;
    opt.u_steps = u_steps;
    marginal_gibbs_iteration(state_, opt);
  }

  py::dict sm_step(int t_restricted, double subset_fraction, int u_steps) {
    SplitMergeOptions opt;
    opt.t_restricted = t_restricted;
    opt.subset_fraction = subset_fraction;
    opt.u_steps = u_steps;
    const SmOutcome res = split_merge_iteration(state_, opt);
    py::dict out;
    out["kind"] = res.kind == MoveKind::Split ? "split" : "merge";
    out["accepted"] = res.accepted;
    out["log_r"] = res.log_r;
    return out;
  }

  double joint() const { return joint_log_prob(state_); }
  double u() const { return state_.u; }
  std::size_t num_clusters() const { return state_.forest.num_roots(); }
  std::vector<std::int32_t> assignment() const { return state_.forest.assignment(); }

 private:
  PyModel holder_;
  ChainState state_;
};

py::dict exact_posterior_py(const PyModel& model, const CrmPrior& prior, double u,
                            std::int64_t n) {
  const ExactPosterior post = exact_posterior(*model.model, prior, u, n);
  py::dict probs;
  for (const auto& [key, p] : post.probs) {
    py::tuple labels(key.size());
    for (std::size_t i = 0; i < key.size(); ++i) labels[i] = static_cast<int>(key[i]);
    probs[labels] = p;
  }
  py::dict out;
  out["probs"] = probs;
  out["log_normalizer"] = post.log_normalizer;
  out["log_u_terms"] = post.log_u_terms;
  return out;
}

}  // namespace

PYBIND11_MODULE(_tgmcmc, m) {
  m.doc() = "tree-guided MCMC for normalized random measure mixture models";

  py::class_<CrmPrior>(m, "CrmPrior")
      .def_readonly("alpha", &CrmPrior::alpha)
      .def_readonly("sigma", &CrmPrior::sigma)
      .def("__repr__", [](const CrmPrior& p) {
        return p.kind == CrmKind::DirichletProcess
                   ? "CrmPrior(DP, alpha=" + std::to_string(p.alpha) + ")"
                   : "CrmPrior(NGGP, alpha=" + std::to_string(p.alpha)
                         + ", sigma=" + std::to_string(p.sigma) + ")";
      });
  m.def("dp_prior", &CrmPrior::dirichlet, py::arg("alpha") = 1.0);
  m.def("nggp_prior", &CrmPrior::generalized_gamma, py::arg("alpha") = 1.0,
        py::arg("sigma") = 0.5);

  m.def("psi", &crm::psi, py::arg("prior"), py::arg("u"));
  m.def("log_kappa", &crm::log_kappa, py::arg("prior"), py::arg("m"), py::arg("u"));
  m.def("log_kappa_ratio", &crm::log_kappa_ratio, py::arg("prior"), py::arg("m"),
        py::arg("u"));
  m.def("log_levy_density", &crm::log_levy_density, py::arg("prior"), py::arg("w"));
  m.def("log_partition_prior", &crm::log_partition_prior, py::arg("prior"), py::arg("u"),
        py::arg("sizes"), py::arg("n"));

  py::class_<PyModel>(m, "Model").def_property_readonly("n", &PyModel::size);
  m.def("gaussian_model", &gaussian_model, py::arg("points"),
        "Gaussian likelihood with the default Gaussian-Wishart base measure");
  m.def("multinomial_model", &multinomial_model, py::arg("docs"), py::arg("vocab_size"),
        py::arg("gamma") = 0.1,
        "Dirichlet-multinomial likelihood over sparse (word, count) documents");
  m.def("uci_bow_model", &uci_bow_model, py::arg("path"), py::arg("gamma") = 0.1);

  py::class_<PyChain>(m, "Chain")
      .def(py::init<PyModel, const CrmPrior&, double, std::uint64_t, const std::string&,
                    int>(),
           py::arg("model"), py::arg("prior"), py::arg("u") = 1.0, py::arg("seed") = 0,
           py::arg("init") = "flat", py::arg("ibhc_restarts") = 1)
      .def("tgmcmc_step", &PyChain::tgmcmc_step, py::arg("G") = 20, py::arg("D") = 2,
           py::arg("u_steps") = 5)
      .def("gibbs_step", &PyChain::gibbs_step, py::arg("subset_fraction") = 1.0,
           py::arg("u_steps") = 5)
      .def("sm_step", &PyChain::sm_step, py::arg("t_restricted") = 5,
           py::arg("subset_fraction") = 1.0, py::arg("u_steps") = 5)
      .def_property_readonly("joint_log_prob", &PyChain::joint)
      .def_property_readonly("u", &PyChain::u)
      .def_property_readonly("num_clusters", &PyChain::num_clusters)
      .def("assignment", &PyChain::assignment);

  m.def(
      "ibhc_labels",
      [](const PyModel& model, const CrmPrior& prior, double u, int restarts,
         std::uint64_t seed) {
        Rng rng(seed);
        std::vector<std::int64_t> order = identity_order(model.size());
        rng.shuffle(order);
        const Forest f = ibhc_build(order, *model.model, prior, u, restarts, rng);
        return f.assignment();
      },
      py::arg("model"), py::arg("prior"), py::arg("u") = 1.0, py::arg("restarts") = 1,
      py::arg("seed") = 0, "partition labels from an IBHC construction");

  m.def("exact_posterior", &exact_posterior_py, py::arg("model"), py::arg("prior"),
        py::arg("u"), py::arg("n"));

  m.def(
      "ess", [](const std::vector<double>& xs) { return ess(xs); }, py::arg("series"));
  m.def("tv_distance", &tv_distance, py::arg("p"), py::arg("q"));

  m.def(
      "gen_gaussian_mixture",
      [](std::int64_t k, std::int64_t n, std::int64_t d, double separation,
         std::uint64_t seed) {
        const LabeledDataset ds = gen_gaussian_mixture(k, n, d, separation, seed);
        py::array_t<double> points({ds.data.points.rows(), ds.data.points.cols()});
        auto view = points.mutable_unchecked<2>();
        for (py::ssize_t r = 0; r < ds.data.points.rows(); ++r)
          for (py::ssize_t c = 0; c < ds.data.points.cols(); ++c)
            view(r, c) = ds.data.points(r, c);
        return py::make_tuple(points, ds.labels);
      },
      py::arg("k"), py::arg("n"), py::arg("d"), py::arg("separation") = 8.0,
      py::arg("seed") = 0);
  m.def("gen_py_labels", &gen_py_labels, py::arg("n"), py::arg("theta") = 3.0,
        py::arg("discount") = 0.8, py::arg("seed") = 0);
}
