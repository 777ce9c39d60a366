#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "completeness/csv.hpp"
#include "completeness/pipeline.hpp"
#include "completeness/synth.hpp"

namespace py = pybind11;
using namespace completeness;

namespace {

RunConfig make_config(const std::string& domain, const std::string& loss,
                      std::size_t folds, std::uint64_t seed,
                      const std::vector<std::string>& models,
                      std::size_t grid_points, bool refine) {
  RunConfig cfg;
  cfg.domain = parse_domain(domain);
  if (loss == "mse")
    cfg.loss = LossFunction::squared_error();
  else if (loss == "miscls")
    cfg.loss = LossFunction::misclassification();
  else
    throw Error(ErrorCode::Config, "loss must be mse or miscls");
  cfg.folds = folds;
  cfg.seed = seed;
  cfg.models = models;
  if (grid_points) cfg.fit.grid_points_per_dim = grid_points;
  cfg.fit.refine = refine;
  return cfg;
}

py::dict report_to_dict(const Report& report) {
  py::module_ json = py::module_::import("json");
  py::dict out;
  out["machine"] = json.attr("loads")(report.machine.dump());
  out["text"] = report.text;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "completeness benchmarking core";
  m.attr("__version__") = kVersion;

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  m.def("load_csv",
        [](const std::string& path, const std::string& domain) {
          return load_dataset_csv(path, parse_domain(domain));
        },
        py::arg("path"), py::arg("domain"));
  m.def("parse_csv",
        [](const std::string& text, const std::string& domain) {
          return dataset_from_csv(text, parse_domain(domain));
        },
        py::arg("text"), py::arg("domain"));
  m.def("to_csv", &dataset_to_csv, py::arg("dataset"));
  m.def("save_csv", &save_dataset_csv, py::arg("dataset"), py::arg("path"));

  py::class_<Dataset>(m, "Dataset")
      .def("__len__", &Dataset::size)
      .def_property_readonly("domain",
                             [](const Dataset& d) { return domain_name(d.kind); });

  m.def(
      "evaluate",
      [](const Dataset& data, const std::string& domain,
         const std::string& loss, std::size_t folds, std::uint64_t seed,
         const std::vector<std::string>& models, std::size_t grid_points,
         bool refine) {
        RunConfig cfg =
            make_config(domain, loss, folds, seed, models, grid_points, refine);
        return report_to_dict(cmd_evaluate(cfg, data));
      },
      py::arg("data"), py::arg("domain"), py::arg("loss") = "mse",
      py::arg("folds") = 10, py::arg("seed") = 0,
      py::arg("models") = std::vector<std::string>{},
      py::arg("grid_points") = 0, py::arg("refine") = true,
      "Cross-validated completeness table; returns {'machine': ..., 'text': ...}");

  m.def(
      "subsample",
      [](const Dataset& data, const std::string& domain,
         const std::vector<double>& fractions, std::size_t iterations,
         const std::string& target, const std::string& loss, std::size_t folds,
         std::uint64_t seed) {
        RunConfig cfg = make_config(domain, loss, folds, seed, {}, 0, true);
        return report_to_dict(
            cmd_subsample(cfg, data, fractions, iterations, target));
      },
      py::arg("data"), py::arg("domain"), py::arg("fractions"),
      py::arg("iterations") = 10, py::arg("target") = "lookup",
      py::arg("loss") = "mse", py::arg("folds") = 10, py::arg("seed") = 0);

  m.def(
      "features",
      [](const Dataset& data, const std::vector<std::string>& projections,
         const std::string& loss, std::size_t folds, std::uint64_t seed) {
        RunConfig cfg =
            make_config("sequences", loss, folds, seed, {}, 0, true);
        return report_to_dict(cmd_features(cfg, data, projections));
      },
      py::arg("data"),
      py::arg("projections") = std::vector<std::string>{"heads_count",
                                                        "flips_4_7"},
      py::arg("loss") = "mse", py::arg("folds") = 10, py::arg("seed") = 0);

  m.def(
      "filter_subjects",
      [](const Dataset& data, const std::string& method, double param,
         bool cells) {
        FilterOutcome out = cmd_filter_subjects(data, method, param, cells);
        py::dict d;
        d["data"] = out.data;
        d["audit"] = report_to_dict(out.audit);
        return d;
      },
      py::arg("data"), py::arg("method"), py::arg("param") = 0.0,
      py::arg("cells") = false);

  m.def(
      "hetero",
      [](const Dataset& data, std::size_t n_groups,
         std::size_t n_test_subjects, std::size_t n_train_lotteries,
         const std::string& loss, std::uint64_t seed) {
        RunConfig cfg = make_config("risk", loss, 10, seed, {}, 0, true);
        HeteroPlan plan;
        plan.n_groups = n_groups;
        plan.n_test_subjects = n_test_subjects;
        plan.n_train_lotteries = n_train_lotteries;
        plan.seed = seed;
        return report_to_dict(cmd_hetero(cfg, data, plan));
      },
      py::arg("data"), py::arg("n_groups") = 3,
      py::arg("n_test_subjects") = 71, py::arg("n_train_lotteries") = 5,
      py::arg("loss") = "mse", py::arg("seed") = 0);

  m.def(
      "gen_sequences",
      [](const std::string& generator, std::size_t n_strings,
         double param1, double param2, std::uint64_t seed) {
        SeqGenSpec spec;
        spec.n_strings = n_strings;
        spec.seed = seed;
        if (generator == "bernoulli_half") {
          spec.generator = SeqGenSpec::Generator::BernoulliHalf;
        } else if (generator == "rv") {
          spec.generator = SeqGenSpec::Generator::RabinVayanos;
          spec.rv = {param1, param2};
        } else if (generator == "urn") {
          spec.generator = SeqGenSpec::Generator::Urn;
          spec.urn = {int(param1), param2};
        } else {
          throw Error(ErrorCode::Config,
                      "generator must be bernoulli_half, rv, or urn");
        }
        return gen_sequences(spec);
      },
      py::arg("generator") = "bernoulli_half", py::arg("n_strings") = 1000,
      py::arg("param1") = 0.0, py::arg("param2") = 0.0, py::arg("seed") = 0);

  m.def(
      "gen_risk",
      [](std::size_t n_subjects, double ce_noise_sigma, std::uint64_t seed) {
        RiskGenSpec spec;
        spec.n_subjects = n_subjects;
        spec.ce_noise_sigma = ce_noise_sigma;
        spec.seed = seed;
        return gen_risk(spec);
      },
      py::arg("n_subjects") = 100, py::arg("ce_noise_sigma") = 0.0,
      py::arg("seed") = 0);

  m.def(
      "gen_games",
      [](std::size_t n_games, double tau_true, double tremble,
         std::size_t observations_per_game, std::uint64_t seed) {
        GameGenSpec spec;
        spec.n_games = n_games;
        spec.tau_true = tau_true;
        spec.tremble = tremble;
        spec.observations_per_game = observations_per_game;
        spec.seed = seed;
        return gen_games(spec).second;
      },
      py::arg("n_games") = 100, py::arg("tau_true") = 1.5,
      py::arg("tremble") = 0.0, py::arg("observations_per_game") = 10,
      py::arg("seed") = 0);

  m.def("chi_squared_pvalue", &chi_squared_pvalue, py::arg("stat"),
        py::arg("df"));
  m.def("round_percent", &round_percent, py::arg("ratio"));
}
