// Command line front end: evaluate / subsample / features / filter-subjects /
// hetero / synth. Reads CSV data, writes report.json + report.txt.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "completeness/csv.hpp"
#include "completeness/pipeline.hpp"
#include "completeness/synth.hpp"

namespace fs = std::filesystem;
using namespace completeness;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::Generic, "cannot write " + path.string());
  out << content;
}

void emit(const Report& report, const std::string& out_dir) {
  std::cout << report.text;
  if (out_dir.empty()) return;
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "report.json", report.machine.dump(2) + "\n");
  write_file(fs::path(out_dir) / "report.txt", report.text);
}

struct CommonArgs {
  std::string config_path;
  std::string data_path;
  std::string out_dir;
  std::string domain = "sequences";
  std::string loss;
  std::size_t folds = 0;
  std::int64_t seed = -1;
  std::string models;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_data = true) {
  cmd->add_option("--config", args.config_path, "config file (key = value)");
  auto* data = cmd->add_option("--data", args.data_path, "input CSV");
  if (needs_data) data->required();
  cmd->add_option("--out", args.out_dir, "output directory for reports");
  cmd->add_option("--domain", args.domain, "risk | games | sequences");
  cmd->add_option("--loss", args.loss, "mse | miscls");
  cmd->add_option("--folds", args.folds, "number of CV folds");
  cmd->add_option("--seed", args.seed, "RNG seed");
  cmd->add_option("--models", args.models, "comma separated model names");
}

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg;
  bool domain_from_file = false;
  if (!args.config_path.empty()) {
    cfg = load_config_file(args.config_path);
    domain_from_file = true;
  }
  // Command line flags win over the config file.
  if (!domain_from_file || args.domain != "sequences")
    cfg.domain = parse_domain(args.domain);
  if (!args.loss.empty()) {
    if (args.loss == "mse")
      cfg.loss = LossFunction::squared_error();
    else if (args.loss == "miscls")
      cfg.loss = LossFunction::misclassification();
    else
      throw Error(ErrorCode::Config, "loss must be mse or miscls");
  }
  if (args.folds) cfg.folds = args.folds;
  if (args.seed >= 0) cfg.seed = std::uint64_t(args.seed);
  if (!args.models.empty()) {
    cfg.models.clear();
    std::istringstream ms(args.models);
    std::string m;
    while (std::getline(ms, m, ','))
      if (!m.empty()) cfg.models.push_back(m);
  }
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"completeness benchmarking"};
  app.require_subcommand(1);

  // evaluate
  CommonArgs ev_args;
  auto* ev = app.add_subcommand("evaluate",
                                "cross-validated completeness table");
  add_common(ev, ev_args);

  // subsample
  CommonArgs ss_args;
  std::vector<double> fractions = {0.1, 0.25, 0.5, 0.75, 1.0};
  std::size_t iterations = 10;
  std::string target = "lookup";
  auto* ss = app.add_subcommand("subsample", "error vs training-set size");
  add_common(ss, ss_args);
  ss->add_option("--fractions", fractions, "ascending fractions in (0,1]");
  ss->add_option("--iterations", iterations, "subsample draws per fraction");
  ss->add_option("--target", target, "lookup | naive | trees | model name");

  // features
  CommonArgs ft_args;
  std::vector<std::string> projections = {"heads_count", "flips_4_7"};
  auto* ft = app.add_subcommand("features",
                                "compressed lookup projections (sequences)");
  add_common(ft, ft_args);
  ft->add_option("--projections", projections,
                 "heads_count | flips_4_7");

  // filter-subjects
  CommonArgs fl_args;
  std::string method = "repeat_cutoff";
  double param = 0.0;
  bool cells = false;
  std::string filtered_out;
  auto* fl = app.add_subcommand("filter-subjects",
                                "drop inattentive subjects / truncate rounds");
  add_common(fl, fl_args);
  fl->add_option("--method", method,
                 "repeat_cutoff | chi_squared | first_k");
  fl->add_option("--param", param, "method parameter");
  fl->add_flag("--cells", cells, "cell-based chi-squared statistic");
  fl->add_option("--filtered", filtered_out, "path for the filtered CSV");

  // hetero
  CommonArgs ht_args;
  HeteroPlan plan;
  auto* ht = app.add_subcommand("hetero",
                                "subject-heterogeneity analysis (risk)");
  add_common(ht, ht_args);
  ht->add_option("--groups", plan.n_groups, "number of subject groups");
  ht->add_option("--test-subjects", plan.n_test_subjects,
                 "held-out subject count");
  ht->add_option("--train-lotteries", plan.n_train_lotteries,
                 "lotteries used for clustering");

  // synth
  CommonArgs sy_args;
  std::string generator = "bernoulli_half";
  std::size_t n = 0;
  double g_param1 = 0.0, g_param2 = 0.0;
  std::string synth_out;
  auto* sy = app.add_subcommand("synth", "generate a synthetic dataset");
  add_common(sy, sy_args, /*needs_data=*/false);
  sy->add_option("--generator", generator,
                 "risk: cpt; games: pchm; sequences: bernoulli_half | rv | urn");
  sy->add_option("--n", n, "dataset size knob (domain specific)");
  sy->add_option("--param1", g_param1,
                 "first generator parameter (noise / tau / alpha / N)");
  sy->add_option("--param2", g_param2,
                 "second generator parameter (tremble / delta / refresh)");
  sy->add_option("--file", synth_out, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  if (ev->parsed()) {
    RunConfig cfg = resolve_config(ev_args);
    Dataset data = load_dataset_csv(ev_args.data_path, cfg.domain);
    emit(cmd_evaluate(cfg, data), cfg.out_dir);
  } else if (ss->parsed()) {
    RunConfig cfg = resolve_config(ss_args);
    Dataset data = load_dataset_csv(ss_args.data_path, cfg.domain);
    emit(cmd_subsample(cfg, data, fractions, iterations, target), cfg.out_dir);
  } else if (ft->parsed()) {
    RunConfig cfg = resolve_config(ft_args);
    Dataset data = load_dataset_csv(ft_args.data_path, cfg.domain);
    emit(cmd_features(cfg, data, projections), cfg.out_dir);
  } else if (fl->parsed()) {
    RunConfig cfg = resolve_config(fl_args);
    Dataset data = load_dataset_csv(fl_args.data_path, cfg.domain);
    FilterOutcome outcome = cmd_filter_subjects(data, method, param, cells);
    emit(outcome.audit, cfg.out_dir);
    if (!filtered_out.empty())
      save_dataset_csv(outcome.data, filtered_out);
  } else if (ht->parsed()) {
    RunConfig cfg = resolve_config(ht_args);
    plan.seed = cfg.seed;
    Dataset data = load_dataset_csv(ht_args.data_path, cfg.domain);
    emit(cmd_hetero(cfg, data, plan), cfg.out_dir);
  } else if (sy->parsed()) {
    RunConfig cfg = resolve_config(sy_args);
    Dataset data;
    if (cfg.domain == ProblemKind::Risk) {
      RiskGenSpec spec;
      spec.seed = cfg.seed;
      if (n) spec.n_subjects = n;
      spec.ce_noise_sigma = g_param1;
      // A risk-averse, probability-distorting population; the EV-neutral
      // default would make the naive benchmark unbeatable.
      spec.subject_types = {{CptParams{0.8, 1.0, 0.7, 0.65}, 1.0}};
      data = gen_risk(spec);
    } else if (cfg.domain == ProblemKind::Games) {
      GameGenSpec spec;
      spec.seed = cfg.seed;
      if (n) spec.n_games = n;
      if (g_param1 > 0.0) spec.tau_true = g_param1;
      spec.tremble = g_param2;
      data = gen_games(spec).second;
    } else if (cfg.domain == ProblemKind::Sequences) {
      SeqGenSpec spec;
      spec.seed = cfg.seed;
      if (n) spec.n_strings = n;
      if (generator == "bernoulli_half") {
        spec.generator = SeqGenSpec::Generator::BernoulliHalf;
      } else if (generator == "rv") {
        spec.generator = SeqGenSpec::Generator::RabinVayanos;
        spec.rv = {g_param1, g_param2};
      } else if (generator == "urn") {
        spec.generator = SeqGenSpec::Generator::Urn;
        spec.urn = {int(g_param1), g_param2};
      } else {
        throw Error(ErrorCode::Config, "unknown generator '" + generator + "'");
      }
      data = gen_sequences(spec);
    } else {
      throw Error(ErrorCode::Config, "synth needs a concrete domain");
    }
    save_dataset_csv(data, synth_out);
    std::cout << "wrote " << data.size() << " rows to " << synth_out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
