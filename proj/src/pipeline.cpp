#include "completeness/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "completeness/lookup.hpp"
#include "completeness/models_games.hpp"
#include "completeness/models_risk.hpp"
#include "completeness/models_seq.hpp"
#include "completeness/trees.hpp"

namespace completeness {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

ProblemKind parse_domain(const std::string& name) {
  if (name == "risk") return ProblemKind::Risk;
  if (name == "games") return ProblemKind::Games;
  if (name == "sequences") return ProblemKind::Sequences;
  if (name == "custom") return ProblemKind::Custom;
  throw Error(ErrorCode::Config, "unknown domain '" + name + "'");
}

std::string domain_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Risk: return "risk";
    case ProblemKind::Games: return "games";
    case ProblemKind::Sequences: return "sequences";
    default: return "custom";
  }
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, std::size_t line_no) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::Config,
              "line " + std::to_string(line_no) + ": expected a boolean, got '" +
                  v + "'");
}

double parse_real(const std::string& v, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Config, "line " + std::to_string(line_no) +
                                       ": expected a number, got '" + v + "'");
  }
}

bool is_bound_override(const std::string& key) {
  // <model>.<param>.{lower|upper}
  auto first = key.find('.');
  auto last = key.rfind('.');
  if (first == std::string::npos || first == last) return false;
  std::string tail = key.substr(last + 1);
  return tail == "lower" || tail == "upper";
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Config, "line " + std::to_string(line_no) +
                                         ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "domain") {
      cfg.domain = parse_domain(value);
    } else if (key == "loss") {
      if (value == "mse")
        cfg.loss = LossFunction::squared_error();
      else if (value == "miscls")
        cfg.loss = LossFunction::misclassification();
      else
        throw Error(ErrorCode::Config, "line " + std::to_string(line_no) +
                                           ": loss must be mse or miscls");
    } else if (key == "folds") {
      cfg.folds = std::size_t(parse_real(value, line_no));
    } else if (key == "seed") {
      cfg.seed = std::uint64_t(parse_real(value, line_no));
    } else if (key == "models") {
      cfg.models.clear();
      std::istringstream ms(value);
      std::string m;
      while (std::getline(ms, m, ',')) {
        m = trim(m);
        if (!m.empty()) cfg.models.push_back(m);
      }
    } else if (key == "grid_points") {
      cfg.fit.grid_points_per_dim = std::size_t(parse_real(value, line_no));
    } else if (key == "refine") {
      cfg.fit.refine = parse_bool(value, line_no);
    } else if (key == "refine_max_iters") {
      cfg.fit.refine_max_iters = std::size_t(parse_real(value, line_no));
    } else if (key == "refine_tolerance") {
      cfg.fit.refine_tolerance = parse_real(value, line_no);
    } else if (key == "observation_weighted") {
      cfg.observation_weighted = parse_bool(value, line_no);
    } else if (key == "stratify") {
      cfg.stratify_by_instance = parse_bool(value, line_no);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (is_bound_override(key)) {
      cfg.bound_overrides[key] = parse_real(value, line_no);
    } else {
      throw Error(ErrorCode::Config, "line " + std::to_string(line_no) +
                                         ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Config, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::map<std::string, std::string> RunConfig::echo() const {
  std::map<std::string, std::string> e;
  e["domain"] = domain_name(domain);
  e["loss"] = loss.kind == LossFunction::Kind::SquaredError ? "mse" : "miscls";
  e["folds"] = std::to_string(folds);
  e["seed"] = std::to_string(seed);
  std::string model_list;
  for (const auto& m : models) model_list += (model_list.empty() ? "" : ",") + m;
  e["models"] = model_list;
  e["grid_points"] = std::to_string(fit.grid_points_per_dim);
  e["refine"] = fit.refine ? "true" : "false";
  e["refine_max_iters"] = std::to_string(fit.refine_max_iters);
  std::ostringstream tol;
  tol << fit.refine_tolerance;
  e["refine_tolerance"] = tol.str();
  e["observation_weighted"] = observation_weighted ? "true" : "false";
  e["stratify"] = stratify_by_instance ? "true" : "false";
  for (const auto& [k, v] : bound_overrides) {
    std::ostringstream val;
    val << v;
    e[k] = val.str();
  }
  return e;
}

// ---------------------------------------------------------------------------
// Model selection
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> default_models(ProblemKind domain) {
  switch (domain) {
    case ProblemKind::Risk: return {"eu", "cpt"};
    case ProblemKind::Games: return {"pchm"};
    case ProblemKind::Sequences: return {"urn", "rv"};
    default: return {};
  }
}

void apply_overrides(ModelClass& model,
                     const std::map<std::string, double>& overrides) {
  for (auto& param : model.params) {
    auto lo = overrides.find(model.name + "." + param.name + ".lower");
    if (lo != overrides.end()) param.lower = lo->second;
    auto hi = overrides.find(model.name + "." + param.name + ".upper");
    if (hi != overrides.end()) param.upper = hi->second;
  }
}

// Short CLI aliases map onto the model-class names used for overrides.
ModelClass model_class_by_name(const std::string& name, const RunConfig& cfg) {
  ModelClass model;
  if (name == "eu")
    model = eu_model_class();
  else if (name == "cpt")
    model = cpt_model_class();
  else if (name == "pchm")
    model = pchm_model_class();
  else if (name == "rv")
    model = rv_model_class(cfg.loss.kind);
  else if (name == "urn")
    model = urn_model_class(cfg.loss.kind);
  else
    throw Error(ErrorCode::Config, "unknown model '" + name + "'");
  apply_overrides(model, cfg.bound_overrides);
  return model;
}

}  // namespace

std::vector<std::unique_ptr<Trainer>> build_model_trainers(
    const RunConfig& cfg) {
  std::vector<std::string> names =
      cfg.models.empty() ? default_models(cfg.domain) : cfg.models;
  std::vector<std::unique_ptr<Trainer>> trainers;
  for (const auto& name : names) {
    if (name == "trees") {
      TreeConfig tree_cfg;
      tree_cfg.seed = cfg.seed;
      trainers.push_back(std::make_unique<BaggedTreesTrainer>(tree_cfg));
    } else {
      trainers.push_back(
          std::make_unique<ModelTrainer>(model_class_by_name(name, cfg),
                                         cfg.fit));
    }
  }
  return trainers;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

int round_percent(double ratio) {
  return int(std::llround(100.0 * ratio));
}

namespace {

int error_decimals(ProblemKind domain) {
  switch (domain) {
    case ProblemKind::Risk: return 2;
    case ProblemKind::Games: return 2;
    default: return 4;
  }
}

std::string fixed(double v, int decimals) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << v;
  return out.str();
}

json cv_to_json(const CvResult& cv) {
  json j;
  j["per_fold_errors"] = cv.per_fold_errors;
  j["mean_error"] = cv.mean_error;
  j["std_error"] = cv.std_error;
  j["fitted_parameters"] = cv.fitted_parameters;
  j["param_names"] = cv.param_names;
  j["unseen_key_rate"] = cv.unseen_key_rate;
  return j;
}

json base_report(const RunConfig& cfg, const std::string& command) {
  json j;
  j["command"] = command;
  j["config"] = cfg.echo();
  j["seed"] = cfg.seed;
  j["version"] = kVersion;
  return j;
}

std::string table_header(const RunConfig& cfg, const std::string& command) {
  std::ostringstream out;
  out << "# " << command;
  for (const auto& [k, v] : cfg.echo())
    if (!v.empty()) out << " " << k << "=" << v;
  out << " version=" << kVersion << "\n";
  return out.str();
}

struct TableRow {
  std::string name;
  std::string error;
  std::string se;
  std::string completeness;
};

std::string render_table(const std::vector<TableRow>& rows) {
  std::size_t w0 = 5, w1 = 5, w2 = 4;
  for (const auto& r : rows) {
    w0 = std::max(w0, r.name.size());
    w1 = std::max(w1, r.error.size());
    w2 = std::max(w2, r.se.size());
  }
  std::ostringstream out;
  out << std::left << std::setw(int(w0) + 2) << "Model"
      << std::setw(int(w1) + 2) << "Error" << std::setw(int(w2) + 2) << "(SE)"
      << "Completeness\n";
  for (const auto& r : rows)
    out << std::left << std::setw(int(w0) + 2) << r.name
        << std::setw(int(w1) + 2) << r.error << std::setw(int(w2) + 2) << r.se
        << r.completeness << "\n";
  return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

Report cmd_evaluate(const RunConfig& cfg, const Dataset& data) {
  data.validate();
  FoldPlan plan;
  if (cfg.stratify_by_instance) {
    std::vector<std::string> strata;
    for (const auto& obs : data.observations)
      strata.push_back(obs.instance_id.value_or(""));
    plan = make_stratified_folds(strata, cfg.folds, cfg.seed);
  } else {
    plan = make_folds(data.size(), cfg.folds, cfg.seed);
  }
  CvOptions cv_opts{cfg.observation_weighted};

  FixedRuleTrainer naive(naive_rule(cfg.domain));
  CvResult naive_cv = cross_validate(naive, data, cfg.loss, plan, cv_opts);

  LookupTrainer lookup(default_lookup_spec(cfg.domain, cfg.loss));
  CvResult lookup_cv = cross_validate(lookup, data, cfg.loss, plan, cv_opts);

  json j = base_report(cfg, "evaluate");
  j["fold_plan"] = {{"K", plan.K}, {"seed", plan.seed}};
  j["n_observations"] = data.size();
  j["naive"] = cv_to_json(naive_cv);
  j["naive"]["name"] = naive.name();
  j["lookup"] = cv_to_json(lookup_cv);
  json warnings = json::array();
  json notes = json::array();
  if (cfg.domain == ProblemKind::Risk)
    notes.push_back(
        "EU uses the sign-preserving power utility on loss lotteries; CPT "
        "uses the loss branch v(z) = -((-z)^beta)");

  const int dec = error_decimals(cfg.domain);
  std::vector<TableRow> rows;
  rows.push_back({naive.name(), fixed(naive_cv.mean_error, dec),
                  "(" + fixed(naive_cv.std_error, dec) + ")", "0%"});

  json model_entries = json::array();
  auto trainers = build_model_trainers(cfg);
  for (const auto& trainer : trainers) {
    CvResult cv = cross_validate(*trainer, data, cfg.loss, plan, cv_opts);
    double ratio = completeness_ratio(naive_cv.mean_error, cv.mean_error,
                                      lookup_cv.mean_error);
    bool outside = ratio < 0.0 || ratio > 1.0;
    if (outside)
      warnings.push_back("completeness of " + trainer->name() +
                         " outside [0,1]");
    json entry = cv_to_json(cv);
    entry["name"] = trainer->name();
    entry["completeness"] = ratio;
    entry["outside_unit_interval"] = outside;
    model_entries.push_back(entry);
    rows.push_back({trainer->name(), fixed(cv.mean_error, dec),
                    "(" + fixed(cv.std_error, dec) + ")",
                    std::to_string(round_percent(ratio)) + "%" +
                        (outside ? " *" : "")});
  }
  j["models"] = model_entries;
  if (lookup_cv.unseen_key_rate > 0.0)
    warnings.push_back("lookup fell back to the naive rule on " +
                       std::to_string(lookup_cv.unseen_key_rate * 100.0) +
                       "% of test observations");
  j["warnings"] = warnings;
  j["notes"] = notes;

  rows.push_back({"table_lookup", fixed(lookup_cv.mean_error, dec),
                  "(" + fixed(lookup_cv.std_error, dec) + ")", "100%"});

  Report report;
  report.machine = std::move(j);
  report.text = table_header(cfg, "evaluate") + render_table(rows);
  return report;
}

Report cmd_subsample(const RunConfig& cfg, const Dataset& data,
                     const std::vector<double>& fractions,
                     std::size_t iterations, const std::string& target) {
  data.validate();
  std::unique_ptr<Trainer> trainer;
  if (target == "lookup") {
    trainer = std::make_unique<LookupTrainer>(
        default_lookup_spec(cfg.domain, cfg.loss));
  } else if (target == "naive") {
    trainer = std::make_unique<FixedRuleTrainer>(naive_rule(cfg.domain));
  } else if (target == "trees") {
    TreeConfig tree_cfg;
    tree_cfg.seed = cfg.seed;
    trainer = std::make_unique<BaggedTreesTrainer>(tree_cfg);
  } else {
    trainer = std::make_unique<ModelTrainer>(model_class_by_name(target, cfg),
                                             cfg.fit);
  }

  auto curve = subsample_curve(*trainer, data, cfg.loss, fractions, iterations,
                               cfg.folds, cfg.seed);

  json j = base_report(cfg, "subsample");
  j["target"] = target;
  j["iterations"] = iterations;
  json points = json::array();
  const int dec = error_decimals(cfg.domain);
  std::ostringstream text;
  text << table_header(cfg, "subsample");
  text << std::left << std::setw(8) << "x%" << std::setw(12) << "Error"
       << "(Std)\n";
  for (const auto& pt : curve) {
    points.push_back({{"fraction", pt.fraction},
                      {"mean_error", pt.mean_error},
                      {"std", pt.std_across_iterations}});
    text << std::left << std::setw(8)
         << (std::to_string(round_percent(pt.fraction)) + "%") << std::setw(12)
         << fixed(pt.mean_error, dec) << "("
         << fixed(pt.std_across_iterations, dec) << ")\n";
  }
  j["curve"] = points;

  Report report;
  report.machine = std::move(j);
  report.text = text.str();
  return report;
}

Report cmd_features(const RunConfig& cfg, const Dataset& data,
                    const std::vector<std::string>& projections) {
  if (cfg.domain != ProblemKind::Sequences)
    throw Error(ErrorCode::Config,
                "feature-set comparison is defined for the sequences domain");
  data.validate();
  FoldPlan plan = make_folds(data.size(), cfg.folds, cfg.seed);
  CvOptions cv_opts{cfg.observation_weighted};

  FixedRuleTrainer naive(naive_rule(cfg.domain));
  CvResult naive_cv = cross_validate(naive, data, cfg.loss, plan, cv_opts);

  auto spec_for = [&](const std::string& name) {
    LookupSpec spec = default_lookup_spec(cfg.domain, cfg.loss);
    spec.name = name;
    if (name == "full")
      spec.key_fn = identity_key_fn();
    else if (name == "heads_count")
      spec.key_fn = projection_number_of_heads();
    else if (name == "flips_4_7")
      spec.key_fn = projection_flips_4_to_7();
    else
      throw Error(ErrorCode::Config, "unknown projection '" + name + "'");
    return spec;
  };

  CvResult full_cv =
      cross_validate(LookupTrainer(spec_for("full")), data, cfg.loss, plan,
                     cv_opts);

  json j = base_report(cfg, "features");
  j["naive"] = cv_to_json(naive_cv);
  j["full_lookup"] = cv_to_json(full_cv);
  json entries = json::array();

  const int dec = error_decimals(cfg.domain);
  std::vector<TableRow> rows;
  rows.push_back({"naive_benchmark", fixed(naive_cv.mean_error, dec),
                  "(" + fixed(naive_cv.std_error, dec) + ")", "0%"});
  for (const auto& name : projections) {
    if (name == "full") continue;
    CvResult cv = cross_validate(LookupTrainer(spec_for(name)), data, cfg.loss,
                                 plan, cv_opts);
    double ratio = completeness_ratio(naive_cv.mean_error, cv.mean_error,
                                      full_cv.mean_error);
    json entry = cv_to_json(cv);
    entry["name"] = name;
    entry["completeness"] = ratio;
    entries.push_back(entry);
    rows.push_back({name, fixed(cv.mean_error, dec),
                    "(" + fixed(cv.std_error, dec) + ")",
                    std::to_string(round_percent(ratio)) + "%"});
  }
  j["projections"] = entries;
  rows.push_back({"full_table_lookup", fixed(full_cv.mean_error, dec),
                  "(" + fixed(full_cv.std_error, dec) + ")", "100%"});

  Report report;
  report.machine = std::move(j);
  report.text = table_header(cfg, "features") + render_table(rows);
  return report;
}

Report cmd_hetero(const RunConfig& cfg, const Dataset& data,
                  const HeteroPlan& plan) {
  if (cfg.domain != ProblemKind::Risk)
    throw Error(ErrorCode::Config,
                "heterogeneity analysis is defined for the risk domain");
  data.validate();

  std::vector<std::string> names =
      cfg.models.empty() ? default_models(cfg.domain) : cfg.models;
  std::vector<ModelClass> models;
  for (const auto& name : names)
    models.push_back(model_class_by_name(name, cfg));

  HeteroResult result =
      hetero_evaluate(data, plan, models, cfg.loss, cfg.fit);

  json j = base_report(cfg, "hetero");
  j["plan"] = {{"n_groups", plan.n_groups},
               {"n_test_subjects", plan.n_test_subjects},
               {"n_train_lotteries", plan.n_train_lotteries},
               {"seed", plan.seed}};
  j["train_lottery_ids"] = result.train_lottery_ids;
  j["dropped_subjects"] = result.dropped_subjects;
  j["lookup_fallbacks"] = result.lookup_fallbacks;
  j["naive"] = cv_to_json(result.report.naive);
  j["lookup"] = cv_to_json(result.report.lookup);

  const int dec = error_decimals(cfg.domain);
  std::vector<TableRow> rows;
  rows.push_back({"naive_benchmark", fixed(result.report.naive.mean_error, dec),
                  "(" + fixed(result.report.naive.std_error, dec) + ")", "0%"});
  json entries = json::array();
  for (const auto& mc : result.report.models) {
    json entry = cv_to_json(mc.cv);
    entry["name"] = mc.name;
    entry["completeness"] = mc.completeness;
    entry["outside_unit_interval"] = mc.outside_unit_interval;
    entries.push_back(entry);
    rows.push_back({mc.name, fixed(mc.cv.mean_error, dec),
                    "(" + fixed(mc.cv.std_error, dec) + ")",
                    std::to_string(round_percent(mc.completeness)) + "%" +
                        (mc.outside_unit_interval ? " *" : "")});
  }
  j["models"] = entries;
  rows.push_back({"group_table_lookup",
                  fixed(result.report.lookup.mean_error, dec),
                  "(" + fixed(result.report.lookup.std_error, dec) + ")",
                  "100%"});

  Report report;
  report.machine = std::move(j);
  report.text = table_header(cfg, "hetero") + render_table(rows);
  return report;
}

// ---------------------------------------------------------------------------
// Subject filtering
// ---------------------------------------------------------------------------

namespace {

// Regularized upper incomplete gamma Q(a, x) via series / continued fraction.
double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0)
    throw Error(ErrorCode::Generic, "gamma_q: invalid arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // P(a,x) series, Q = 1 - P.
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-14) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
  }
  // Lentz continued fraction for Q.
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

struct SubjectRows {
  std::vector<std::size_t> rows;  // indices into the dataset
};

std::map<std::string, SubjectRows> group_by_subject(const Dataset& data) {
  std::map<std::string, SubjectRows> groups;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& obs = data.observations[i];
    if (!obs.subject_id)
      throw Error(ErrorCode::Schema,
                  "subject filtering needs subject ids on every row");
    groups[*obs.subject_id].rows.push_back(i);
  }
  return groups;
}

std::string full_string(const Observation& obs) {
  std::string s;
  for (std::size_t f = 0; f < obs.x.size(); ++f)
    s += real_feature(obs.x, f) == 1.0 ? 'H' : 'T';
  s += obs.y.value == 1.0 ? 'H' : 'T';
  return s;
}

}  // namespace

double chi_squared_pvalue(double stat, double df) {
  return gamma_q(df / 2.0, stat / 2.0);
}

FilterOutcome cmd_filter_subjects(const Dataset& data,
                                  const std::string& method, double param,
                                  bool cells) {
  data.validate();
  auto groups = group_by_subject(data);

  std::set<std::string> dropped;
  json detail = json::array();
  std::vector<bool> keep_row(data.size(), true);

  if (method == "repeat_cutoff") {
    std::size_t cutoff = param > 0.0 ? std::size_t(param) : 5;
    for (const auto& [subject, sr] : groups) {
      std::map<std::string, std::size_t> counts;
      for (auto i : sr.rows) ++counts[full_string(data.observations[i])];
      std::size_t top = 0;
      for (const auto& [s, c] : counts) top = std::max(top, c);
      if (top > cutoff) {
        dropped.insert(subject);
        detail.push_back({{"subject", subject}, {"max_repeats", top}});
      }
    }
  } else if (method == "chi_squared") {
    std::size_t drop_n = std::size_t(param);
    std::vector<std::pair<double, std::string>> pvalues;
    for (const auto& [subject, sr] : groups) {
      double n = double(sr.rows.size());
      double stat = 0.0, df = 0.0;
      if (cells) {
        // Full string histogram.
        std::map<std::string, std::size_t> counts;
        std::size_t n_cells = std::size_t(1)
                              << (data.observations.front().x.size() + 1);
        for (auto i : sr.rows) ++counts[full_string(data.observations[i])];
        double expected = n / double(n_cells);
        double observed_sq = 0.0;
        for (const auto& [s, c] : counts) observed_sq += double(c) * double(c);
        // sum over all cells of (obs-e)^2/e, empty cells contribute e each
        stat = observed_sq / expected - 2.0 * n + double(n_cells) * expected;
        df = double(n_cells - 1);
      } else {
        // Position-wise head counts vs Binomial(n, 0.5).
        std::size_t positions = data.observations.front().x.size() + 1;
        std::vector<double> heads(positions, 0.0);
        for (auto i : sr.rows) {
          const auto& obs = data.observations[i];
          for (std::size_t f = 0; f < obs.x.size(); ++f)
            heads[f] += real_feature(obs.x, f);
          heads[positions - 1] += obs.y.value;
        }
        for (double c : heads) stat += (c - n / 2.0) * (c - n / 2.0) / (n / 4.0);
        df = double(positions);
      }
      double p = chi_squared_pvalue(stat, df);
      pvalues.emplace_back(p, subject);
      detail.push_back(
          {{"subject", subject}, {"chi2", stat}, {"p_value", p}});
    }
    std::sort(pvalues.begin(), pvalues.end());
    for (std::size_t i = 0; i < std::min(drop_n, pvalues.size()); ++i)
      dropped.insert(pvalues[i].second);
  } else if (method == "first_k") {
    std::size_t k = param > 0.0 ? std::size_t(param) : 25;
    for (const auto& [subject, sr] : groups) {
      std::vector<std::pair<double, std::size_t>> rounds;
      for (auto i : sr.rows) {
        const auto& obs = data.observations[i];
        if (!obs.instance_id)
          throw Error(ErrorCode::Schema,
                      "first_k filtering needs round indices on every row");
        rounds.emplace_back(std::stod(*obs.instance_id), i);
      }
      std::stable_sort(rounds.begin(), rounds.end(),
                       [](const auto& a, const auto& b) {
                         return a.first < b.first;
                       });
      for (std::size_t r = k; r < rounds.size(); ++r)
        keep_row[rounds[r].second] = false;
    }
  } else {
    throw Error(ErrorCode::Config, "unknown filter method '" + method + "'");
  }

  FilterOutcome outcome;
  outcome.data.kind = data.kind;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!keep_row[i]) continue;
    if (dropped.count(*data.observations[i].subject_id)) continue;
    outcome.data.observations.push_back(data.observations[i]);
  }

  json j;
  j["command"] = "filter_subjects";
  j["method"] = method;
  j["param"] = param;
  j["subjects_before"] = groups.size();
  j["subjects_dropped"] = dropped.size();
  j["rows_before"] = data.size();
  j["rows_after"] = outcome.data.size();
  j["dropped_subjects"] = std::vector<std::string>(dropped.begin(),
                                                   dropped.end());
  j["detail"] = detail;
  outcome.audit.machine = std::move(j);
  std::ostringstream text;
  text << "# filter_subjects method=" << method << " param=" << param << "\n"
       << "subjects: " << groups.size() << " -> "
       << groups.size() - dropped.size() << "\n"
       << "rows: " << data.size() << " -> " << outcome.data.size() << "\n";
  outcome.audit.text = text.str();
  return outcome;
}

}  // namespace completeness
