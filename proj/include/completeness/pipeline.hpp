#pragma once

#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "completeness/core.hpp"
#include "completeness/eval.hpp"
#include "completeness/fitting.hpp"
#include "completeness/hetero.hpp"

namespace completeness {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  ProblemKind domain = ProblemKind::Sequences;
  LossFunction loss = LossFunction::squared_error();
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> models;  // empty = domain defaults
  FitConfig fit;
  bool observation_weighted = false;
  bool stratify_by_instance = false;
  std::string out_dir;
  // "<model>.<param>.lower" / "<model>.<param>.upper" -> bound override.
  std::map<std::string, double> bound_overrides;

  // Fully-resolved key/value echo, included in every report.
  std::map<std::string, std::string> echo() const;
};

// Plain-text configuration, one `key = value` per line, `#` comments.
// Unknown keys are rejected with the offending line number.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

ProblemKind parse_domain(const std::string& name);
std::string domain_name(ProblemKind kind);

struct Report {
  nlohmann::json machine;  // never rounded
  std::string text;        // rounded rendering
};

// Trainers for the requested model names (empty = domain defaults), with
// bound overrides applied.
std::vector<std::unique_ptr<Trainer>> build_model_trainers(
    const RunConfig& cfg);

Report cmd_evaluate(const RunConfig& cfg, const Dataset& data);
Report cmd_subsample(const RunConfig& cfg, const Dataset& data,
                     const std::vector<double>& fractions,
                     std::size_t iterations,
                     const std::string& target = "lookup");
Report cmd_features(const RunConfig& cfg, const Dataset& data,
                    const std::vector<std::string>& projections);
Report cmd_hetero(const RunConfig& cfg, const Dataset& data,
                  const HeteroPlan& plan);

struct FilterOutcome {
  Dataset data;
  Report audit;
};
// method: repeat_cutoff (param = max repeats, default 5),
//         chi_squared (param = number of subjects to drop; the cell-based
//         statistic sits behind `cells`),
//         first_k (param = strings kept per subject, default 25).
FilterOutcome cmd_filter_subjects(const Dataset& data,
                                  const std::string& method, double param,
                                  bool cells = false);

// Upper-tail probability of a chi-squared variate.
double chi_squared_pvalue(double stat, double df);

// Half-away-from-zero integer percentage of a ratio.
int round_percent(double ratio);

}  // namespace completeness
