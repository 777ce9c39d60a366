#include "completeness/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "completeness/lookup.hpp"
#include "completeness/parallel.hpp"

namespace completeness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Training loss evaluator compressed over unique feature vectors. Model
// rules are deterministic in x, so the per-key sufficient statistics give
// the exact mean loss while evaluating each candidate rule once per key.
class CompressedObjective {
 public:
  CompressedObjective(const Dataset& train, const LossFunction& loss)
      : loss_kind_(loss.kind), n_(train.size()) {
    std::map<FeatureKey, Group> groups;
    for (const auto& obs : train.observations) {
      auto& g = groups[canonical_key(obs.x)];
      if (g.count == 0) g.x = obs.x;
      ++g.count;
      if (loss_kind_ == LossFunction::Kind::SquaredError) {
        g.sum_y += obs.y.value;
        g.sum_y2 += obs.y.value * obs.y.value;
      } else {
        ++g.label_counts[outcome_label(obs.y)];
      }
    }
    for (auto& [key, g] : groups) groups_.push_back(std::move(g));
  }

  // Mean training loss of the rule; infinity when the rule cannot be
  // built or produces NaN.
  double operator()(const ModelClass& model,
                    const std::vector<double>& params) const {
    PredictionRule rule;
    try {
      rule = model.build(params);
    } catch (const std::exception&) {
      return kInf;
    }
    double total = 0.0;
    for (const auto& g : groups_) {
      Outcome pred = rule(g.x);
      if (std::isnan(pred.value)) return kInf;
      if (loss_kind_ == LossFunction::Kind::SquaredError) {
        total += double(g.count) * pred.value * pred.value -
                 2.0 * pred.value * g.sum_y + g.sum_y2;
      } else {
        int label = outcome_label(pred);
        auto it = g.label_counts.find(label);
        std::size_t hits = it == g.label_counts.end() ? 0 : it->second;
        total += double(g.count - hits);
      }
    }
    return total / double(n_);
  }

 private:
  struct Group {
    FeatureVector x;
    std::size_t count = 0;
    double sum_y = 0.0;
    double sum_y2 = 0.0;
    std::map<int, std::size_t> label_counts;
  };
  LossFunction::Kind loss_kind_;
  std::size_t n_;
  std::vector<Group> groups_;
};

std::vector<std::vector<double>> grid_values(const ModelClass& model,
                                             std::size_t points_per_dim) {
  std::vector<std::vector<double>> values;
  for (const auto& spec : model.params) {
    if (!(spec.lower <= spec.upper) || !std::isfinite(spec.lower) ||
        !std::isfinite(spec.upper))
      throw Error(ErrorCode::Config,
                  "parameter '" + spec.name + "' has invalid bounds");
    std::vector<double> vals;
    if (spec.integral) {
      for (double v = spec.lower; v <= spec.upper + 1e-9; v += spec.step)
        vals.push_back(v);
    } else if (spec.lower == spec.upper) {
      vals.push_back(spec.lower);
    } else {
      for (std::size_t i = 0; i < points_per_dim; ++i)
        vals.push_back(spec.lower + (spec.upper - spec.lower) * double(i) /
                                        double(points_per_dim - 1));
    }
    values.push_back(std::move(vals));
  }
  return values;
}

struct GridScan {
  std::vector<double> best_point;
  double best_loss = kInf;
  std::size_t evaluations = 0;
};

GridScan scan_grid(const ModelClass& model, const CompressedObjective& obj,
                   const std::vector<std::vector<double>>& values) {
  std::size_t total = 1;
  for (const auto& v : values) total *= v.size();

  std::vector<double> losses(total);
  parallel_for(total, [&](std::size_t idx) {
    std::vector<double> point(values.size());
    std::size_t rem = idx;
    for (std::size_t d = values.size(); d-- > 0;) {
      point[d] = values[d][rem % values[d].size()];
      rem /= values[d].size();
    }
    losses[idx] = obj(model, point);
  });

  GridScan scan;
  scan.evaluations = total;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (losses[idx] < scan.best_loss) {  // strict: first minimum wins ties
      scan.best_loss = losses[idx];
      scan.best_point.resize(values.size());
      std::size_t rem = idx;
      for (std::size_t d = values.size(); d-- > 0;) {
        scan.best_point[d] = values[d][rem % values[d].size()];
        rem /= values[d].size();
      }
    }
  }
  if (!std::isfinite(scan.best_loss))
    throw Error(ErrorCode::Generic,
                "fit: every grid point failed for model '" + model.name + "'");
  return scan;
}

// Bounded Nelder-Mead on the continuous coordinates; candidate points are
// clamped into the box before evaluation.
struct SimplexResult {
  std::vector<double> point;
  double loss = kInf;
  std::size_t evaluations = 0;
};

SimplexResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const std::vector<double>& lo,
    const std::vector<double>& hi, std::size_t max_iters, double tol) {
  const std::size_t dim = x0.size();
  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t d = 0; d < dim; ++d)
      x[d] = std::clamp(x[d], lo[d], hi[d]);
  };

  std::size_t evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };

  std::vector<std::vector<double>> verts(dim + 1, x0);
  for (std::size_t d = 0; d < dim; ++d) {
    double h = 0.1 * (hi[d] - lo[d]);
    if (h == 0.0) h = 0.05;
    if (x0[d] + h > hi[d]) h = -h;
    verts[d + 1][d] += h;
    clamp(verts[d + 1]);
  }
  std::vector<double> fv(dim + 1);
  for (std::size_t v = 0; v <= dim; ++v) fv[v] = eval(verts[v]);

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    std::vector<std::size_t> order(dim + 1);
    for (std::size_t v = 0; v <= dim; ++v) order[v] = v;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::size_t best = order[0], worst = order[dim],
                second_worst = order[dim - 1];

    if (fv[worst] - fv[best] <= tol * (std::abs(fv[best]) + 1e-12)) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v <= dim; ++v) {
      if (v == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += verts[v][d];
    }
    for (double& c : centroid) c /= double(dim);

    auto blend = [&](double coef) {
      std::vector<double> x(dim);
      for (std::size_t d = 0; d < dim; ++d)
        x[d] = centroid[d] + coef * (centroid[d] - verts[worst][d]);
      clamp(x);
      return x;
    };

    std::vector<double> xr = blend(1.0);
    double fr = eval(xr);
    if (fr < fv[best]) {
      std::vector<double> xe = blend(2.0);
      double fe = eval(xe);
      if (fe < fr) {
        verts[worst] = xe;
        fv[worst] = fe;
      } else {
        verts[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second_worst]) {
      verts[worst] = xr;
      fv[worst] = fr;
    } else {
      std::vector<double> xc = blend(fr < fv[worst] ? 0.5 : -0.5);
      double fc = eval(xc);
      if (fc < std::min(fr, fv[worst])) {
        verts[worst] = xc;
        fv[worst] = fc;
      } else {
        // shrink toward the best vertex
        for (std::size_t v = 0; v <= dim; ++v) {
          if (v == best) continue;
          for (std::size_t d = 0; d < dim; ++d)
            verts[v][d] = verts[best][d] + 0.5 * (verts[v][d] - verts[best][d]);
          clamp(verts[v]);
          fv[v] = eval(verts[v]);
        }
      }
    }
  }

  SimplexResult result;
  result.evaluations = evals;
  std::size_t best = 0;
  for (std::size_t v = 1; v <= dim; ++v)
    if (fv[v] < fv[best]) best = v;
  result.point = verts[best];
  result.loss = fv[best];
  return result;
}

std::vector<std::string> param_names(const ModelClass& model) {
  std::vector<std::string> names;
  for (const auto& p : model.params) names.push_back(p.name);
  return names;
}

}  // namespace

FitResult fit(const ModelClass& model, const Dataset& train,
              const LossFunction& loss, const FitConfig& cfg) {
  if (model.params.empty())
    throw Error(ErrorCode::Config,
                "fit: model '" + model.name + "' has an empty parameter domain");
  if (train.empty()) throw Error(ErrorCode::Generic, "fit: empty training set");
  if (cfg.grid_points_per_dim < 2)
    throw Error(ErrorCode::Config, "fit: grid_points_per_dim must be >= 2");

  CompressedObjective obj(train, loss);
  auto values = grid_values(model, cfg.grid_points_per_dim);
  GridScan scan = scan_grid(model, obj, values);

  FitResult result;
  result.param_names = param_names(model);
  result.parameters = scan.best_point;
  result.train_loss = scan.best_loss;
  result.evaluations = scan.evaluations;

  std::vector<std::size_t> cont_dims;
  for (std::size_t d = 0; d < model.params.size(); ++d)
    if (!model.params[d].integral && model.params[d].lower < model.params[d].upper)
      cont_dims.push_back(d);

  if (cfg.refine && !cont_dims.empty() &&
      loss.kind == LossFunction::Kind::SquaredError) {
    std::vector<double> x0, lo, hi;
    for (auto d : cont_dims) {
      x0.push_back(scan.best_point[d]);
      lo.push_back(model.params[d].lower);
      hi.push_back(model.params[d].upper);
    }
    auto full_eval = [&](const std::vector<double>& x) {
      std::vector<double> point = scan.best_point;
      for (std::size_t j = 0; j < cont_dims.size(); ++j)
        point[cont_dims[j]] = x[j];
      return obj(model, point);
    };
    SimplexResult refined = nelder_mead(full_eval, x0, lo, hi,
                                        cfg.refine_max_iters,
                                        cfg.refine_tolerance);
    result.evaluations += refined.evaluations;
    if (refined.loss < result.train_loss) {  // monotone acceptance
      result.train_loss = refined.loss;
      for (std::size_t j = 0; j < cont_dims.size(); ++j)
        result.parameters[cont_dims[j]] = refined.point[j];
    }
  }
  return result;
}

FitResult fit_discrete(const ModelClass& model, const Dataset& train,
                       const FitConfig& cfg) {
  if (model.params.empty())
    throw Error(ErrorCode::Config, "fit_discrete: model '" + model.name +
                                       "' has an empty parameter domain");
  if (train.empty())
    throw Error(ErrorCode::Generic, "fit_discrete: empty training set");

  CompressedObjective obj(train, LossFunction::misclassification());
  auto values = grid_values(model, cfg.grid_points_per_dim);
  GridScan scan = scan_grid(model, obj, values);

  FitResult result;
  result.param_names = param_names(model);
  result.parameters = scan.best_point;
  result.train_loss = scan.best_loss;
  result.evaluations = scan.evaluations;
  return result;
}

TrainedRule ModelTrainer::train(const Dataset& train,
                                const LossFunction& loss) const {
  FitResult fitted = loss.kind == LossFunction::Kind::Misclassification
                         ? fit_discrete(model_, train, cfg_)
                         : fit(model_, train, loss, cfg_);
  TrainedRule trained;
  trained.rule = model_.build(fitted.parameters);
  trained.rule.name = model_.name;
  trained.param_names = fitted.param_names;
  trained.params = fitted.parameters;
  return trained;
}

}  // namespace completeness

