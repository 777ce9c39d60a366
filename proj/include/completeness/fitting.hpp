#pragma once

#include <cstdint>

#include "completeness/core.hpp"
#include "completeness/eval.hpp"

namespace completeness {

struct FitConfig {
  std::size_t grid_points_per_dim = 11;
  bool refine = true;
  std::size_t refine_max_iters = 200;
  double refine_tolerance = 1e-7;  // relative loss change
  std::uint64_t seed = 0;
};

struct FitResult {
  std::vector<std::string> param_names;
  std::vector<double> parameters;
  double train_loss = 0.0;
  std::size_t evaluations = 0;
};

// Deterministic coarse grid scan over the parameter box, followed by a
// Nelder-Mead refinement of the continuous coordinates from the best grid
// point. Integer parameters are enumerated exhaustively, jointly with the
// continuous grid. Grid points whose rule construction fails are skipped.
FitResult fit(const ModelClass& model, const Dataset& train,
              const LossFunction& loss, const FitConfig& cfg = {});

// Pure exhaustive scan for piecewise-constant objectives (classification
// loss); no simplex refinement, first-minimum tie-break.
FitResult fit_discrete(const ModelClass& model, const Dataset& train,
                       const FitConfig& cfg = {});

class ModelTrainer final : public Trainer {
 public:
  ModelTrainer(ModelClass model, FitConfig cfg = {})
      : model_(std::move(model)), cfg_(cfg) {}
  std::string name() const override { return model_.name; }
  TrainedRule train(const Dataset& train,
                    const LossFunction& loss) const override;

 private:
  ModelClass model_;
  FitConfig cfg_;
};

}  // namespace completeness
