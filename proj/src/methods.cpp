#include "mof/methods.hpp"

#include <memory>

#include "mof/ensemble.hpp"
#include "mof/multitask.hpp"

namespace mof {

std::string_view method_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::rf_univ: return "rf_univ";
    case MethodKind::rf_multi: return "rf_multi";
    case MethodKind::et_univ: return "et_univ";
    case MethodKind::et_multi: return "et_multi";
    case MethodKind::et_mt: return "et_mt";
  }
  return "?";
}

std::optional<MethodKind> parse_method(std::string_view name) {
  for (const MethodKind kind : kAllMethods)
    if (name == method_name(kind)) return kind;
  return std::nullopt;
}

FitFunction make_fitter(const MethodConfig& config) {
  return [config](const Dataset& train, std::uint64_t seed) -> PredictFunction {
    if (config.kind == MethodKind::et_mt) {
      MultiTaskConfig cfg;
      cfg.alpha = config.alpha;
      cfg.num_trees = config.num_trees;
      cfg.m_try = config.m_try;
      cfg.min_leaf_size = config.min_leaf_size;
      cfg.num_random_cuts = config.num_random_cuts;
      cfg.seed = seed;
      cfg.num_threads = config.num_threads;
      auto model = std::make_shared<MultiTaskModel>(fit_multitask(train, cfg));
      return [model](std::span<const double> x, std::span<double> out) {
        model->predict(x, out);
      };
    }
    EnsembleConfig cfg;
    cfg.num_trees = config.num_trees;
    cfg.m_try = config.m_try;
    cfg.min_leaf_size = config.min_leaf_size;
    cfg.num_random_cuts = config.num_random_cuts;
    cfg.seed = seed;
    cfg.num_threads = config.num_threads;
    switch (config.kind) {
      case MethodKind::rf_univ:
        cfg.method = BaseLearner::random_forest;
        cfg.output_mode = OutputMode::per_output_univariate;
        break;
      case MethodKind::rf_multi:
        cfg.method = BaseLearner::random_forest;
        cfg.output_mode = OutputMode::multivariate;
        break;
      case MethodKind::et_univ:
        cfg.method = BaseLearner::extra_trees;
        cfg.output_mode = OutputMode::per_output_univariate;
        break;
      case MethodKind::et_multi:
        cfg.method = BaseLearner::extra_trees;
        cfg.output_mode = OutputMode::multivariate;
        break;
      case MethodKind::et_mt:
        break;  // handled above
    }
    auto model = std::make_shared<FittedEnsemble>(fit_ensemble(train, cfg));
    return [model](std::span<const double> x, std::span<double> out) {
      model->predict(x, out);
    };
  };
}

}  // namespace mof
