#include "mof/ensemble.hpp"

#include <numeric>
#include <stdexcept>

#include "mof/parallel.hpp"
#include "mof/rng.hpp"

namespace mof {

EnsembleConfig resolve_ensemble_config(const EnsembleConfig& config, const Dataset& data) {
  EnsembleConfig cfg = config;
  const auto p = data.p();
  if (cfg.m_try == 0) cfg.m_try = std::max<int>(1, static_cast<int>(p) / 3);
  if (cfg.bootstrap_size == 0) cfg.bootstrap_size = static_cast<int>(data.n());
  if (cfg.num_trees < 1) throw std::invalid_argument("ensemble: num_trees must be >= 1");
  if (cfg.m_try < 1 || static_cast<std::size_t>(cfg.m_try) > p)
    throw std::invalid_argument("ensemble: m_try out of range");
  if (cfg.min_leaf_size < 1)
    throw std::invalid_argument("ensemble: min_leaf_size must be >= 1");
  if (cfg.method == BaseLearner::random_forest && cfg.bootstrap_size < 1)
    throw std::invalid_argument("ensemble: bootstrap_size must be >= 1");
  if (cfg.method == BaseLearner::extra_trees && cfg.num_random_cuts < 1)
    throw std::invalid_argument("ensemble: num_random_cuts must be >= 1");
  return cfg;
}

namespace {

Dataset output_slice(const Dataset& data, std::size_t j) {
  Dataset out;
  out.features = data.features;
  out.outputs = Matrix(data.n(), 1);
  for (std::size_t i = 0; i < data.n(); ++i) out.outputs(i, 0) = data.outputs(i, j);
  return out;
}

}  // namespace

FittedEnsemble fit_ensemble(const Dataset& data, const EnsembleConfig& config) {
  data.validate();
  const EnsembleConfig cfg = resolve_ensemble_config(config, data);
  const bool per_output = cfg.output_mode == OutputMode::per_output_univariate;
  const std::size_t num_forests = per_output ? data.d() : 1;
  const auto num_trees = static_cast<std::size_t>(cfg.num_trees);
  const std::size_t n = data.n();
  const bool is_rf = cfg.method == BaseLearner::random_forest;

  FittedEnsemble model;
  model.config = cfg;
  model.p = data.p();
  model.d = data.d();
  model.forests.assign(num_forests, std::vector<Tree>(num_trees));
  if (cfg.keep_inbag && is_rf)
    model.inbag.assign(num_forests,
                       std::vector<std::vector<std::uint32_t>>(num_trees));

  // The presort depends only on the features, which are shared by every
  // output slice.
  FeaturePresort presort;
  if (is_rf) presort = presort_features(data.features);
  const FeaturePresort* presort_ptr = is_rf ? &presort : nullptr;

  GrowConfig grow;
  grow.m_try = cfg.m_try;
  grow.min_leaf_size = cfg.min_leaf_size;
  grow.num_random_cuts = cfg.num_random_cuts;
  grow.split_mode = is_rf ? SplitMode::exhaustive : SplitMode::random_cuts;

  std::vector<std::int32_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0);

  for (std::size_t j = 0; j < num_forests; ++j) {
    const Dataset slice = per_output ? output_slice(data, j) : Dataset{};
    const Dataset& train = per_output ? slice : data;
    parallel_for(num_trees, cfg.num_threads, [&](std::size_t b) {
      RandomSource rng(mix_seed(cfg.seed, j, b));
      if (is_rf) {
        const auto target = static_cast<std::size_t>(cfg.bootstrap_size);
        std::vector<std::int32_t> rows(target);
        for (auto& r : rows) r = static_cast<std::int32_t>(rng.below(n));
        model.forests[j][b] = grow_tree(train, rows, grow, rng, presort_ptr);
        if (cfg.keep_inbag) {
          std::vector<std::uint32_t> counts(n, 0);
          for (const std::int32_t r : rows) ++counts[static_cast<std::size_t>(r)];
          model.inbag[j][b] = std::move(counts);
        }
      } else {
        model.forests[j][b] = grow_tree(train, all_rows, grow, rng, nullptr);
      }
    });
  }
  return model;
}

void FittedEnsemble::predict(std::span<const double> x, std::span<double> out) const {
  const auto num_trees = static_cast<double>(config.num_trees);
  if (config.output_mode == OutputMode::multivariate) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const Tree& tree : forests[0]) {
      const auto mean = tree.predict(x);
      for (std::size_t j = 0; j < d; ++j) out[j] += mean[j];
    }
    for (std::size_t j = 0; j < d; ++j) out[j] /= num_trees;
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (const Tree& tree : forests[j]) acc += tree.predict(x)[0];
      out[j] = acc / num_trees;
    }
  }
}

std::vector<double> FittedEnsemble::predict(std::span<const double> x) const {
  std::vector<double> out(d);
  predict(x, out);
  return out;
}

Matrix FittedEnsemble::predict_rows(const Matrix& features) const {
  Matrix out(features.rows, d);
  for (std::size_t i = 0; i < features.rows; ++i)
    predict(features.row_span(i), {out.row(i), d});
  return out;
}

}  // namespace mof
