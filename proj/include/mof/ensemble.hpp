#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mof/matrix.hpp"
#include "mof/tree.hpp"

namespace mof {

enum class BaseLearner {
  random_forest,  // bootstrap samples, exhaustive CART splits
  extra_trees,    // full training set, random cut points
};

enum class OutputMode {
  multivariate,           // one forest on the d-dimensional outputs
  per_output_univariate,  // d independent single-output forests
};

struct EnsembleConfig {
  int num_trees = 500;
  int m_try = 0;           // 0: default floor(p/3), at least 1
  int bootstrap_size = 0;  // 0: default n (random forest only)
  int min_leaf_size = 5;
  int num_random_cuts = 1;  // extra trees only
  BaseLearner method = BaseLearner::random_forest;
  OutputMode output_mode = OutputMode::multivariate;
  std::uint64_t seed = 0;
  int num_threads = 1;
  bool keep_inbag = false;  // retain bootstrap multiplicities per tree
};

/// Immutable after fit; safe to share across threads for concurrent predicts.
struct FittedEnsemble {
  EnsembleConfig config;  // with defaults resolved
  std::size_t p = 0;
  std::size_t d = 0;
  // Multivariate mode: forests.size() == 1. Per-output mode: one univariate
  // forest per output column, each with config.num_trees trees.
  std::vector<std::vector<Tree>> forests;
  // keep_inbag: inbag[forest][tree][row] = bootstrap multiplicity.
  std::vector<std::vector<std::vector<std::uint32_t>>> inbag;

  void predict(std::span<const double> x, std::span<double> out) const;
  std::vector<double> predict(std::span<const double> x) const;
  Matrix predict_rows(const Matrix& features) const;
};

/// Fits a random forest or extra-trees ensemble. Per-tree rng streams are
/// derived from (seed, output index, tree index), so results are identical
/// for any thread count.
FittedEnsemble fit_ensemble(const Dataset& data, const EnsembleConfig& config);

/// Config with m_try/bootstrap_size defaults filled in for this dataset;
/// throws std::invalid_argument on an infeasible configuration.
EnsembleConfig resolve_ensemble_config(const EnsembleConfig& config, const Dataset& data);

}  // namespace mof
