#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mof/matrix.hpp"
#include "mof/rng.hpp"

namespace mof {

/// Balanced random fold assignment; fold sizes differ by at most one.
struct FoldAssignment {
  int k = 0;
  std::vector<std::int32_t> fold_of;  // labels in 0..k-1
};

FoldAssignment kfold(std::size_t n, int k, RandomSource& rng);

struct EvalMetrics {
  double overall_mse = 0.0;  // sum_of_mse / d
  double sum_of_mse = 0.0;
  std::vector<double> per_output_mse;
};

EvalMetrics mse_metrics(const Matrix& predictions, const Matrix& truth);

/// A fitted model ready to predict one feature vector at a time.
using PredictFunction = std::function<void(std::span<const double> x, std::span<double> out)>;

/// Fits a model on the given training data with the given rng seed.
using FitFunction = std::function<PredictFunction(const Dataset& train, std::uint64_t seed)>;

enum class Standardize {
  none,
  global,      // output statistics from the full dataset, applied once
  train_fold,  // statistics from the training folds, applied per fold
};

struct CrossValOptions {
  int folds = 5;
  int repetitions = 1;
  std::uint64_t seed = 0;
  Standardize standardize = Standardize::none;
};

struct CrossValResult {
  EvalMetrics mean;                        // averaged over repetitions
  double mean_fit_seconds = 0.0;           // per fold-fit
  double mean_predict_seconds = 0.0;       // per fold hold-out pass
  std::vector<EvalMetrics> per_repetition;
  std::vector<double> fit_seconds;         // per repetition, mean per fold-fit
  std::vector<double> predict_seconds;     // per repetition, mean per fold
};

/// Repeated k-fold cross-validation: per repetition a fresh fold assignment;
/// hold-out predictions are pooled before computing metrics. folds == n is
/// leave-one-out.
CrossValResult cross_validate(const Dataset& data, const FitFunction& fit,
                              const CrossValOptions& options);

struct RuntimeStats {
  std::vector<double> seconds;  // one wall-clock sample per repetition
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;

  double quantile(double q) const;
};

/// Wall-clock seconds per fit; data generation and prediction are excluded.
RuntimeStats benchmark_fit(const Dataset& data, const FitFunction& fit, int repetitions,
                           std::uint64_t seed);

/// In-place standardization of each output column to zero mean and unit
/// sample variance; constant columns are only centered. Returns the applied
/// (mean, sd) pairs.
struct OutputStandardization {
  std::vector<double> mean;
  std::vector<double> sd;
};

OutputStandardization standardize_outputs(Matrix& outputs);

}  // namespace mof
