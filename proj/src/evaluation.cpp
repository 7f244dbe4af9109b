#include "mof/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mof {

FoldAssignment kfold(std::size_t n, int k, RandomSource& rng) {
  if (k < 2) throw std::invalid_argument("kfold: k must be >= 2");
  if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("kfold: k exceeds n");
  std::vector<std::int32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(perm[i], perm[j]);
  }
  FoldAssignment fa;
  fa.k = k;
  fa.fold_of.resize(n);
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i)
      fa.fold_of[static_cast<std::size_t>(perm[pos++])] = f;
  }
  return fa;
}

EvalMetrics mse_metrics(const Matrix& predictions, const Matrix& truth) {
  if (predictions.rows == 0) throw std::invalid_argument("mse_metrics: no rows");
  if (predictions.rows != truth.rows || predictions.cols != truth.cols)
    throw std::invalid_argument("mse_metrics: shape mismatch");
  const std::size_t m = predictions.rows;
  const std::size_t d = predictions.cols;
  EvalMetrics out;
  out.per_output_mse.assign(d, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double e = predictions(i, j) - truth(i, j);
      out.per_output_mse[j] += e * e;
    }
  for (std::size_t j = 0; j < d; ++j) {
    out.per_output_mse[j] /= static_cast<double>(m);
    out.sum_of_mse += out.per_output_mse[j];
  }
  out.overall_mse = out.sum_of_mse / static_cast<double>(d);
  return out;
}

OutputStandardization standardize_outputs(Matrix& outputs) {
  const std::size_t n = outputs.rows;
  const std::size_t d = outputs.cols;
  if (n < 2) throw std::invalid_argument("standardize_outputs: need at least 2 rows");
  OutputStandardization st;
  st.mean.assign(d, 0.0);
  st.sd.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += outputs(i, j);
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dv = outputs(i, j) - mean;
      sq += dv * dv;
    }
    const double var = sq / static_cast<double>(n - 1);
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    st.mean[j] = mean;
    st.sd[j] = sd;
    for (std::size_t i = 0; i < n; ++i) outputs(i, j) = (outputs(i, j) - mean) / sd;
  }
  return st;
}

CrossValResult cross_validate(const Dataset& data, const FitFunction& fit,
                              const CrossValOptions& options) {
  data.validate();
  const std::size_t n = data.n();
  const std::size_t d = data.d();
  if (options.repetitions < 1)
    throw std::invalid_argument("cross_validate: repetitions must be >= 1");

  Dataset working = data;
  if (options.standardize == Standardize::global) standardize_outputs(working.outputs);

  CrossValResult result;
  result.per_repetition.reserve(static_cast<std::size_t>(options.repetitions));
  result.fit_seconds.reserve(static_cast<std::size_t>(options.repetitions));
  result.predict_seconds.reserve(static_cast<std::size_t>(options.repetitions));

  std::vector<std::int32_t> train_rows, test_rows;
  for (int rep = 0; rep < options.repetitions; ++rep) {
    RandomSource fold_rng(mix_seed(options.seed, 0x666f6c64ULL, static_cast<std::uint64_t>(rep)));
    const FoldAssignment folds = kfold(n, options.folds, fold_rng);

    Matrix predictions(n, d);
    Matrix truth = working.outputs;
    double fit_seconds = 0.0;
    double predict_seconds = 0.0;
    for (int f = 0; f < options.folds; ++f) {
      train_rows.clear();
      test_rows.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (folds.fold_of[i] == f)
          test_rows.push_back(static_cast<std::int32_t>(i));
        else
          train_rows.push_back(static_cast<std::int32_t>(i));
      }
      Dataset train = working.select_rows(train_rows);
      if (options.standardize == Standardize::train_fold) {
        const OutputStandardization st = standardize_outputs(train.outputs);
        for (const std::int32_t r : test_rows)
          for (std::size_t j = 0; j < d; ++j)
            truth(static_cast<std::size_t>(r), j) =
                (working.outputs(static_cast<std::size_t>(r), j) - st.mean[j]) / st.sd[j];
      }
      const std::uint64_t fit_seed =
          mix_seed(options.seed, static_cast<std::uint64_t>(rep),
                   static_cast<std::uint64_t>(f));
      PredictFunction predictor;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        predictor = fit(train, fit_seed);
      } catch (const std::exception& e) {
        throw std::runtime_error("cross_validate: repetition " + std::to_string(rep) +
                                 ", fold " + std::to_string(f) + ": " + e.what());
      }
      const auto t1 = std::chrono::steady_clock::now();
      for (const std::int32_t r : test_rows)
        predictor(working.features.row_span(static_cast<std::size_t>(r)),
                  {predictions.row(static_cast<std::size_t>(r)), d});
      const auto t2 = std::chrono::steady_clock::now();
      fit_seconds += std::chrono::duration<double>(t1 - t0).count();
      predict_seconds += std::chrono::duration<double>(t2 - t1).count();
    }
    result.per_repetition.push_back(mse_metrics(predictions, truth));
    result.fit_seconds.push_back(fit_seconds / static_cast<double>(options.folds));
    result.predict_seconds.push_back(predict_seconds / static_cast<double>(options.folds));
  }

  EvalMetrics mean;
  mean.per_output_mse.assign(d, 0.0);
  for (const EvalMetrics& m : result.per_repetition) {
    mean.overall_mse += m.overall_mse;
    mean.sum_of_mse += m.sum_of_mse;
    for (std::size_t j = 0; j < d; ++j) mean.per_output_mse[j] += m.per_output_mse[j];
  }
  const auto reps = static_cast<double>(options.repetitions);
  mean.overall_mse /= reps;
  mean.sum_of_mse /= reps;
  for (double& v : mean.per_output_mse) v /= reps;
  result.mean = mean;
  result.mean_fit_seconds =
      std::accumulate(result.fit_seconds.begin(), result.fit_seconds.end(), 0.0) / reps;
  result.mean_predict_seconds =
      std::accumulate(result.predict_seconds.begin(), result.predict_seconds.end(), 0.0) /
      reps;
  return result;
}

double RuntimeStats::quantile(double q) const {
  std::vector<double> sorted = seconds;
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

RuntimeStats benchmark_fit(const Dataset& data, const FitFunction& fit, int repetitions,
                           std::uint64_t seed) {
  if (repetitions < 1) throw std::invalid_argument("benchmark_fit: repetitions >= 1");
  RuntimeStats stats;
  stats.seconds.reserve(static_cast<std::size_t>(repetitions));
  for (int rep = 0; rep < repetitions; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    PredictFunction predictor = fit(data, mix_seed(seed, static_cast<std::uint64_t>(rep)));
    const auto t1 = std::chrono::steady_clock::now();
    (void)predictor;
    stats.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  stats.mean = std::accumulate(stats.seconds.begin(), stats.seconds.end(), 0.0) /
               static_cast<double>(repetitions);
  stats.min = *std::min_element(stats.seconds.begin(), stats.seconds.end());
  stats.max = *std::max_element(stats.seconds.begin(), stats.seconds.end());
  stats.median = stats.quantile(0.5);
  return stats;
}

}  // namespace mof
