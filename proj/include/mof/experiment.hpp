#pragma once

#include <iosfwd>
#include <vector>

#include "mof/evaluation.hpp"
#include "mof/methods.hpp"
#include "mof/simgen.hpp"

namespace mof {

/// Setting filter; empty vectors select the full axis. The full grid spans
/// 11 models x 5 error settings x 3 feature dependencies x 3 sample sizes.
struct GridFilter {
  std::vector<ResponseModel> models;
  std::vector<FeatureDependence> dependencies;
  std::vector<CovarianceSpec> covariances;
  std::vector<int> sample_sizes;
};

struct SettingKey {
  ResponseModel model;
  FeatureDependence dependence;
  CovarianceSpec cov;
  int n;
};

std::vector<SettingKey> enumerate_settings(const GridFilter& filter);

/// Weakly dependent linear1/linear2/mgam1 cells are reported but flagged:
/// their heavy-tailed feature sums make MSEs explode.
bool is_unstable_setting(const SettingKey& setting);

struct GridOptions {
  GridFilter filter;
  std::vector<MethodKind> methods{MethodKind::rf_univ, MethodKind::rf_multi,
                                  MethodKind::et_univ, MethodKind::et_multi,
                                  MethodKind::et_mt};
  int repetitions = 50;
  int folds = 5;
  int num_trees = 500;
  std::uint64_t seed = 1;
  int threads = 1;
  bool summary = false;  // aggregate repetitions to means
};

/// Simulation study over the filtered grid. Per repetition a fresh dataset is
/// generated and evaluated with one k-fold CV pass per method; all methods of
/// a repetition share the same data. CSV rows:
///   model,dependence,rho,ell,n,method,repetition,overall_mse,mse_y1,mse_y2,
///   mse_y3,fit_seconds,unstable
/// Summary mode aggregates over repetitions (column `repetitions` instead).
void run_grid(const GridOptions& options, std::ostream& out);

struct ConcreteOptions {
  std::vector<MethodKind> methods{MethodKind::rf_univ, MethodKind::rf_multi,
                                  MethodKind::et_univ, MethodKind::et_multi,
                                  MethodKind::et_mt};
  int repetitions = 20;
  int folds = 5;
  int num_trees = 500;
  std::uint64_t seed = 1;
  Standardize standardize = Standardize::global;
  bool include_loocv = true;
  int threads = 1;
};

/// Concrete slump study: every output subset (three univariate, three
/// bivariate, one trivariate) under repeated k-fold CV, plus leave-one-out CV
/// for the trivariate case. CSV rows:
///   analysis,outputs,method,folds,repetitions,overall_mse,sum_of_mse,
///   mse_slump,mse_flow,mse_cs  (blank cell for an output not in the subset)
void run_concrete(const Dataset& concrete, const ConcreteOptions& options,
                  std::ostream& out);

struct BenchOptions {
  GridFilter filter;
  std::vector<MethodKind> methods{MethodKind::rf_univ, MethodKind::rf_multi,
                                  MethodKind::et_univ, MethodKind::et_multi,
                                  MethodKind::et_mt};
  int repetitions = 10;
  int num_trees = 500;
  std::uint64_t seed = 1;
};

/// Fit-runtime measurements on generated settings (generation not timed).
/// CSV rows: model,dependence,rho,ell,n,method,repetition,fit_seconds
void run_bench(const BenchOptions& options, std::ostream& out);

}  // namespace mof
