#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "mof/evaluation.hpp"
#include "mof/methods.hpp"
#include "test_util.hpp"

using namespace mof;

namespace {

std::vector<std::size_t> fold_sizes(const FoldAssignment& fa) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(fa.k), 0);
  for (const auto f : fa.fold_of) ++sizes[static_cast<std::size_t>(f)];
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

// Fitter that ignores the data and predicts a fixed constant.
FitFunction constant_fitter(std::vector<double> value) {
  return [value](const Dataset&, std::uint64_t) -> PredictFunction {
    return [value](std::span<const double>, std::span<double> out) {
      std::copy(value.begin(), value.end(), out.begin());
    };
  };
}

}  // namespace

TEST_CASE("kfold balances fold sizes") {
  RandomSource rng(1);
  CHECK(fold_sizes(kfold(10, 5, rng)) == std::vector<std::size_t>{2, 2, 2, 2, 2});
  CHECK(fold_sizes(kfold(103, 5, rng)) == std::vector<std::size_t>{21, 21, 21, 20, 20});
  CHECK(fold_sizes(kfold(7, 5, rng)) == std::vector<std::size_t>{2, 2, 1, 1, 1});
}

TEST_CASE("kfold covers every row exactly once and validates k") {
  RandomSource rng(2);
  const FoldAssignment fa = kfold(29, 4, rng);
  CHECK(fa.fold_of.size() == 29);
  for (const auto f : fa.fold_of) {
    CHECK(f >= 0);
    CHECK(f < 4);
  }
  CHECK_THROWS_AS(kfold(5, 6, rng), std::invalid_argument);
  CHECK_THROWS_AS(kfold(5, 1, rng), std::invalid_argument);
}

TEST_CASE("mse_metrics matches hand arithmetic") {
  SUBCASE("perfect predictions") {
    Matrix truth(3, 2, 1.0);
    const EvalMetrics m = mse_metrics(truth, truth);
    CHECK(m.overall_mse == 0.0);
    CHECK(m.sum_of_mse == 0.0);
  }
  SUBCASE("univariate unit errors") {
    Matrix truth(2, 1, 0.0);
    Matrix pred(2, 1, 1.0);
    const EvalMetrics m = mse_metrics(pred, truth);
    CHECK(m.per_output_mse[0] == 1.0);
    CHECK(m.sum_of_mse == 1.0);
    CHECK(m.overall_mse == 1.0);
  }
  SUBCASE("bivariate single row") {
    Matrix truth(1, 2, 0.0);
    Matrix pred(1, 2);
    pred(0, 0) = 1.0;
    pred(0, 1) = 2.0;
    const EvalMetrics m = mse_metrics(pred, truth);
    CHECK(m.per_output_mse[0] == 1.0);
    CHECK(m.per_output_mse[1] == 4.0);
    CHECK(m.sum_of_mse == 5.0);
    CHECK(m.overall_mse == 2.5);
  }
  SUBCASE("empty input rejected") {
    Matrix empty(0, 2);
    CHECK_THROWS_AS(mse_metrics(empty, empty), std::invalid_argument);
  }
}

TEST_CASE("overall equals sum over d exactly") {
  const Dataset ds = testutil::random_dataset(31, 2, 3, 50);
  const Dataset noise = testutil::random_dataset(31, 2, 3, 51);
  const EvalMetrics m = mse_metrics(noise.outputs, ds.outputs);
  CHECK(m.overall_mse == m.sum_of_mse / 3.0);
}

TEST_CASE("cross_validate with a constant predictor equals direct pooled MSE") {
  const Dataset ds = testutil::random_dataset(37, 3, 2, 52);
  const std::vector<double> c{0.25, -1.0};
  CrossValOptions opt;
  opt.folds = 5;
  opt.repetitions = 3;
  opt.seed = 9;
  const CrossValResult r = cross_validate(ds, constant_fitter(c), opt);

  // Every hold-out row is predicted with the same constant, so the pooled MSE
  // per repetition is the plain dataset MSE against that constant.
  Matrix pred(ds.n(), 2);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    pred(i, 0) = c[0];
    pred(i, 1) = c[1];
  }
  const EvalMetrics direct = mse_metrics(pred, ds.outputs);
  CHECK(r.mean.overall_mse == doctest::Approx(direct.overall_mse).epsilon(1e-12));
  for (const EvalMetrics& rep : r.per_repetition)
    CHECK(rep.overall_mse == doctest::Approx(direct.overall_mse).epsilon(1e-12));
}

TEST_CASE("cross_validate with a train-mean dummy tracks the hold-out variance") {
  const Dataset ds = testutil::random_dataset(60, 3, 1, 53);
  const FitFunction mean_fitter = [](const Dataset& train,
                                     std::uint64_t) -> PredictFunction {
    double mean = 0.0;
    for (std::size_t i = 0; i < train.n(); ++i) mean += train.outputs(i, 0);
    mean /= static_cast<double>(train.n());
    return [mean](std::span<const double>, std::span<double> out) { out[0] = mean; };
  };
  CrossValOptions opt;
  opt.folds = 5;
  opt.repetitions = 5;
  opt.seed = 10;
  const CrossValResult r = cross_validate(ds, mean_fitter, opt);

  double variance = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < 60; ++i) mean += ds.outputs(i, 0);
  mean /= 60.0;
  for (std::size_t i = 0; i < 60; ++i) {
    const double dv = ds.outputs(i, 0) - mean;
    variance += dv * dv;
  }
  variance /= 60.0;
  CHECK(r.mean.overall_mse == doctest::Approx(variance).epsilon(0.15));
}

TEST_CASE("repeated cross-validation is bit-reproducible") {
  const Dataset ds = testutil::random_dataset(45, 4, 2, 54);
  MethodConfig mc;
  mc.kind = MethodKind::et_multi;
  mc.num_trees = 20;
  CrossValOptions opt;
  opt.folds = 5;
  opt.repetitions = 2;
  opt.seed = 123;
  const CrossValResult a = cross_validate(ds, make_fitter(mc), opt);
  const CrossValResult b = cross_validate(ds, make_fitter(mc), opt);
  CHECK(a.mean.overall_mse == b.mean.overall_mse);
  CHECK(a.mean.sum_of_mse == b.mean.sum_of_mse);
  REQUIRE(a.per_repetition.size() == 2);
  CHECK(a.per_repetition[0].overall_mse == b.per_repetition[0].overall_mse);
  CHECK(a.per_repetition[1].overall_mse == b.per_repetition[1].overall_mse);
}

TEST_CASE("rf univariate and multivariate land in the same error regime") {
  // Sanity envelope: both finite and within 2x of each other on a small
  // shared-signal fixture.
  const Dataset ds = testutil::random_dataset(30, 5, 3, 55);
  CrossValOptions opt;
  opt.folds = 5;
  opt.repetitions = 2;
  opt.seed = 31;
  MethodConfig uni;
  uni.kind = MethodKind::rf_univ;
  uni.num_trees = 100;
  MethodConfig multi;
  multi.kind = MethodKind::rf_multi;
  multi.num_trees = 100;
  const double mse_uni = cross_validate(ds, make_fitter(uni), opt).mean.overall_mse;
  const double mse_multi = cross_validate(ds, make_fitter(multi), opt).mean.overall_mse;
  CHECK(std::isfinite(mse_uni));
  CHECK(std::isfinite(mse_multi));
  CHECK(mse_multi < 2.0 * mse_uni);
  CHECK(mse_uni < 2.0 * mse_multi);
}

TEST_CASE("cross_validate times fits and predictions separately") {
  const Dataset ds = testutil::random_dataset(40, 3, 2, 60);
  MethodConfig mc;
  mc.kind = MethodKind::et_multi;
  mc.num_trees = 10;
  CrossValOptions opt;
  opt.folds = 5;
  opt.repetitions = 2;
  const CrossValResult r = cross_validate(ds, make_fitter(mc), opt);
  REQUIRE(r.fit_seconds.size() == 2);
  REQUIRE(r.predict_seconds.size() == 2);
  CHECK(r.mean_fit_seconds > 0.0);
  CHECK(r.mean_predict_seconds > 0.0);
  CHECK(r.mean_fit_seconds > r.mean_predict_seconds);  // 10-tree fit dwarfs 8 lookups
}

TEST_CASE("a failing fit aborts the repetition with a labeled error") {
  const Dataset ds = testutil::random_dataset(20, 2, 1, 61);
  const FitFunction broken = [](const Dataset&, std::uint64_t) -> PredictFunction {
    throw std::runtime_error("boom");
  };
  CrossValOptions opt;
  opt.folds = 4;
  try {
    cross_validate(ds, broken, opt);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    CHECK(what.find("repetition 0") != std::string::npos);
    CHECK(what.find("fold 0") != std::string::npos);
    CHECK(what.find("boom") != std::string::npos);
  }
}

TEST_CASE("leave-one-out cross-validation works") {
  const Dataset ds = testutil::random_dataset(12, 2, 1, 56);
  CrossValOptions opt;
  opt.folds = 12;
  opt.repetitions = 1;
  const CrossValResult r = cross_validate(ds, constant_fitter({0.0}), opt);
  Matrix zeros(12, 1, 0.0);
  const EvalMetrics direct = mse_metrics(zeros, ds.outputs);
  CHECK(r.mean.overall_mse == doctest::Approx(direct.overall_mse).epsilon(1e-12));
}

TEST_CASE("standardize_outputs yields zero mean and unit sample variance") {
  Dataset ds = testutil::random_dataset(103, 2, 3, 57);
  standardize_outputs(ds.outputs);
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 103; ++i) mean += ds.outputs(i, j);
    mean /= 103.0;
    double var = 0.0;
    for (std::size_t i = 0; i < 103; ++i) {
      const double dv = ds.outputs(i, j) - mean;
      var += dv * dv;
    }
    var /= 102.0;
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(var - 1.0) < 1e-9);
  }
}

TEST_CASE("train-fold standardization stays finite and sane") {
  const Dataset ds = testutil::random_dataset(40, 3, 2, 58);
  MethodConfig mc;
  mc.kind = MethodKind::et_multi;
  mc.num_trees = 15;
  CrossValOptions opt;
  opt.folds = 5;
  opt.repetitions = 2;
  opt.standardize = Standardize::train_fold;
  const CrossValResult r = cross_validate(ds, make_fitter(mc), opt);
  CHECK(std::isfinite(r.mean.overall_mse));
  CHECK(r.mean.overall_mse > 0.0);
}

TEST_CASE("benchmark_fit reports coherent runtime statistics") {
  const Dataset ds = testutil::random_dataset(50, 4, 2, 59);
  MethodConfig mc;
  mc.kind = MethodKind::et_multi;
  mc.num_trees = 10;
  SUBCASE("a single repetition is its own mean") {
    const RuntimeStats stats = benchmark_fit(ds, make_fitter(mc), 1, 7);
    REQUIRE(stats.seconds.size() == 1);
    CHECK(stats.mean == stats.seconds[0]);
    CHECK(stats.min == stats.max);
  }
  SUBCASE("min <= median <= mean-ish <= max") {
    const RuntimeStats stats = benchmark_fit(ds, make_fitter(mc), 6, 8);
    CHECK(stats.min <= stats.mean);
    CHECK(stats.mean <= stats.max);
    CHECK(stats.min <= stats.median);
    CHECK(stats.median <= stats.max);
    CHECK(stats.min > 0.0);
    CHECK(stats.quantile(0.0) == stats.min);
    CHECK(stats.quantile(1.0) == stats.max);
  }
}
