#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "mof/simgen.hpp"

using namespace mof;

namespace {

double column_mean(const Matrix& m, std::size_t j) {
  double sum = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) sum += m(i, j);
  return sum / static_cast<double>(m.rows);
}

double column_corr(const Matrix& m, std::size_t a, std::size_t b) {
  const double ma = column_mean(m, a), mb = column_mean(m, b);
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double da = m(i, a) - ma, db = m(i, b) - mb;
    num += da * db;
    va += da * da;
    vb += db * db;
  }
  return num / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("independent features keep their stated supports") {
  RandomSource rng(1);
  const Matrix x = gen_features(5000, FeatureDependence::independent, rng);
  REQUIRE(x.cols == 10);
  for (std::size_t i = 0; i < x.rows; ++i) {
    CHECK(x(i, 3) >= 0.0);
    CHECK(x(i, 3) < 4.0);   // X4 ~ U[0,4]
    CHECK(x(i, 4) >= 0.0);
    CHECK(x(i, 4) < 8.0);   // X5 ~ U[0,8]
    CHECK(x(i, 1) > 0.0);   // X2 = W ~ Exp(1), log-safe
  }
}

TEST_CASE("weakly dependent X1 decomposes as Z + W + T") {
  RandomSource rng(2);
  const Matrix x = gen_features(20000, FeatureDependence::weakly_dependent, rng);
  // X1 - X2 - X3 = Z has zero mean.
  double mean = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) mean += x(i, 0) - x(i, 1) - x(i, 2);
  mean /= static_cast<double>(x.rows);
  CHECK(std::abs(mean) < 0.05);
  for (std::size_t i = 0; i < x.rows; ++i) {
    CHECK(x(i, 3) >= 0.0);
    CHECK(x(i, 3) < 2.0);  // C2 replaces C4
  }
}

TEST_CASE("strongly dependent X1 and X2 are almost collinear") {
  RandomSource rng(3);
  const Matrix x = gen_features(100000, FeatureDependence::strongly_dependent, rng);
  // corr(W + 0.1 Z, W) = 1/sqrt(1.01) ~ 0.995
  CHECK(column_corr(x, 0, 1) > 0.95);
}

TEST_CASE("feature generation is seed-reproducible") {
  RandomSource a(99), b(99);
  const Matrix xa = gen_features(50, FeatureDependence::independent, a);
  const Matrix xb = gen_features(50, FeatureDependence::independent, b);
  CHECK(xa.values == xb.values);
}

TEST_CASE("covariance matrices are symmetric with unit diagonal and valid") {
  for (const CovarianceSpec& cov : kAllCovarianceSpecs) {
    const auto m = cov.matrix3();
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(m[i * 3 + i] == 1.0);
      for (std::size_t j = 0; j < 3; ++j) CHECK(m[i * 3 + j] == m[j * 3 + i]);
    }
    RandomSource rng(4);
    CHECK_NOTHROW(gen_errors(10, cov, rng));  // Cholesky certifies positive definiteness
  }
  const CovarianceSpec bad_rho{0.3, 1};
  const CovarianceSpec bad_ell{0.5, 3};
  CHECK_THROWS_AS(bad_rho.validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad_ell.validate(), std::invalid_argument);
}

TEST_CASE("error correlations follow the covariance spec") {
  const std::size_t n = 100000;
  SUBCASE("rho=0 gives independent components") {
    RandomSource rng(5);
    const Matrix e = gen_errors(n, CovarianceSpec{0.0, 1}, rng);
    CHECK(std::abs(column_corr(e, 0, 1)) < 0.02);
    CHECK(std::abs(column_corr(e, 0, 2)) < 0.02);
    CHECK(std::abs(column_corr(e, 1, 2)) < 0.02);
  }
  SUBCASE("rho=0.9, ell=2 puts rho^2 in the corner") {
    RandomSource rng(6);
    const Matrix e = gen_errors(n, CovarianceSpec{0.9, 2}, rng);
    CHECK(column_corr(e, 0, 2) == doctest::Approx(0.81).epsilon(0.025));
    CHECK(column_corr(e, 0, 1) == doctest::Approx(0.9).epsilon(0.025));
  }
  SUBCASE("rho=0.5, ell=1 is compound symmetric") {
    RandomSource rng(7);
    const Matrix e = gen_errors(n, CovarianceSpec{0.5, 1}, rng);
    CHECK(column_corr(e, 0, 2) == doctest::Approx(0.5).epsilon(0.05));
  }
}

TEST_CASE("response formulas match hand-evaluated points") {
  Matrix x(1, 10, 0.0);
  Matrix zero_errors(1, 3, 0.0);
  RandomSource rng(8);

  SUBCASE("quadratic broadcasts 0.8 * X2^2") {
    x(0, 1) = 2.0;
    const Matrix y = gen_response(ResponseModel::quadratic, x, zero_errors, rng);
    for (std::size_t j = 0; j < 3; ++j) CHECK(y(0, j) == doctest::Approx(3.2));
  }
  SUBCASE("additive activates the i=4 interval term") {
    x(0, 2) = 2.0;   // X3 > 1 contributes 0.7
    x(0, 4) = 3.5;   // 3 <= X5 < 4 contributes 0.125 * 4
    const Matrix y = gen_response(ResponseModel::additive, x, zero_errors, rng);
    for (std::size_t j = 0; j < 3; ++j) CHECK(y(0, j) == doctest::Approx(1.2));
  }
  SUBCASE("mgam2 components vanish at sin(0) and log(1)") {
    x(0, 0) = 0.0;
    x(0, 1) = 1.0;
    const Matrix y = gen_response(ResponseModel::mgam2, x, zero_errors, rng);
    CHECK(y(0, 0) == 0.0);
    CHECK(y(0, 1) == 0.0);
    CHECK(y(0, 2) >= 0.0);
    CHECK(y(0, 2) < 1.0);  // the U component
  }
  SUBCASE("cross flips sign at X3 = 1") {
    x(0, 1) = 3.0;
    x(0, 2) = 0.0;
    const Matrix below = gen_response(ResponseModel::cross, x, zero_errors, rng);
    CHECK(below(0, 0) == doctest::Approx(-1.5));
    x(0, 2) = 2.0;
    const Matrix above = gen_response(ResponseModel::cross, x, zero_errors, rng);
    CHECK(above(0, 0) == doctest::Approx(1.5));
  }
}

TEST_CASE("scalar-signal models broadcast a rank-1 signal") {
  RandomSource rng(9);
  const Matrix x = gen_features(500, FeatureDependence::independent, rng);
  const Matrix zero(500, 3, 0.0);
  for (const ResponseModel model :
       {ResponseModel::jump, ResponseModel::quadratic, ResponseModel::cubic,
        ResponseModel::additive, ResponseModel::cross, ResponseModel::rjump,
        ResponseModel::linear1, ResponseModel::linear2, ResponseModel::mgam1}) {
    // With zero errors the broadcast signal must be exactly identical
    // across the three components.
    RandomSource rng2(10);
    const Matrix y = gen_response(model, x, zero, rng2);
    std::size_t exact = 0;
    for (std::size_t i = 0; i < y.rows; ++i)
      if (y(i, 1) == y(i, 0) && y(i, 2) == y(i, 0)) ++exact;
    CHECK(exact == y.rows);
  }
}

TEST_CASE("mgam models produce component-wise distinct signals") {
  RandomSource rng(14);
  const Matrix x = gen_features(200, FeatureDependence::independent, rng);
  const Matrix zero_errors(200, 3, 0.0);
  for (const ResponseModel model : {ResponseModel::mgam2, ResponseModel::mgam3}) {
    RandomSource rng2(15);
    const Matrix y = gen_response(model, x, zero_errors, rng2);
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < y.rows; ++i)
      if (y(i, 0) != y(i, 1) || y(i, 1) != y(i, 2)) ++distinct;
    CHECK(distinct > 190);
  }
}

TEST_CASE("jump and rjump have a conditional-mean break at X3 = 1") {
  const std::size_t n = 20000;
  RandomSource rng(16);
  const Matrix x = gen_features(n, FeatureDependence::independent, rng);
  const Matrix e = gen_errors(n, CovarianceSpec{0.0, 1}, rng);

  auto mean_gap = [&](ResponseModel model) {
    RandomSource rng2(17);
    const Matrix y = gen_response(model, x, e, rng2);
    double above = 0.0, below = 0.0;
    std::size_t na = 0, nb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x(i, 2) > 1.0) {
        above += y(i, 0);
        ++na;
      } else {
        below += y(i, 0);
        ++nb;
      }
    }
    return above / static_cast<double>(na) - below / static_cast<double>(nb);
  };
  CHECK(mean_gap(ResponseModel::jump) == doctest::Approx(0.7).epsilon(0.15));
  CHECK(mean_gap(ResponseModel::rjump) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("make_dataset is deterministic and well-formed") {
  SimulationSetting setting;
  setting.model = ResponseModel::cross;
  setting.dependence = FeatureDependence::strongly_dependent;
  setting.cov = CovarianceSpec{0.9, 2};
  setting.n = 150;
  setting.seed = 12345;
  const Dataset a = make_dataset(setting);
  const Dataset b = make_dataset(setting);
  CHECK(a.n() == 150);
  CHECK(a.p() == 10);
  CHECK(a.d() == 3);
  CHECK(a.features.values == b.features.values);
  CHECK(a.outputs.values == b.outputs.values);
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("dataset CSV dump has the expected header and row count") {
  SimulationSetting setting;
  setting.n = 12;
  setting.seed = 5;
  const Dataset ds = make_dataset(setting);
  std::ostringstream out;
  write_dataset_csv(out, ds);
  const std::string text = out.str();
  CHECK(text.rfind("x1,x2,x3,x4,x5,x6,x7,x8,x9,x10,y1,y2,y3\n", 0) == 0);
  std::size_t lines = 0;
  for (const char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == 13);
}
