#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string_view>

#include "mof/matrix.hpp"
#include "mof/rng.hpp"

namespace mof {

/// Dependence structure of the first five features.
enum class FeatureDependence { independent, weakly_dependent, strongly_dependent };

/// Relationship between the three outputs and the features.
enum class ResponseModel {
  jump,
  quadratic,
  cubic,
  additive,
  cross,
  rjump,
  linear1,
  linear2,
  mgam1,
  mgam2,
  mgam3,
};

inline constexpr std::array<ResponseModel, 11> kAllResponseModels = {
    ResponseModel::jump,    ResponseModel::quadratic, ResponseModel::cubic,
    ResponseModel::additive, ResponseModel::cross,    ResponseModel::rjump,
    ResponseModel::linear1, ResponseModel::linear2,   ResponseModel::mgam1,
    ResponseModel::mgam2,   ResponseModel::mgam3,
};

inline constexpr std::array<FeatureDependence, 3> kAllFeatureDependencies = {
    FeatureDependence::independent,
    FeatureDependence::weakly_dependent,
    FeatureDependence::strongly_dependent,
};

std::string_view to_string(ResponseModel model);
std::string_view to_string(FeatureDependence dependence);

/// 3x3 error covariance with unit diagonal, rho off the diagonal and rho^ell
/// in the corners (ell=1: compound symmetry, ell=2: autoregressive).
struct CovarianceSpec {
  double rho = 0.0;
  int ell = 1;

  std::array<double, 9> matrix3() const;
  /// Grid membership: rho in {0, 0.5, 0.9}, ell in {1, 2}.
  void validate() const;
};

/// The five distinct error settings of the grid (rho=0 collapses ell).
inline constexpr std::array<CovarianceSpec, 5> kAllCovarianceSpecs = {
    CovarianceSpec{0.0, 1}, CovarianceSpec{0.5, 1}, CovarianceSpec{0.5, 2},
    CovarianceSpec{0.9, 1}, CovarianceSpec{0.9, 2}};

inline constexpr std::array<int, 3> kAllSampleSizes = {100, 200, 500};

/// One cell of the 11 x 5 x 3 x 3 = 495 simulation grid.
struct SimulationSetting {
  ResponseModel model = ResponseModel::linear1;
  FeatureDependence dependence = FeatureDependence::independent;
  CovarianceSpec cov;
  int n = 100;
  std::uint64_t seed = 0;
};

/// n x 10 feature matrix. Per row the base variables Z ~ N(0,1), W ~ Exp(1),
/// T ~ t_2 and the uniform C's are drawn, composed per the dependence mode;
/// X6..X10 are iid standard normal.
Matrix gen_features(std::size_t n, FeatureDependence dependence, RandomSource& rng);

/// n x 3 draws from N(0, Sigma) via the lower Cholesky factor.
Matrix gen_errors(std::size_t n, const CovarianceSpec& cov, RandomSource& rng);

/// n x 3 responses for the given model; U ~ U[0,1) is drawn fresh per row for
/// the models that use it.
Matrix gen_response(ResponseModel model, const Matrix& features, const Matrix& errors,
                    RandomSource& rng);

/// Features + responses for one grid cell, deterministically from its seed.
Dataset make_dataset(const SimulationSetting& setting);

/// CSV dump with header x1..xp,y1..yd.
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace mof
