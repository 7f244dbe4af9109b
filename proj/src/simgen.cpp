#include "mof/simgen.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace mof {

std::string_view to_string(ResponseModel model) {
  switch (model) {
    case ResponseModel::jump: return "jump";
    case ResponseModel::quadratic: return "quadratic";
    case ResponseModel::cubic: return "cubic";
    case ResponseModel::additive: return "additive";
    case ResponseModel::cross: return "cross";
    case ResponseModel::rjump: return "rjump";
    case ResponseModel::linear1: return "linear1";
    case ResponseModel::linear2: return "linear2";
    case ResponseModel::mgam1: return "mgam1";
    case ResponseModel::mgam2: return "mgam2";
    case ResponseModel::mgam3: return "mgam3";
  }
  return "?";
}

std::string_view to_string(FeatureDependence dependence) {
  switch (dependence) {
    case FeatureDependence::independent: return "independent";
    case FeatureDependence::weakly_dependent: return "weakly_dependent";
    case FeatureDependence::strongly_dependent: return "strongly_dependent";
  }
  return "?";
}

std::array<double, 9> CovarianceSpec::matrix3() const {
  const double r = rho;
  const double corner = ell == 1 ? rho : rho * rho;
  return {1.0, r, corner, r, 1.0, r, corner, r, 1.0};
}

void CovarianceSpec::validate() const {
  if (rho != 0.0 && rho != 0.5 && rho != 0.9)
    throw std::invalid_argument("covariance: rho must be one of 0, 0.5, 0.9");
  if (ell != 1 && ell != 2)
    throw std::invalid_argument("covariance: ell must be 1 or 2");
}

namespace {

// Lower-triangular Cholesky factor of a k x k symmetric positive-definite
// matrix in row-major order.
std::vector<double> cholesky_lower(const std::array<double, 9>& a, std::size_t k) {
  std::vector<double> l(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * k + j];
      for (std::size_t q = 0; q < j; ++q) s -= l[i * k + q] * l[j * k + q];
      if (i == j) {
        if (s <= 0.0)
          throw std::runtime_error("cholesky: matrix not positive definite");
        l[i * k + i] = std::sqrt(s);
      } else {
        l[i * k + j] = s / l[j * k + j];
      }
    }
  }
  return l;
}

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

Matrix gen_features(std::size_t n, FeatureDependence dependence, RandomSource& rng) {
  if (n == 0) throw std::invalid_argument("gen_features: n must be >= 1");
  Matrix x(n, 10);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng.normal();
    const double w = rng.exponential();
    const double t = rng.student_t2();
    double* row = x.row(i);
    switch (dependence) {
      case FeatureDependence::independent:
        row[0] = z;
        row[3] = rng.uniform(0.0, 4.0);
        break;
      case FeatureDependence::weakly_dependent:
        row[0] = z + w + t;
        row[3] = rng.uniform(0.0, 2.0);
        break;
      case FeatureDependence::strongly_dependent:
        row[0] = w + 0.1 * z;
        row[3] = rng.uniform(0.0, 2.0);
        break;
    }
    row[1] = w;
    row[2] = t;
    row[4] = rng.uniform(0.0, 8.0);
    for (std::size_t j = 5; j < 10; ++j) row[j] = rng.normal();
  }
  return x;
}

Matrix gen_errors(std::size_t n, const CovarianceSpec& cov, RandomSource& rng) {
  cov.validate();
  const std::vector<double> l = cholesky_lower(cov.matrix3(), 3);
  Matrix e(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double z0 = rng.normal();
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    double* row = e.row(i);
    row[0] = l[0] * z0;
    row[1] = l[3] * z0 + l[4] * z1;
    row[2] = l[6] * z0 + l[7] * z1 + l[8] * z2;
  }
  return e;
}

Matrix gen_response(ResponseModel model, const Matrix& features, const Matrix& errors,
                    RandomSource& rng) {
  if (features.cols != 10) throw std::invalid_argument("gen_response: expected 10 features");
  if (errors.cols != 3 || errors.rows != features.rows)
    throw std::invalid_argument("gen_response: errors must be n x 3");
  const std::size_t n = features.rows;
  Matrix y(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = features.row(i);
    const double x1 = x[0], x2 = x[1], x3 = x[2], x5 = x[4];
    double signal = 0.0;
    double comp[3] = {0.0, 0.0, 0.0};
    bool componentwise = false;
    switch (model) {
      case ResponseModel::jump:
        signal = rng.unit() + (x3 > 1.0 ? 0.7 : 0.0);
        break;
      case ResponseModel::quadratic:
        signal = 0.8 * x2 * x2;
        break;
      case ResponseModel::cubic:
        signal = 0.02 * x2 * x2 * x2;
        break;
      case ResponseModel::additive:
        signal = (x3 > 1.0 ? 0.7 : 0.0);
        if (x5 >= 0.0 && x5 < 8.0) signal += 0.125 * (std::floor(x5) + 1.0);
        break;
      case ResponseModel::cross:
        signal = 0.5 * sign(x3 - 1.0) * x2;
        break;
      case ResponseModel::rjump:
        signal = sign(x3 - 1.0) * rng.unit();
        break;
      case ResponseModel::linear1:
        signal = x[0] + x[1] + x[2] + x[3] + x[4];
        break;
      case ResponseModel::linear2:
        for (std::size_t j = 0; j < 10; ++j) signal += x[j];
        break;
      case ResponseModel::mgam1:
        signal = x1 * x1 + std::log(x2) + std::cos(x3);
        break;
      case ResponseModel::mgam2:
        componentwise = true;
        comp[0] = 0.1 * std::sin(x1);
        comp[1] = 0.5 * std::log(x2);
        comp[2] = rng.unit();
        break;
      case ResponseModel::mgam3: {
        componentwise = true;
        double tail = 0.0;
        for (std::size_t j = 3; j < 10; ++j) tail += x[j];
        comp[0] = 0.1 * std::sin(x1) + tail;
        comp[1] = 0.5 * std::log(x2) + tail;
        comp[2] = rng.unit() + tail;
        break;
      }
    }
    const double* e = errors.row(i);
    double* out = y.row(i);
    if (componentwise)
      for (std::size_t j = 0; j < 3; ++j) out[j] = comp[j] + e[j];
    else
      for (std::size_t j = 0; j < 3; ++j) out[j] = signal + e[j];
  }
  return y;
}

Dataset make_dataset(const SimulationSetting& setting) {
  RandomSource rng(setting.seed);
  Dataset ds;
  ds.features = gen_features(static_cast<std::size_t>(setting.n), setting.dependence, rng);
  const Matrix errors = gen_errors(ds.features.rows, setting.cov, rng);
  ds.outputs = gen_response(setting.model, ds.features, errors, rng);
  return ds;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t j = 0; j < data.p(); ++j) out << "x" << (j + 1) << ",";
  for (std::size_t j = 0; j < data.d(); ++j)
    out << "y" << (j + 1) << (j + 1 == data.d() ? "" : ",");
  out << "\n";
  char buf[32];
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < data.p(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.features(i, j));
      out << buf << ",";
    }
    for (std::size_t j = 0; j < data.d(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.outputs(i, j));
      out << buf << (j + 1 == data.d() ? "" : ",");
    }
    out << "\n";
  }
}

}  // namespace mof
