#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace mof {

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

  double* row(std::size_t i) { return values.data() + i * cols; }
  const double* row(std::size_t i) const { return values.data() + i * cols; }

  std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }

  bool all_finite() const {
    for (double v : values) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

/// Training data: n rows with p features and d metric outputs each.
struct Dataset {
  Matrix features;  // n x p
  Matrix outputs;   // n x d

  std::size_t n() const { return features.rows; }
  std::size_t p() const { return features.cols; }
  std::size_t d() const { return outputs.cols; }

  void validate() const {
    if (features.rows == 0) throw std::invalid_argument("dataset: no rows");
    if (features.cols == 0) throw std::invalid_argument("dataset: no features");
    if (outputs.cols == 0) throw std::invalid_argument("dataset: no outputs");
    if (outputs.rows != features.rows)
      throw std::invalid_argument("dataset: feature/output row count mismatch");
    if (!features.all_finite() || !outputs.all_finite())
      throw std::invalid_argument("dataset: non-finite value");
  }

  /// Copy of the given rows (duplicates allowed), in the given order.
  Dataset select_rows(std::span<const std::int32_t> rows) const {
    Dataset out;
    out.features = Matrix(rows.size(), features.cols);
    out.outputs = Matrix(rows.size(), outputs.cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto r = static_cast<std::size_t>(rows[i]);
      for (std::size_t j = 0; j < features.cols; ++j) out.features(i, j) = features(r, j);
      for (std::size_t j = 0; j < outputs.cols; ++j) out.outputs(i, j) = outputs(r, j);
    }
    return out;
  }

  /// Copy keeping only the given output columns (features shared by copy).
  Dataset select_outputs(std::span<const std::size_t> output_columns) const {
    Dataset out;
    out.features = features;
    out.outputs = Matrix(outputs.rows, output_columns.size());
    for (std::size_t i = 0; i < outputs.rows; ++i)
      for (std::size_t j = 0; j < output_columns.size(); ++j)
        out.outputs(i, j) = outputs(i, output_columns[j]);
    return out;
  }
};

}  // namespace mof
