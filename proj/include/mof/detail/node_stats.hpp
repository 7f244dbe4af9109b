#pragma once

#include <cstddef>
#include <cstdint>

#include "mof/matrix.hpp"

namespace mof::detail {

struct NodeStats {
  std::size_t m = 0;
  double total_sq = 0.0;  // sum_i ||y_i - mean||^2, the node impurity
  bool constant_outputs = false;
};

/// Two-pass statistics over the node rows: mean, per-output deviation sums
/// (dev, ~0 up to rounding) and the total squared deviation. `mean` and `dev`
/// must hold outputs.cols entries. Shared by the tree grower and the stacked
/// multi-task grower so both follow the same arithmetic.
inline NodeStats compute_node_stats(const Matrix& outputs, const std::int32_t* rows,
                                    std::size_t m, double* mean, double* dev) {
  const std::size_t d = outputs.cols;
  NodeStats st;
  st.m = m;
  for (std::size_t j = 0; j < d; ++j) mean[j] = 0.0;
  bool constant = true;
  const double* first = outputs.row(static_cast<std::size_t>(rows[0]));
  for (std::size_t i = 0; i < m; ++i) {
    const double* y = outputs.row(static_cast<std::size_t>(rows[i]));
    for (std::size_t j = 0; j < d; ++j) {
      mean[j] += y[j];
      constant = constant && y[j] == first[j];
    }
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < d; ++j) mean[j] *= inv_m;
  for (std::size_t j = 0; j < d; ++j) dev[j] = 0.0;
  double total_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* y = outputs.row(static_cast<std::size_t>(rows[i]));
    for (std::size_t j = 0; j < d; ++j) {
      const double dy = y[j] - mean[j];
      dev[j] += dy;
      total_sq += dy * dy;
    }
  }
  st.total_sq = total_sq;
  st.constant_outputs = constant;
  return st;
}

}  // namespace mof::detail
