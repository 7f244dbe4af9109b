#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "mof/evaluation.hpp"

namespace mof {

/// The five compared learners.
enum class MethodKind { rf_univ, rf_multi, et_univ, et_multi, et_mt };

inline constexpr std::array<MethodKind, 5> kAllMethods = {
    MethodKind::rf_univ, MethodKind::rf_multi, MethodKind::et_univ,
    MethodKind::et_multi, MethodKind::et_mt};

std::string_view method_name(MethodKind kind);
std::optional<MethodKind> parse_method(std::string_view name);

struct MethodConfig {
  MethodKind kind = MethodKind::rf_multi;
  int num_trees = 500;
  int m_try = 0;  // 0: floor(p/3)
  int min_leaf_size = 5;
  int num_random_cuts = 1;
  double alpha = 1.0;  // multi-task only
  int num_threads = 1;
};

/// Adapts a method to the evaluation interface; the returned closure fits a
/// fresh model for the given training data and seed.
FitFunction make_fitter(const MethodConfig& config);

}  // namespace mof
