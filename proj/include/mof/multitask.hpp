#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mof/matrix.hpp"
#include "mof/rng.hpp"

namespace mof {

/// A d-output regression problem stacked into n*d single-output rows in
/// task-major order: all task-1 rows first, then task-2, and so on. Task
/// labels run from 1 to d. Stacking assumes commensurate outputs; rescaling
/// is the caller's responsibility.
struct StackedDataset {
  Matrix features;                  // (n*d) x p, each original row repeated d times
  std::vector<double> targets;      // n*d
  std::vector<std::int32_t> tasks;  // n*d, labels in 1..d
  std::size_t n = 0;                // original row count
  std::size_t d = 0;                // task count
};

StackedDataset stack(const Dataset& data);

struct MultiTaskConfig {
  double alpha = 1.0;  // shrinkage weight of the node mean in the task feature
  int num_trees = 500;
  int m_try = 0;  // 0: floor(p/3) of the original feature count, at least 1
  int min_leaf_size = 5;
  int num_random_cuts = 1;
  std::uint64_t seed = 0;
  int num_threads = 1;
};

/// Task features f_t for every task present in a node:
///   f_t = (sum of task-t targets + alpha * node mean) / (|I_t| + alpha).
/// `count[t-1] == 0` marks a task with no samples in the node; its value
/// entry is unspecified.
struct TaskFeatureSet {
  std::vector<double> value;       // indexed by task-1
  std::vector<std::size_t> count;  // node samples per task
};

TaskFeatureSet task_features(std::span<const double> targets,
                             std::span<const std::int32_t> tasks, std::size_t d,
                             double alpha);

/// One random task split: a cut drawn uniformly from (min_t f_t, max_t f_t);
/// tasks with f_t <= cut go left. Score is the summed SSE of the two children.
/// Returns nullopt when fewer than two distinct task feature values exist in
/// the node or no feasible cut satisfies min_leaf_size.
struct TaskSplit {
  std::uint64_t left_mask = 0;  // bit t-1 set: task t goes left
  double cut = 0.0;
  double score = 0.0;
};

std::optional<TaskSplit> task_split_candidate(std::span<const double> targets,
                                              std::span<const std::int32_t> tasks,
                                              std::size_t d, double alpha,
                                              std::size_t min_leaf_size,
                                              RandomSource& rng);

struct MultiTaskNode {
  static constexpr std::int32_t kLeaf = -1;
  static constexpr std::int32_t kTaskSplit = -2;

  std::int32_t feature = kLeaf;  // >= 0: feature split; -2: task split
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t count = 0;        // leaf: stacked samples routed here
  double threshold = 0.0;        // feature threshold or task cut value
  std::uint64_t task_mask = 0;   // task split: tasks routed left
  double value = 0.0;            // leaf: mean stacked target

  bool is_leaf() const { return feature == kLeaf; }
  bool is_task_split() const { return feature == kTaskSplit; }
};

class MultiTaskTree {
 public:
  const std::vector<MultiTaskNode>& nodes() const { return nodes_; }

  std::size_t route(std::span<const double> x, std::int32_t task) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
      const MultiTaskNode& nd = nodes_[i];
      bool go_left;
      if (nd.is_task_split())
        go_left = (nd.task_mask >> (task - 1)) & 1u;
      else
        go_left = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold;
      i = static_cast<std::size_t>(go_left ? nd.left : nd.right);
    }
    return i;
  }

  double predict(std::span<const double> x, std::int32_t task) const {
    return nodes_[route(x, task)].value;
  }

  // Builder interface.
  std::int32_t add_leaf(double value, std::size_t count) {
    MultiTaskNode nd;
    nd.value = value;
    nd.count = static_cast<std::int32_t>(count);
    nodes_.push_back(nd);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }
  std::int32_t add_internal_placeholder() {
    nodes_.emplace_back();
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }
  void set_feature_split(std::int32_t index, int feature, double threshold,
                         std::int32_t left, std::int32_t right) {
    MultiTaskNode& nd = nodes_[static_cast<std::size_t>(index)];
    nd.feature = feature;
    nd.threshold = threshold;
    nd.left = left;
    nd.right = right;
  }
  void set_task_split(std::int32_t index, std::uint64_t mask, double cut,
                      std::int32_t left, std::int32_t right) {
    MultiTaskNode& nd = nodes_[static_cast<std::size_t>(index)];
    nd.feature = MultiTaskNode::kTaskSplit;
    nd.task_mask = mask;
    nd.threshold = cut;
    nd.left = left;
    nd.right = right;
  }

 private:
  std::vector<MultiTaskNode> nodes_;
};

/// Multi-task Extra Trees fitted on the stacked problem. Immutable after fit.
struct MultiTaskModel {
  MultiTaskConfig config;  // resolved
  std::size_t p = 0;
  std::size_t d = 0;
  std::vector<MultiTaskTree> trees;

  void predict(std::span<const double> x, std::span<double> out) const;
  std::vector<double> predict(std::span<const double> x) const;
  Matrix predict_rows(const Matrix& features) const;
};

/// Extra Trees on the stacked data where every node considers m_try random
/// feature splits plus one random task split.
MultiTaskModel fit_multitask(const Dataset& data, const MultiTaskConfig& config);

}  // namespace mof
