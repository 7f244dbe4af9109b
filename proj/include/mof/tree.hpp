#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mof/matrix.hpp"
#include "mof/rng.hpp"

namespace mof {

enum class SplitMode {
  exhaustive,   // CART: best threshold among midpoints of consecutive distinct values
  random_cuts,  // Extra-Trees: best among randomly drawn cut points
};

struct GrowConfig {
  int m_try = 1;            // candidate features sampled per node
  int min_leaf_size = 5;    // minimum samples per terminal node
  int num_random_cuts = 1;  // cut points per candidate feature (random mode)
  SplitMode split_mode = SplitMode::exhaustive;
};

struct SplitCandidate {
  int feature_index = -1;
  double threshold = 0.0;
  double score = 0.0;  // sum of child-node impurities, lower is better
};

struct TreeNode {
  std::int32_t feature = -1;  // >= 0: split feature; -1: leaf
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t leaf_offset = -1;  // leaf: index into the leaf-mean pool
  std::int32_t count = 0;         // leaf: training samples routed here
  double threshold = 0.0;

  bool is_leaf() const { return feature < 0; }
};

/// A fitted regression tree for d-dimensional outputs. Samples with
/// feature value <= threshold are routed left.
class Tree {
 public:
  Tree() = default;
  explicit Tree(std::size_t output_dim) : output_dim_(output_dim) {}

  std::size_t output_dim() const { return output_dim_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_leaves() const { return leaf_means_.size() / output_dim_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  /// Index of the leaf node x is routed to.
  std::size_t route(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
      const TreeNode& nd = nodes_[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(nd.feature)] <= nd.threshold
                                       ? nd.left
                                       : nd.right);
    }
    return i;
  }

  std::span<const double> leaf_mean(std::size_t node_index) const {
    return {leaf_means_.data() + nodes_[node_index].leaf_offset, output_dim_};
  }

  /// Mean output vector of the leaf x falls into.
  std::span<const double> predict(std::span<const double> x) const {
    return leaf_mean(route(x));
  }

  // Builder interface used during growth.
  std::int32_t add_leaf(std::span<const double> mean, std::size_t count) {
    TreeNode nd;
    nd.leaf_offset = static_cast<std::int32_t>(leaf_means_.size());
    nd.count = static_cast<std::int32_t>(count);
    leaf_means_.insert(leaf_means_.end(), mean.begin(), mean.end());
    nodes_.push_back(nd);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }
  std::int32_t add_internal_placeholder() {
    nodes_.emplace_back();
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }
  void set_internal(std::int32_t index, int feature, double threshold,
                    std::int32_t left, std::int32_t right) {
    TreeNode& nd = nodes_[static_cast<std::size_t>(index)];
    nd.feature = feature;
    nd.threshold = threshold;
    nd.left = left;
    nd.right = right;
  }

 private:
  std::size_t output_dim_ = 1;
  std::vector<TreeNode> nodes_;
  std::vector<double> leaf_means_;  // num_leaves x output_dim
};

/// Sum over the given output rows of the squared Euclidean distance to their
/// mean vector (two-pass). For d=1 this is the CART SSE criterion.
/// Throws std::invalid_argument on an empty input.
double node_impurity(const Matrix& outputs);
double node_impurity(const Matrix& outputs, std::span<const std::int32_t> rows);

/// Best CART split over every candidate feature and every midpoint between
/// consecutive distinct sorted values; both children must hold at least
/// min_leaf_size samples. Ties break toward the lowest feature index, then
/// the lowest threshold. Returns nullopt when no feasible split exists.
std::optional<SplitCandidate> best_split_exhaustive(const Dataset& data,
                                                    std::span<const std::int32_t> rows,
                                                    std::span<const int> candidate_features,
                                                    int min_leaf_size);

/// Extra-Trees search: per candidate feature draws num_random_cuts thresholds
/// uniformly from the open interval (min, max) of that feature over the node,
/// and returns the feasible candidate with the lowest score.
std::optional<SplitCandidate> best_split_random(const Dataset& data,
                                                std::span<const std::int32_t> rows,
                                                std::span<const int> candidate_features,
                                                int min_leaf_size, int num_random_cuts,
                                                RandomSource& rng);

/// Row orders per feature (ascending value, ties by row index), computed once
/// per training matrix and shared read-only by all trees of an ensemble.
struct FeaturePresort {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<std::int32_t> order;  // p blocks of n row indices

  std::span<const std::int32_t> feature(std::size_t f) const {
    return {order.data() + f * n, n};
  }
};

FeaturePresort presort_features(const Matrix& features);

/// Grows one unpruned tree on the given row multiset. A node becomes a leaf
/// when it holds fewer than 2*min_leaf_size samples, its outputs are constant,
/// or no feasible split is found among the m_try sampled features.
/// `presort` is an optional shared acceleration structure for exhaustive mode;
/// it never changes the result.
Tree grow_tree(const Dataset& data, std::span<const std::int32_t> rows,
               const GrowConfig& config, RandomSource& rng,
               const FeaturePresort* presort = nullptr);

/// Leaf-mean prediction for a single feature vector.
std::vector<double> predict_tree(const Tree& tree, std::span<const double> x);

/// m_try distinct feature indices, uniform without replacement, ascending.
std::vector<int> sample_features(RandomSource& rng, std::size_t p, int m_try);

}  // namespace mof
