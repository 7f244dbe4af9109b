#include "mof/multitask.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mof/detail/node_stats.hpp"
#include "mof/parallel.hpp"
#include "mof/tree.hpp"

namespace mof {

StackedDataset stack(const Dataset& data) {
  data.validate();
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  const std::size_t d = data.d();
  StackedDataset out;
  out.n = n;
  out.d = d;
  out.features = Matrix(n * d, p);
  out.targets.resize(n * d);
  out.tasks.resize(n * d);
  for (std::size_t t = 0; t < d; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = t * n + i;
      for (std::size_t j = 0; j < p; ++j) out.features(r, j) = data.features(i, j);
      out.targets[r] = data.outputs(i, t);
      out.tasks[r] = static_cast<std::int32_t>(t + 1);
    }
  }
  return out;
}

TaskFeatureSet task_features(std::span<const double> targets,
                             std::span<const std::int32_t> tasks, std::size_t d,
                             double alpha) {
  if (targets.empty()) throw std::invalid_argument("task_features: empty node");
  if (targets.size() != tasks.size())
    throw std::invalid_argument("task_features: target/task length mismatch");
  TaskFeatureSet out;
  out.value.assign(d, 0.0);
  out.count.assign(d, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (tasks[i] < 1 || static_cast<std::size_t>(tasks[i]) > d)
      throw std::invalid_argument("task_features: task label out of range");
    const auto t = static_cast<std::size_t>(tasks[i] - 1);
    out.value[t] += targets[i];
    ++out.count[t];
    total += targets[i];
  }
  const double node_mean = total / static_cast<double>(targets.size());
  for (std::size_t t = 0; t < d; ++t) {
    if (out.count[t] == 0) continue;
    out.value[t] = (out.value[t] + alpha * node_mean) /
                   (static_cast<double>(out.count[t]) + alpha);
  }
  return out;
}

std::optional<TaskSplit> task_split_candidate(std::span<const double> targets,
                                              std::span<const std::int32_t> tasks,
                                              std::size_t d, double alpha,
                                              std::size_t min_leaf_size,
                                              RandomSource& rng) {
  if (d > 64) throw std::invalid_argument("task_split_candidate: more than 64 tasks");
  const TaskFeatureSet fs = task_features(targets, tasks, d, alpha);
  std::size_t present = 0;
  double fmin = std::numeric_limits<double>::infinity();
  double fmax = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < d; ++t) {
    if (fs.count[t] == 0) continue;
    ++present;
    fmin = std::min(fmin, fs.value[t]);
    fmax = std::max(fmax, fs.value[t]);
  }
  if (present < 2 || !(fmin < fmax)) return std::nullopt;

  const double cut = fmin + (fmax - fmin) * rng.unit_open();
  if (!(cut > fmin && cut < fmax)) return std::nullopt;  // degenerate rounding

  std::uint64_t mask = 0;
  for (std::size_t t = 0; t < d; ++t)
    if (fs.count[t] > 0 && fs.value[t] <= cut) mask |= std::uint64_t{1} << t;

  // Score the induced children: SSE around each child's mean, computed from
  // per-task accumulators centered on the node mean.
  const std::size_t m = targets.size();
  double node_mean = 0.0;
  for (const double y : targets) node_mean += y;
  node_mean /= static_cast<double>(m);
  std::vector<double> task_dev(d, 0.0), task_sq(d, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto t = static_cast<std::size_t>(tasks[i] - 1);
    const double dy = targets[i] - node_mean;
    task_dev[t] += dy;
    task_sq[t] += dy * dy;
  }
  double total_sq = 0.0, total_dev = 0.0;
  double left_sq = 0.0, left_dev = 0.0;
  std::size_t left_count = 0;
  for (std::size_t t = 0; t < d; ++t) {
    total_sq += task_sq[t];
    total_dev += task_dev[t];
    if ((mask >> t) & 1u) {
      left_sq += task_sq[t];
      left_dev += task_dev[t];
      left_count += fs.count[t];
    }
  }
  if (left_count < min_leaf_size || m - left_count < min_leaf_size) return std::nullopt;
  const double right_dev = total_dev - left_dev;
  double left = left_sq - left_dev * left_dev / static_cast<double>(left_count);
  double right = (total_sq - left_sq) -
                 right_dev * right_dev / static_cast<double>(m - left_count);
  if (left < 0.0) left = 0.0;
  if (right < 0.0) right = 0.0;
  return TaskSplit{mask, cut, left + right};
}

namespace {

MultiTaskConfig resolve_config(const MultiTaskConfig& config, const Dataset& data) {
  MultiTaskConfig cfg = config;
  if (cfg.m_try == 0) cfg.m_try = std::max<int>(1, static_cast<int>(data.p()) / 3);
  if (cfg.alpha < 0.0) throw std::invalid_argument("multitask: alpha must be >= 0");
  if (cfg.num_trees < 1) throw std::invalid_argument("multitask: num_trees must be >= 1");
  if (cfg.m_try < 1 || static_cast<std::size_t>(cfg.m_try) > data.p())
    throw std::invalid_argument("multitask: m_try out of range");
  if (cfg.min_leaf_size < 1)
    throw std::invalid_argument("multitask: min_leaf_size must be >= 1");
  if (cfg.num_random_cuts < 1)
    throw std::invalid_argument("multitask: num_random_cuts must be >= 1");
  if (data.d() > 64) throw std::invalid_argument("multitask: more than 64 outputs");
  return cfg;
}

// Extra-Trees growth on the stacked problem; every node considers the random
// feature splits plus one random task split. A feature split is preferred
// when scores tie exactly.
class StackedGrower {
 public:
  StackedGrower(const Dataset& view, std::span<const std::int32_t> tasks,
                std::size_t num_tasks, const MultiTaskConfig& cfg, RandomSource& rng)
      : view_(view),
        tasks_(tasks),
        num_tasks_(num_tasks),
        cfg_(cfg),
        rng_(rng),
        min_leaf_(static_cast<std::size_t>(cfg.min_leaf_size)) {}

  MultiTaskTree run(std::span<const std::int32_t> rows) {
    rows_.assign(rows.begin(), rows.end());
    buf_.resize(rows_.size());
    build(0, rows_.size());
    return std::move(tree_);
  }

 private:
  std::int32_t build(std::size_t lo, std::size_t hi) {
    const std::size_t m = hi - lo;
    const std::int32_t* node_rows = rows_.data() + lo;
    double mean = 0.0, dev = 0.0;
    const detail::NodeStats st =
        detail::compute_node_stats(view_.outputs, node_rows, m, &mean, &dev);
    if (m < 2 * min_leaf_ || st.constant_outputs) return tree_.add_leaf(mean, m);

    const std::vector<int> feats = sample_features(rng_, view_.p(), cfg_.m_try);
    const auto feature_split =
        best_split_random(view_, {node_rows, m}, feats, cfg_.min_leaf_size,
                          cfg_.num_random_cuts, rng_);

    node_targets_.resize(m);
    node_tasks_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto r = static_cast<std::size_t>(node_rows[i]);
      node_targets_[i] = view_.outputs(r, 0);
      node_tasks_[i] = tasks_[r];
    }
    const auto task_split = task_split_candidate(node_targets_, node_tasks_, num_tasks_,
                                                 cfg_.alpha, min_leaf_, rng_);

    const bool have_feature = feature_split.has_value();
    const bool have_task = task_split.has_value();
    if (!have_feature && !have_task) return tree_.add_leaf(mean, m);
    const bool use_task =
        have_task && (!have_feature || task_split->score < feature_split->score);

    std::size_t left_count;
    if (use_task) {
      const std::uint64_t mask = task_split->left_mask;
      left_count = partition(lo, hi, [&](std::size_t r) {
        return ((mask >> (tasks_[r] - 1)) & 1u) != 0;
      });
    } else {
      const int f = feature_split->feature_index;
      const double thr = feature_split->threshold;
      left_count = partition(lo, hi, [&](std::size_t r) {
        return view_.features(r, static_cast<std::size_t>(f)) <= thr;
      });
    }
    assert(left_count >= min_leaf_ && m - left_count >= min_leaf_);

    const std::int32_t me = tree_.add_internal_placeholder();
    const std::int32_t left = build(lo, lo + left_count);
    const std::int32_t right = build(lo + left_count, hi);
    if (use_task)
      tree_.set_task_split(me, task_split->left_mask, task_split->cut, left, right);
    else
      tree_.set_feature_split(me, feature_split->feature_index,
                              feature_split->threshold, left, right);
    return me;
  }

  template <typename Pred>
  std::size_t partition(std::size_t lo, std::size_t hi, Pred goes_left) {
    std::size_t w = lo, t = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::int32_t r = rows_[i];
      if (goes_left(static_cast<std::size_t>(r)))
        rows_[w++] = r;
      else
        buf_[t++] = r;
    }
    std::copy(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(t),
              rows_.data() + w);
    return w - lo;
  }

 private:
  const Dataset& view_;
  std::span<const std::int32_t> tasks_;
  std::size_t num_tasks_;
  const MultiTaskConfig& cfg_;
  RandomSource& rng_;
  std::size_t min_leaf_;
  std::vector<std::int32_t> rows_, buf_;
  std::vector<double> node_targets_;
  std::vector<std::int32_t> node_tasks_;
  MultiTaskTree tree_;
};

}  // namespace

MultiTaskModel fit_multitask(const Dataset& data, const MultiTaskConfig& config) {
  data.validate();
  const MultiTaskConfig cfg = resolve_config(config, data);
  StackedDataset stacked = stack(data);

  Dataset view;
  view.features = std::move(stacked.features);
  view.outputs = Matrix(stacked.targets.size(), 1);
  for (std::size_t i = 0; i < stacked.targets.size(); ++i)
    view.outputs(i, 0) = stacked.targets[i];

  MultiTaskModel model;
  model.config = cfg;
  model.p = data.p();
  model.d = data.d();
  model.trees.resize(static_cast<std::size_t>(cfg.num_trees));

  std::vector<std::int32_t> all_rows(view.n());
  std::iota(all_rows.begin(), all_rows.end(), 0);

  parallel_for(model.trees.size(), cfg.num_threads, [&](std::size_t b) {
    RandomSource rng(mix_seed(cfg.seed, 0, b));
    StackedGrower grower(view, stacked.tasks, data.d(), cfg, rng);
    model.trees[b] = grower.run(all_rows);
  });
  return model;
}

void MultiTaskModel::predict(std::span<const double> x, std::span<double> out) const {
  const auto num_trees = static_cast<double>(trees.size());
  for (std::size_t t = 0; t < d; ++t) {
    double acc = 0.0;
    for (const MultiTaskTree& tree : trees)
      acc += tree.predict(x, static_cast<std::int32_t>(t + 1));
    out[t] = acc / num_trees;
  }
}

std::vector<double> MultiTaskModel::predict(std::span<const double> x) const {
  std::vector<double> out(d);
  predict(x, out);
  return out;
}

Matrix MultiTaskModel::predict_rows(const Matrix& features) const {
  Matrix out(features.rows, d);
  for (std::size_t i = 0; i < features.rows; ++i)
    predict(features.row_span(i), {out.row(i), d});
  return out;
}

}  // namespace mof
