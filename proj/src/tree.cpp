#include "mof/tree.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mof/detail/node_stats.hpp"

namespace mof {

namespace {

using detail::NodeStats;
using detail::compute_node_stats;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Running best over candidate splits. Only a strictly better score replaces
// the incumbent, so visiting features in ascending index order and thresholds
// in ascending order implements the (lowest feature, lowest threshold) tie rule.
struct BestSplit {
  double score = kInf;
  int feature = -1;
  double threshold = 0.0;

  bool valid() const { return feature >= 0; }
  void offer(double s, int f, double t) {
    if (s < score) {
      score = s;
      feature = f;
      threshold = t;
    }
  }
};

// Midpoint between two consecutive distinct sorted values, nudged down when
// rounding would land on the upper value (the routing rule is "<= goes left").
double split_midpoint(double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  return mid < hi ? mid : lo;
}

// Exhaustive CART scan over one feature. `order` holds the node rows sorted
// ascending by feature f (ties by row index); m >= 2. Scores are sums of the
// two child impurities around the parent mean.
void scan_sorted_feature(const Matrix& features, const Matrix& outputs, int f,
                         const std::int32_t* order, std::size_t m,
                         const double* mean, const double* dev, double total_sq,
                         std::size_t min_leaf, double* left_dev, BestSplit& best) {
  if (m < 2 * min_leaf) return;  // no feasible boundary
  const std::size_t d = outputs.cols;
  std::fill(left_dev, left_dev + d, 0.0);
  double left_sq = 0.0;
  double prev = features(static_cast<std::size_t>(order[0]), static_cast<std::size_t>(f));
  const std::size_t k_hi = m - min_leaf;
  for (std::size_t k = 1; k < m; ++k) {
    const double* y = outputs.row(static_cast<std::size_t>(order[k - 1]));
    for (std::size_t j = 0; j < d; ++j) {
      const double dy = y[j] - mean[j];
      left_dev[j] += dy;
      left_sq += dy * dy;
    }
    const double x =
        features(static_cast<std::size_t>(order[k]), static_cast<std::size_t>(f));
    if (x != prev) {
      if (k >= min_leaf && k <= k_hi) {
        double lsum = 0.0, rsum = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          lsum += left_dev[j] * left_dev[j];
          const double r = dev[j] - left_dev[j];
          rsum += r * r;
        }
        double left = left_sq - lsum / static_cast<double>(k);
        double right = (total_sq - left_sq) - rsum / static_cast<double>(m - k);
        if (left < 0.0) left = 0.0;
        if (right < 0.0) right = 0.0;
        best.offer(left + right, f, split_midpoint(prev, x));
      }
      prev = x;
    }
  }
}

// Scores one random cut on feature f; single pass over the node rows.
void score_random_cut(const Matrix& features, const Matrix& outputs, int f,
                      const std::int32_t* rows, std::size_t m, double cut,
                      const double* mean, const double* dev, double total_sq,
                      std::size_t min_leaf, double* left_dev, BestSplit& best) {
  const std::size_t d = outputs.cols;
  std::fill(left_dev, left_dev + d, 0.0);
  double left_sq = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<std::size_t>(rows[i]);
    if (features(r, static_cast<std::size_t>(f)) <= cut) {
      ++k;
      const double* y = outputs.row(r);
      for (std::size_t j = 0; j < d; ++j) {
        const double dy = y[j] - mean[j];
        left_dev[j] += dy;
        left_sq += dy * dy;
      }
    }
  }
  if (k < min_leaf || m - k < min_leaf) return;
  double lsum = 0.0, rsum = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    lsum += left_dev[j] * left_dev[j];
    const double r = dev[j] - left_dev[j];
    rsum += r * r;
  }
  double left = left_sq - lsum / static_cast<double>(k);
  double right = (total_sq - left_sq) - rsum / static_cast<double>(m - k);
  if (left < 0.0) left = 0.0;
  if (right < 0.0) right = 0.0;
  best.offer(left + right, f, cut);
}

void check_split_preconditions(const Dataset& data, std::span<const std::int32_t> rows,
                               std::span<const int> candidate_features, int min_leaf_size) {
  if (rows.size() < 2) throw std::invalid_argument("split: node needs at least 2 samples");
  if (candidate_features.empty())
    throw std::invalid_argument("split: empty candidate feature set");
  if (min_leaf_size < 1) throw std::invalid_argument("split: min_leaf_size must be >= 1");
  for (int f : candidate_features)
    if (f < 0 || static_cast<std::size_t>(f) >= data.p())
      throw std::invalid_argument("split: feature index out of range");
}

std::vector<int> ascending_features(std::span<const int> candidate_features) {
  std::vector<int> feats(candidate_features.begin(), candidate_features.end());
  std::sort(feats.begin(), feats.end());
  feats.erase(std::unique(feats.begin(), feats.end()), feats.end());
  return feats;
}

class Grower {
 public:
  Grower(const Dataset& data, const GrowConfig& cfg, RandomSource& rng,
         const FeaturePresort* presort)
      : data_(data),
        cfg_(cfg),
        rng_(rng),
        presort_(presort),
        p_(data.p()),
        d_(data.d()),
        min_leaf_(static_cast<std::size_t>(cfg.min_leaf_size)),
        exhaustive_(cfg.split_mode == SplitMode::exhaustive),
        tree_(data.d()) {
    mean_.resize(d_);
    dev_.resize(d_);
    left_dev_.resize(d_);
    cuts_.reserve(static_cast<std::size_t>(cfg.num_random_cuts));
  }

  Tree run(std::span<const std::int32_t> rows) {
    total_ = rows.size();
    buf_.resize(total_);
    goes_left_.assign(data_.n(), 0);
    if (exhaustive_) {
      sorted_.resize(p_ * total_);
      if (presort_ != nullptr && presort_->n == data_.n() && presort_->p == p_) {
        // Derive each feature's sorted multiset by walking the shared order.
        counts_.assign(data_.n(), 0);
        for (const std::int32_t r : rows) ++counts_[static_cast<std::size_t>(r)];
        for (std::size_t f = 0; f < p_; ++f) {
          std::int32_t* out = sorted_.data() + f * total_;
          for (const std::int32_t r : presort_->feature(f)) {
            const std::uint32_t c = counts_[static_cast<std::size_t>(r)];
            for (std::uint32_t k = 0; k < c; ++k) *out++ = r;
          }
        }
      } else {
        for (std::size_t f = 0; f < p_; ++f) {
          std::int32_t* out = sorted_.data() + f * total_;
          std::copy(rows.begin(), rows.end(), out);
          const Matrix& x = data_.features;
          std::sort(out, out + total_, [&](std::int32_t a, std::int32_t b) {
            const double va = x(static_cast<std::size_t>(a), f);
            const double vb = x(static_cast<std::size_t>(b), f);
            return va < vb || (va == vb && a < b);
          });
        }
      }
    } else {
      rows_.assign(rows.begin(), rows.end());
    }
    build(0, total_);
    return std::move(tree_);
  }

 private:
  std::int32_t build(std::size_t lo, std::size_t hi) {
    const std::size_t m = hi - lo;
    const std::int32_t* node_rows = exhaustive_ ? sorted_.data() + lo : rows_.data() + lo;
    const NodeStats st =
        compute_node_stats(data_.outputs, node_rows, m, mean_.data(), dev_.data());
    if (m < 2 * min_leaf_ || st.constant_outputs)
      return tree_.add_leaf(mean_, m);

    const std::vector<int> feats = sample_features(rng_, p_, cfg_.m_try);
    BestSplit best;
    if (exhaustive_) {
      for (int f : feats) {
        const std::int32_t* order = sorted_.data() + static_cast<std::size_t>(f) * total_ + lo;
        scan_sorted_feature(data_.features, data_.outputs, f, order, m, mean_.data(),
                            dev_.data(), st.total_sq, min_leaf_, left_dev_.data(), best);
      }
    } else {
      for (int f : feats) {
        const auto fc = static_cast<std::size_t>(f);
        double flo = data_.features(static_cast<std::size_t>(node_rows[0]), fc);
        double fhi = flo;
        for (std::size_t i = 1; i < m; ++i) {
          const double v = data_.features(static_cast<std::size_t>(node_rows[i]), fc);
          flo = std::min(flo, v);
          fhi = std::max(fhi, v);
        }
        if (!(flo < fhi)) continue;
        cuts_.clear();
        for (int c = 0; c < cfg_.num_random_cuts; ++c) {
          const double u = flo + (fhi - flo) * rng_.unit_open();
          if (u > flo && u < fhi) cuts_.push_back(u);
        }
        std::sort(cuts_.begin(), cuts_.end());
        for (const double u : cuts_)
          score_random_cut(data_.features, data_.outputs, f, node_rows, m, u, mean_.data(),
                           dev_.data(), st.total_sq, min_leaf_, left_dev_.data(), best);
      }
    }
    if (!best.valid()) return tree_.add_leaf(mean_, m);

    const std::size_t left_count = partition(lo, hi, best.feature, best.threshold);
    assert(left_count >= min_leaf_ && m - left_count >= min_leaf_);
    const std::int32_t me = tree_.add_internal_placeholder();
    const std::int32_t left = build(lo, lo + left_count);
    const std::int32_t right = build(lo + left_count, hi);
    tree_.set_internal(me, best.feature, best.threshold, left, right);
    return me;
  }

  // Stable partition of the node range by "x <= threshold goes left".
  // Returns the left-child sample count.
  std::size_t partition(std::size_t lo, std::size_t hi, int feature, double threshold) {
    const auto fc = static_cast<std::size_t>(feature);
    std::size_t left_count = 0;
    if (exhaustive_) {
      const std::int32_t* seg = sorted_.data() + fc * total_;
      for (std::size_t i = lo; i < hi; ++i) {
        const auto r = static_cast<std::size_t>(seg[i]);
        goes_left_[r] = data_.features(r, fc) <= threshold ? 1 : 0;
      }
      for (std::size_t f = 0; f < p_; ++f) {
        std::int32_t* arr = sorted_.data() + f * total_;
        std::size_t w = lo, t = 0;
        for (std::size_t i = lo; i < hi; ++i) {
          const std::int32_t r = arr[i];
          if (goes_left_[static_cast<std::size_t>(r)])
            arr[w++] = r;
          else
            buf_[t++] = r;
        }
        std::copy(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(t), arr + w);
        left_count = w - lo;
      }
    } else {
      std::size_t w = lo, t = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        const std::int32_t r = rows_[i];
        if (data_.features(static_cast<std::size_t>(r), fc) <= threshold)
          rows_[w++] = r;
        else
          buf_[t++] = r;
      }
      std::copy(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(t),
                rows_.data() + w);
      left_count = w - lo;
    }
    return left_count;
  }

  const Dataset& data_;
  const GrowConfig& cfg_;
  RandomSource& rng_;
  const FeaturePresort* presort_;
  std::size_t p_, d_, min_leaf_;
  bool exhaustive_;
  std::size_t total_ = 0;
  std::vector<std::int32_t> sorted_;  // exhaustive: p blocks, one per feature
  std::vector<std::int32_t> rows_;    // random mode: node rows
  std::vector<std::int32_t> buf_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<double> mean_, dev_, left_dev_;
  std::vector<double> cuts_;
  Tree tree_;
};

}  // namespace

double node_impurity(const Matrix& outputs, std::span<const std::int32_t> rows) {
  if (rows.empty()) throw std::invalid_argument("node_impurity: empty node");
  const std::size_t d = outputs.cols;
  std::vector<double> mean(d), dev(d);
  const NodeStats st = compute_node_stats(outputs, rows.data(), rows.size(), mean.data(),
                                          dev.data());
  return st.total_sq;
}

double node_impurity(const Matrix& outputs) {
  if (outputs.rows == 0) throw std::invalid_argument("node_impurity: empty node");
  std::vector<std::int32_t> rows(outputs.rows);
  std::iota(rows.begin(), rows.end(), 0);
  return node_impurity(outputs, rows);
}

std::optional<SplitCandidate> best_split_exhaustive(const Dataset& data,
                                                    std::span<const std::int32_t> rows,
                                                    std::span<const int> candidate_features,
                                                    int min_leaf_size) {
  check_split_preconditions(data, rows, candidate_features, min_leaf_size);
  const std::size_t m = rows.size();
  const std::size_t d = data.d();
  std::vector<double> mean(d), dev(d), left_dev(d);
  const NodeStats st =
      compute_node_stats(data.outputs, rows.data(), m, mean.data(), dev.data());
  const std::vector<int> feats = ascending_features(candidate_features);
  std::vector<std::int32_t> order(rows.begin(), rows.end());
  BestSplit best;
  for (int f : feats) {
    const Matrix& x = data.features;
    const auto fc = static_cast<std::size_t>(f);
    std::copy(rows.begin(), rows.end(), order.begin());
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
      const double va = x(static_cast<std::size_t>(a), fc);
      const double vb = x(static_cast<std::size_t>(b), fc);
      return va < vb || (va == vb && a < b);
    });
    scan_sorted_feature(data.features, data.outputs, f, order.data(), m, mean.data(),
                        dev.data(), st.total_sq, static_cast<std::size_t>(min_leaf_size),
                        left_dev.data(), best);
  }
  if (!best.valid()) return std::nullopt;
  return SplitCandidate{best.feature, best.threshold, best.score};
}

std::optional<SplitCandidate> best_split_random(const Dataset& data,
                                                std::span<const std::int32_t> rows,
                                                std::span<const int> candidate_features,
                                                int min_leaf_size, int num_random_cuts,
                                                RandomSource& rng) {
  check_split_preconditions(data, rows, candidate_features, min_leaf_size);
  if (num_random_cuts < 1)
    throw std::invalid_argument("split: num_random_cuts must be >= 1");
  const std::size_t m = rows.size();
  const std::size_t d = data.d();
  std::vector<double> mean(d), dev(d), left_dev(d);
  const NodeStats st =
      compute_node_stats(data.outputs, rows.data(), m, mean.data(), dev.data());
  const std::vector<int> feats = ascending_features(candidate_features);
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(num_random_cuts));
  BestSplit best;
  for (int f : feats) {
    const auto fc = static_cast<std::size_t>(f);
    double lo = data.features(static_cast<std::size_t>(rows[0]), fc);
    double hi = lo;
    for (std::size_t i = 1; i < m; ++i) {
      const double v = data.features(static_cast<std::size_t>(rows[i]), fc);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(lo < hi)) continue;
    cuts.clear();
    for (int c = 0; c < num_random_cuts; ++c) {
      const double u = lo + (hi - lo) * rng.unit_open();
      if (u > lo && u < hi) cuts.push_back(u);
    }
    std::sort(cuts.begin(), cuts.end());
    for (const double u : cuts)
      score_random_cut(data.features, data.outputs, f, rows.data(), m, u, mean.data(),
                       dev.data(), st.total_sq, static_cast<std::size_t>(min_leaf_size),
                       left_dev.data(), best);
  }
  if (!best.valid()) return std::nullopt;
  return SplitCandidate{best.feature, best.threshold, best.score};
}

FeaturePresort presort_features(const Matrix& features) {
  FeaturePresort ps;
  ps.n = features.rows;
  ps.p = features.cols;
  ps.order.resize(ps.n * ps.p);
  for (std::size_t f = 0; f < ps.p; ++f) {
    std::int32_t* out = ps.order.data() + f * ps.n;
    std::iota(out, out + ps.n, 0);
    std::sort(out, out + ps.n, [&](std::int32_t a, std::int32_t b) {
      const double va = features(static_cast<std::size_t>(a), f);
      const double vb = features(static_cast<std::size_t>(b), f);
      return va < vb || (va == vb && a < b);
    });
  }
  return ps;
}

Tree grow_tree(const Dataset& data, std::span<const std::int32_t> rows,
               const GrowConfig& config, RandomSource& rng,
               const FeaturePresort* presort) {
  if (rows.empty()) throw std::invalid_argument("grow_tree: empty row set");
  if (config.m_try < 1 || static_cast<std::size_t>(config.m_try) > data.p())
    throw std::invalid_argument("grow_tree: m_try out of range");
  if (config.min_leaf_size < 1)
    throw std::invalid_argument("grow_tree: min_leaf_size must be >= 1");
  if (config.split_mode == SplitMode::random_cuts && config.num_random_cuts < 1)
    throw std::invalid_argument("grow_tree: num_random_cuts must be >= 1");
  Grower grower(data, config, rng, presort);
  return grower.run(rows);
}

std::vector<double> predict_tree(const Tree& tree, std::span<const double> x) {
  const auto mean = tree.predict(x);
  return {mean.begin(), mean.end()};
}

std::vector<int> sample_features(RandomSource& rng, std::size_t p, int m_try) {
  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  const auto k = static_cast<std::size_t>(m_try);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(p - i));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(k);
  std::sort(perm.begin(), perm.end());
  return perm;
}

}  // namespace mof
