#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/grid.hpp"

namespace paratorus {

namespace detail {

inline double exp_bump_tail(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace detail

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, monotone on (0,1), built from
/// exp(-1/t).
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = detail::exp_bump_tail(t);
  const double b = detail::exp_bump_tail(1.0 - t);
  return a / (a + b);
}

/// Smooth Fourier cutoff chi: [0,inf) -> [0,1], equal to 1 on [0,1] and 0 on
/// [2,inf), monotone nonincreasing in between.
class CutoffProfile {
 public:
  double operator()(double r) const { return 1.0 - smooth_step(r - 1.0); }
  static std::string name() { return "exp-bump-step(1,2)"; }
};

/// Littlewood-Paley family on a grid: rho_{-1}(k) = chi(2|k|) and, for j >= 0,
/// rho_j(k) = chi(|k|/2^j) - chi(|k|/2^{j-1}), i.e. rho_j = rho_0(2^{-j} .)
/// with rho_j supported on the annulus 2^{j-1} <= |k| <= 2^{j+1}.
///
/// The top block j_max absorbs the corner modes beyond |k| = n/2 so that the
/// blocks sum to one on every stored mode.
class DyadicPartition {
 public:
  DyadicPartition() = default;

  explicit DyadicPartition(const Grid& g) : grid_(g) {
    int j = 0;
    while ((1 << (j + 1)) <= g.n() / 2) ++j;
    j_max_ = j;
    if (j_max_ < 1) throw ConfigError("make_partition: grid too small to host two annuli");
    const CutoffProfile chi;
    const auto& norms = g.mode_norms();
    weights_.assign(block_count(), std::vector<double>(g.size(), 0.0));
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = norms[i];
      weights_[0][i] = chi(2.0 * r);
      double below = weights_[0][i];
      for (int jj = 0; jj < j_max_; ++jj) {
        const double w = chi(r / std::ldexp(1.0, jj)) - chi(r / std::ldexp(1.0, jj - 1));
        weights_[static_cast<std::size_t>(jj + 1)][i] = w;
        below += w;
      }
      weights_[static_cast<std::size_t>(j_max_ + 1)][i] = 1.0 - below;
    }
  }

  const Grid& grid() const { return grid_; }
  int j_min() const { return -1; }
  int j_max() const { return j_max_; }
  int block_count() const { return j_max_ + 2; }

  /// Weights rho_j on every flat mode index.
  const std::vector<double>& weights(int j) const {
    check_block(j);
    return weights_[static_cast<std::size_t>(j + 1)];
  }
  double rho(int j, std::size_t idx) const { return weights(j)[idx]; }

  /// Closed annulus containing the support of rho_j (inner radius 0 for j=-1).
  std::pair<double, double> annulus(int j) const {
    check_block(j);
    if (j == -1) return {0.0, 1.0};
    return {std::ldexp(1.0, j - 1), j == j_max_ ? grid_.max_mode_norm() : std::ldexp(1.0, j + 1)};
  }

  void check_block(int j) const {
    if (j < -1 || j > j_max_) {
      throw ArgumentError("block index " + std::to_string(j) + " outside [-1, " +
                          std::to_string(j_max_) + "]");
    }
  }

 private:
  Grid grid_;
  int j_max_ = 0;
  std::vector<std::vector<double>> weights_;
};

inline DyadicPartition make_partition(const Grid& g) { return DyadicPartition(g); }

/// Shared, lazily built partition for a grid size.
inline std::shared_ptr<const DyadicPartition> partition_for(const Grid& g) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const DyadicPartition>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(g.n());
  if (it != cache.end()) return it->second;
  auto p = std::make_shared<const DyadicPartition>(g);
  cache.emplace(g.n(), p);
  return p;
}

}  // namespace paratorus
