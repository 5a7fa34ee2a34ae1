#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "paratorus/errors.hpp"

namespace paratorus {

/// Integer Fourier mode on the 2-torus.
struct Mode {
  int k1 = 0;
  int k2 = 0;

  friend bool operator==(const Mode&, const Mode&) = default;
  double norm() const { return std::hypot(static_cast<double>(k1), static_cast<double>(k2)); }
  int norm2() const { return k1 * k1 + k2 * k2; }
  Mode operator-() const { return {-k1, -k2}; }
  Mode operator+(const Mode& o) const { return {k1 + o.k1, k2 + o.k2}; }
  Mode operator-(const Mode& o) const { return {k1 - o.k1, k2 - o.k2}; }
};

namespace detail {

struct GridTables {
  int n = 0;
  std::vector<int> k1;        // signed first mode component per flat index
  std::vector<int> k2;
  std::vector<double> norm;   // |k|
  std::vector<double> norm2;  // |k|^2
};

inline std::shared_ptr<const GridTables> grid_tables(int n) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const GridTables>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto t = std::make_shared<GridTables>();
  t->n = n;
  const std::size_t size = static_cast<std::size_t>(n) * n;
  t->k1.resize(size);
  t->k2.resize(size);
  t->norm.resize(size);
  t->norm2.resize(size);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const std::size_t idx = static_cast<std::size_t>(a) * n + b;
      const int m1 = a < n / 2 ? a : a - n;
      const int m2 = b < n / 2 ? b : b - n;
      t->k1[idx] = m1;
      t->k2[idx] = m2;
      t->norm2[idx] = static_cast<double>(m1 * m1 + m2 * m2);
      t->norm[idx] = std::sqrt(t->norm2[idx]);
    }
  }
  cache.emplace(n, t);
  return t;
}

}  // namespace detail

/// Uniform n x n discretization of [0, 2pi)^2. Modes are the signed integers
/// {-n/2, ..., n/2-1} in each direction; flat index = row * n + col where the
/// row carries the first coordinate.
class Grid {
 public:
  Grid() = default;
  explicit Grid(int n) : n_(n) {
    if (n < 8 || n % 2 != 0) {
      throw ConfigError("grid size must be an even integer >= 8, got " + std::to_string(n));
    }
    tables_ = detail::grid_tables(n);
  }

  int n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
  double spacing() const { return 2.0 * std::numbers::pi / n_; }
  int nyquist() const { return n_ / 2; }

  bool contains(int k1, int k2) const {
    return k1 >= -n_ / 2 && k1 < n_ / 2 && k2 >= -n_ / 2 && k2 < n_ / 2;
  }
  bool contains(const Mode& k) const { return contains(k.k1, k.k2); }

  /// Flat spectral index of a mode (wraps modulo n).
  std::size_t index(int k1, int k2) const {
    const int a = ((k1 % n_) + n_) % n_;
    const int b = ((k2 % n_) + n_) % n_;
    return static_cast<std::size_t>(a) * n_ + b;
  }
  std::size_t index(const Mode& k) const { return index(k.k1, k.k2); }

  Mode mode(std::size_t idx) const { return {tables_->k1[idx], tables_->k2[idx]}; }
  const std::vector<double>& mode_norms() const { return tables_->norm; }
  const std::vector<double>& mode_norms2() const { return tables_->norm2; }

  /// True if either component sits on the unpaired -n/2 frequency.
  bool is_nyquist(std::size_t idx) const {
    return tables_->k1[idx] == -n_ / 2 || tables_->k2[idx] == -n_ / 2;
  }

  /// Largest |k| over the stored modes.
  double max_mode_norm() const { return std::sqrt(2.0) * (n_ / 2); }

  friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_; }

 private:
  int n_ = 0;
  std::shared_ptr<const detail::GridTables> tables_;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    throw ArgumentError(std::string(what) + ": grid mismatch (" + std::to_string(a.n()) + " vs " +
                        std::to_string(b.n()) + ")");
  }
}

}  // namespace paratorus
