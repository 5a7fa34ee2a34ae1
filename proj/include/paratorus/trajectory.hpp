#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/field.hpp"
#include "paratorus/spectral.hpp"

namespace paratorus {

/// Fields on a uniform time grid t_m = m * dt, m = 0..M.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(double dt, std::vector<TorusField> fields) : dt_(dt), fields_(std::move(fields)) {
    if (fields_.empty()) throw ArgumentError("trajectory: no time nodes");
    if (fields_.size() > 1 && !(dt_ > 0.0)) throw ArgumentError("trajectory: step must be positive");
    for (const auto& f : fields_) require_same_grid(fields_.front().grid(), f.grid(), "trajectory");
  }

  std::size_t size() const { return fields_.size(); }
  bool empty() const { return fields_.empty(); }
  double dt() const { return dt_; }
  double time(std::size_t m) const { return dt_ * static_cast<double>(m); }
  double horizon() const { return dt_ * static_cast<double>(fields_.size() - 1); }
  const Grid& grid() const { return fields_.front().grid(); }
  const TorusField& operator[](std::size_t m) const { return fields_[m]; }
  const TorusField& back() const { return fields_.back(); }
  const std::vector<TorusField>& fields() const { return fields_; }

  friend Trajectory operator-(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size()) throw ArgumentError("trajectory difference: node count mismatch");
    std::vector<TorusField> out;
    out.reserve(a.size());
    for (std::size_t m = 0; m < a.size(); ++m) out.push_back(a[m] - b[m]);
    return Trajectory(a.dt_, std::move(out));
  }

 private:
  double dt_ = 0.0;
  std::vector<TorusField> fields_;
};

/// Hoelder-in-time seminorm sup_{s<t} ||u(t)-u(s)||_inf / |t-s|^{exponent}
/// over node pairs.
inline double time_hoelder_seminorm(const Trajectory& u, double exponent) {
  double best = 0.0;
  for (std::size_t a = 0; a < u.size(); ++a) {
    for (std::size_t b = a + 1; b < u.size(); ++b) {
      double d = 0.0;
      const auto& pa = u[a].physical();
      const auto& pb = u[b].physical();
      for (std::size_t i = 0; i < pa.size(); ++i) d = std::max(d, std::abs(pa[i] - pb[i]));
      best = std::max(best, d / std::pow(u.time(b) - u.time(a), exponent));
    }
  }
  return best;
}

/// Discrete parabolic alpha-Hoelder norm: the larger of sup_t ||u(t)||_{C^alpha}
/// and the alpha/2 Hoelder-in-time seminorm in L-infinity.
inline double parabolic_norm(const Trajectory& u, double alpha) {
  if (u.size() < 2) throw ArgumentError("parabolic_norm: need at least two time nodes");
  double space = 0.0;
  for (const auto& f : u.fields()) space = std::max(space, besov_norm(f, alpha));
  return std::max(space, time_hoelder_seminorm(u, alpha / 2.0));
}

/// sup_t ||u(t)||_inf.
inline double sup_time_sup_norm(const Trajectory& u) {
  double m = 0.0;
  for (const auto& f : u.fields()) m = std::max(m, f.sup_norm());
  return m;
}

}  // namespace paratorus
