#pragma once

// Bony decomposition uv = P_u v + Pi(u,v) + P_v u on the discrete torus and
// the operators built on it. Every block product is dealiased, so the three
// pieces add up to the dealiased product exactly.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/field.hpp"
#include "paratorus/nonlinear.hpp"
#include "paratorus/partition.hpp"
#include "paratorus/spectral.hpp"
#include "paratorus/trajectory.hpp"

namespace paratorus {

namespace detail {

/// Accumulates the padded-grid values of (a^ * wa) times (b^ * wb).
inline void accumulate_padded_product(std::vector<cplx>& acc, const PadMap& pm,
                                      std::span<const cplx> a, std::span<const double> wa,
                                      std::span<const cplx> b, std::span<const double> wb) {
  const auto pa = padded_values(pm, a, wa);
  const auto pb = padded_values(pm, b, wb);
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += pa[i] * pb[i];
}

inline bool any_weighted(std::span<const cplx> s, std::span<const double> w) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (w[i] != 0.0 && s[i] != cplx(0.0, 0.0)) return true;
  return false;
}

/// sum over j of B(W_j u, Delta_j v) with W_j = sum_{i : keep(i, j)} rho_i.
template <class Keep>
TorusField block_pair_sum(const TorusField& u, const TorusField& v, Keep keep) {
  const Grid& g = u.grid();
  auto part = partition_for(g);
  auto pm = pad_map(g.n());
  std::vector<cplx> acc(static_cast<std::size_t>(pm->m) * pm->m, cplx(0.0, 0.0));
  std::vector<double> low(g.size());
  bool touched = false;
  for (int j = -1; j <= part->j_max(); ++j) {
    const auto& rj = part->weights(j);
    if (!any_weighted(v.spectral(), rj)) continue;
    std::fill(low.begin(), low.end(), 0.0);
    bool any_i = false;
    for (int i = -1; i <= part->j_max(); ++i) {
      if (!keep(i, j)) continue;
      const auto& ri = part->weights(i);
      for (std::size_t q = 0; q < low.size(); ++q) low[q] += ri[q];
      any_i = true;
    }
    if (!any_i || !any_weighted(u.spectral(), low)) continue;
    accumulate_padded_product(acc, *pm, u.spectral(), low, v.spectral(), rj);
    touched = true;
  }
  const bool real = u.is_real() && v.is_real();
  if (!touched) return TorusField::from_spectral(g, std::vector<cplx>(g.size()), real);
  return TorusField::from_spectral(g, truncate_from_padded(*pm, acc), real);
}

}  // namespace detail

/// Paraproduct P_u v = sum_{i < j-1} Delta_i u Delta_j v.
inline TorusField para(const TorusField& u, const TorusField& v) {
  require_same_grid(u.grid(), v.grid(), "para");
  return detail::block_pair_sum(u, v, [](int i, int j) { return i < j - 1; });
}

/// Resonant product Pi(u,v) = sum_{|i-j| <= 1} Delta_i u Delta_j v.
inline TorusField resonant(const TorusField& u, const TorusField& v) {
  require_same_grid(u.grid(), v.grid(), "resonant");
  return detail::block_pair_sum(u, v, [](int i, int j) { return std::abs(i - j) <= 1; });
}

/// C(u,v,w) = Pi(P_u v, w) - u Pi(v,w).
inline TorusField corrector(const TorusField& u, const TorusField& v, const TorusField& w) {
  require_same_grid(u.grid(), v.grid(), "corrector");
  require_same_grid(u.grid(), w.grid(), "corrector");
  return resonant(para(u, v), w) - dealiased_product(u, resonant(v, w));
}

/// P_{h1}(P_{h2} h3) - P_{h1 h2} h3.
inline TorusField merge_defect(const TorusField& h1, const TorusField& h2, const TorusField& h3) {
  require_same_grid(h1.grid(), h2.grid(), "merge_defect");
  require_same_grid(h1.grid(), h3.grid(), "merge_defect");
  return para(h1, para(h2, h3)) - para(dealiased_product(h1, h2), h3);
}

/// Paralinearization remainder R_f(u) = f(u) - P_{f'(u)} u.
inline TorusField paralin_remainder(const NonlinearFn& f, const TorusField& u) {
  return u.mapped(f.f) - para(u.mapped(f.d1), u);
}

/// Compactly supported time mollifier phi(x) ~ exp(-1/(1-x^2)) on (-1,1),
/// integrated with composite Simpson rules whose normalization makes the
/// discrete mass exactly one.
class TimeMollifier {
 public:
  explicit TimeMollifier(int base_intervals = 32) : base_intervals_(base_intervals) {
    if (base_intervals_ < 2 || base_intervals_ % 2 != 0) {
      throw ArgumentError("TimeMollifier: interval count must be even and >= 2");
    }
  }

  static double bump(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
  }

  static std::string name() { return "exp(-1/(1-x^2)) on (-1,1), composite Simpson"; }
  int base_intervals() const { return base_intervals_; }
  double support_radius() const { return 1.0; }

  /// Simpson nodes x_q in [-1,1] and weights w_q with sum_q w_q = 1.
  std::pair<std::vector<double>, std::vector<double>> rule(int intervals) const {
    std::vector<double> x(static_cast<std::size_t>(intervals) + 1), w(x.size());
    const double h = 2.0 / intervals;
    double mass = 0.0;
    for (int q = 0; q <= intervals; ++q) {
      x[q] = -1.0 + q * h;
      const double c = (q == 0 || q == intervals) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
      w[q] = c * h / 3.0 * bump(x[q]);
      mass += w[q];
    }
    for (auto& v : w) v /= mass;
    return {std::move(x), std::move(w)};
  }

  /// Weights over trajectory nodes representing Q_i(f)(t_node) for a path f
  /// linearly interpolated between nodes and clamped to [0, T] outside.
  std::vector<double> node_weights(int block, std::size_t node, std::size_t node_count,
                                   double dt) const {
    std::vector<double> out(node_count, 0.0);
    if (node_count == 1) {
      out[0] = 1.0;
      return out;
    }
    const double scale = std::ldexp(1.0, -2 * block);  // 2^{-2i}
    const double horizon = dt * static_cast<double>(node_count - 1);
    // refine so that the rule resolves the piecewise-linear path
    int intervals = base_intervals_;
    const double span = 2.0 * scale;
    while (intervals < (1 << 16) && span / intervals > dt / 4.0) intervals *= 2;
    const auto [xs, ws] = rule(intervals);
    const double t = dt * static_cast<double>(node);
    for (std::size_t q = 0; q < xs.size(); ++q) {
      if (ws[q] == 0.0) continue;
      const double s = std::clamp(t - scale * xs[q], 0.0, horizon);
      const double pos = s / dt;
      auto lo = static_cast<std::size_t>(std::floor(pos));
      if (lo >= node_count - 1) {
        out[node_count - 1] += ws[q];
        continue;
      }
      const double frac = pos - static_cast<double>(lo);
      out[lo] += ws[q] * (1.0 - frac);
      out[lo + 1] += ws[q] * frac;
    }
    return out;
  }

 private:
  int base_intervals_;
};

namespace detail {

inline std::vector<cplx> weighted_spectrum(const Trajectory& f, const std::vector<double>& w) {
  std::vector<cplx> s(f.grid().size(), cplx(0.0, 0.0));
  for (std::size_t m = 0; m < w.size(); ++m) {
    if (w[m] == 0.0) continue;
    const auto& fm = f[m].spectral();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += w[m] * fm[i];
  }
  return s;
}

}  // namespace detail

/// Modified paraproduct (P-bar_f g)(t_node) = sum_{i<j-1} Delta_i(Q_j f)(t) Delta_j g(t)
/// at one node; g is a single field or a trajectory evaluated at the node.
inline TorusField modified_para_at(const Trajectory& f, const TorusField& g, std::size_t node,
                                   const TimeMollifier& m) {
  if (f.empty()) throw ArgumentError("modified_para: empty trajectory");
  require_same_grid(f.grid(), g.grid(), "modified_para");
  const Grid& grid = g.grid();
  auto part = partition_for(grid);
  auto pm = detail::pad_map(grid.n());
  std::vector<cplx> acc(static_cast<std::size_t>(pm->m) * pm->m, cplx(0.0, 0.0));
  std::vector<double> low(grid.size());
  bool touched = false;
  bool real = g.is_real();
  for (const auto& fm : f.fields()) real = real && fm.is_real();
  for (int j = 1; j <= part->j_max(); ++j) {
    const auto& rj = part->weights(j);
    if (!detail::any_weighted(g.spectral(), rj)) continue;
    std::fill(low.begin(), low.end(), 0.0);
    for (int i = -1; i < j - 1; ++i) {
      const auto& ri = part->weights(i);
      for (std::size_t q = 0; q < low.size(); ++q) low[q] += ri[q];
    }
    const auto w = m.node_weights(j, node, f.size(), f.dt());
    const auto qj = detail::weighted_spectrum(f, w);
    if (!detail::any_weighted(qj, low)) continue;
    detail::accumulate_padded_product(acc, *pm, qj, low, g.spectral(), rj);
    touched = true;
  }
  if (!touched) return TorusField::from_spectral(grid, std::vector<cplx>(grid.size()), real);
  return TorusField::from_spectral(grid, detail::truncate_from_padded(*pm, acc), real);
}

inline Trajectory modified_para(const Trajectory& f, const TorusField& g, const TimeMollifier& m) {
  if (f.empty()) throw ArgumentError("modified_para: empty trajectory");
  std::vector<TorusField> out;
  out.reserve(f.size());
  for (std::size_t node = 0; node < f.size(); ++node) out.push_back(modified_para_at(f, g, node, m));
  return Trajectory(f.dt(), std::move(out));
}

/// Time-dependent second argument: g(t_node) at each node.
inline Trajectory modified_para(const Trajectory& f, const Trajectory& g, const TimeMollifier& m) {
  if (f.empty() || g.empty()) throw ArgumentError("modified_para: empty trajectory");
  if (f.size() != g.size()) throw ArgumentError("modified_para: node count mismatch");
  std::vector<TorusField> out;
  out.reserve(f.size());
  for (std::size_t node = 0; node < f.size(); ++node) out.push_back(modified_para_at(f, g[node], node, m));
  return Trajectory(f.dt(), std::move(out));
}

}  // namespace paratorus
