#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/field.hpp"
#include "paratorus/noise.hpp"
#include "paratorus/paraproducts.hpp"
#include "paratorus/parallel.hpp"
#include "paratorus/partition.hpp"
#include "paratorus/spectral.hpp"
#include "paratorus/symbols.hpp"

namespace paratorus {

/// The cutoff must vanish before the Nyquist radius: 2/eps <= n/2.
inline void require_resolved_cutoff(const Grid& g, double eps) {
  if (!(eps > 0.0)) throw ArgumentError("epsilon must be positive");
  if (2.0 / eps > g.nyquist() * (1.0 + 1e-12)) {
    throw ConfigError("epsilon " + std::to_string(eps) + " too small for n=" + std::to_string(g.n()) +
                      ": need 2/eps <= n/2, i.e. eps >= " + std::to_string(4.0 / g.n()));
  }
}

/// c(eps) = sum_p c_p(eps) e_p, the expectation of Pi(A(X^eps), xi^eps):
///   c_p = sum_{k != 0} chi(eps|k|)^2 a^(p,k) / |k|^2  sum_{|i-j|<=1} rho_i(k+p) rho_j(k).
/// Pairs whose image mode k+p leaves the grid are dropped, as apply_op does.
inline TorusField renorm_constant(const Symbol& a, double eps, const CutoffProfile& chi = {}) {
  const Grid& g = a.grid();
  require_resolved_cutoff(g, eps);
  auto part = partition_for(g);
  const int nb = part->block_count();
  // neighbourhood sums R_j = rho_{j-1} + rho_j + rho_{j+1}
  std::vector<std::vector<double>> near(static_cast<std::size_t>(nb), std::vector<double>(g.size(), 0.0));
  for (int j = -1; j <= part->j_max(); ++j)
    for (int i = std::max(-1, j - 1); i <= std::min(part->j_max(), j + 1); ++i) {
      const auto& ri = part->weights(i);
      auto& nj = near[static_cast<std::size_t>(j + 1)];
      for (std::size_t q = 0; q < g.size(); ++q) nj[q] += ri[q];
    }
  const auto cut = cutoff_weights(g, eps, chi);
  const auto& k2 = g.mode_norms2();
  std::vector<cplx> c(g.size(), cplx(0.0, 0.0));
  for (std::size_t k = 1; k < g.size(); ++k) {
    if (cut[k] == 0.0 || g.is_nyquist(k)) continue;
    const Mode km = g.mode(k);
    const double base = cut[k] * cut[k] / k2[k];
    for (const auto& e : a.row(k)) {
      const Mode img = km + e.p;
      if (!g.contains(img) || !g.contains(e.p)) continue;
      const std::size_t t = g.index(img);
      double w = 0.0;
      for (int j = -1; j <= part->j_max(); ++j) w += part->rho(j, k) * near[static_cast<std::size_t>(j + 1)][t];
      c[g.index(e.p)] += w * base * e.value;
    }
  }
  return TorusField::from_spectral(g, std::move(c), a.real_operator());
}

namespace detail {

// Same expectation summed block pair by block pair, used to cross-check the
// grouped evaluation above.
inline TorusField renorm_constant_by_block_pairs(const Symbol& a, double eps, const CutoffProfile& chi) {
  const Grid& g = a.grid();
  require_resolved_cutoff(g, eps);
  auto part = partition_for(g);
  const auto cut = cutoff_weights(g, eps, chi);
  std::vector<cplx> c(g.size(), cplx(0.0, 0.0));
  for (int i = -1; i <= part->j_max(); ++i) {
    for (int j = std::max(-1, i - 1); j <= std::min(part->j_max(), i + 1); ++j) {
      const auto& ri = part->weights(i);
      const auto& rj = part->weights(j);
      for (std::size_t k = 1; k < g.size(); ++k) {
        if (rj[k] == 0.0 || cut[k] == 0.0 || g.is_nyquist(k)) continue;
        const Mode km = g.mode(k);
        for (const auto& e : a.row(k)) {
          const Mode img = km + e.p;
          if (!g.contains(img) || !g.contains(e.p)) continue;
          const double wi = ri[g.index(img)];
          if (wi == 0.0) continue;
          c[g.index(e.p)] += e.value * (wi * rj[k] * cut[k] * cut[k] / g.mode_norms2()[k]);
        }
      }
    }
  }
  return TorusField::from_spectral(g, std::move(c), a.real_operator());
}

}  // namespace detail

struct RenormalizedProduct {
  TorusField product;   // Pi(A(X^eps), xi^eps) - c(eps)
  TorusField constant;  // c(eps)
  TorusField raw;       // Pi(A(X^eps), xi^eps)
};

/// Pi(A(X^eps), xi^eps) - c(eps) for one noise draw.
inline RenormalizedProduct renormalized_product(const Symbol& a, const NoiseRealization& xi, double eps,
                                                const CutoffProfile& chi = {}) {
  require_same_grid(a.grid(), xi.grid(), "renormalized_product");
  const TorusField xi_eps = regularize(xi.xi, eps, chi);
  const TorusField raw = resonant(apply_op(a, make_X(xi_eps)), xi_eps);
  TorusField c = detail::renorm_constant_by_block_pairs(a, eps, chi);
  return {raw - c, std::move(c), raw};
}

/// Norms of Pi((AX)^eps, xi^eps) - Pi(A(X^eps), xi^eps) and of Pi(A(X^eps), xi^eps)
/// in C^gamma.
struct CommutatorGap {
  double gap;
  double term;
};

inline CommutatorGap cutoff_commutator_gap(const Symbol& a, const NoiseRealization& xi, double eps,
                                           double gamma, const CutoffProfile& chi = {}) {
  const TorusField xi_eps = regularize(xi.xi, eps, chi);
  const TorusField after = resonant(apply_op(a, make_X(xi_eps)), xi_eps);
  const TorusField before = resonant(regularize(apply_op(a, make_X(xi)), eps, chi), xi_eps);
  return {besov_norm(before - after, gamma), besov_norm(after, gamma)};
}

struct EnhancedNoise {
  double eps = 0.0;
  std::uint64_t seed = 0;
  TorusField xi_eps;
  TorusField X_eps;
  TorusField piAX;
  TorusField piBX;
  TorusField c_a;
  TorusField c_b;
};

inline EnhancedNoise assemble_enhanced(const Symbol& a, const Symbol& b, const NoiseRealization& xi,
                                       double eps, const CutoffProfile& chi = {}) {
  require_same_grid(a.grid(), b.grid(), "assemble_enhanced");
  require_same_grid(a.grid(), xi.grid(), "assemble_enhanced");
  EnhancedNoise en;
  en.eps = eps;
  en.seed = xi.seed;
  en.xi_eps = regularize(xi.xi, eps, chi);
  en.X_eps = make_X(en.xi_eps);
  en.c_a = renorm_constant(a, eps, chi);
  en.c_b = renorm_constant(b, eps, chi);
  en.piAX = resonant(apply_op(a, en.X_eps), en.xi_eps) - en.c_a;
  en.piBX = resonant(apply_op(b, en.X_eps), en.xi_eps) - en.c_b;
  return en;
}

inline EnhancedNoise assemble_enhanced(const Symbol& a, const Symbol& b, double eps, std::uint64_t seed,
                                       const CutoffProfile& chi = {}) {
  return assemble_enhanced(a, b, sample_white_noise(a.grid(), seed), eps, chi);
}

struct CauchyRow {
  double eps;
  double eta;
  double gamma;
  double r;
  int samples;
  double moment;  // E ||Y^eps - Y^eta||^r_{C^gamma}
};

struct CauchyStudy {
  std::vector<double> ladder;
  std::vector<CauchyRow> rows;           // one per consecutive ladder pair
  std::vector<double> unrenorm_sup_mean; // E ||Pi(A(X^eps), xi^eps)||_inf per ladder entry
  std::vector<double> c_mean;            // spatial mean of c(eps) per ladder entry
  double c_slope = std::numeric_limits<double>::quiet_NaN();         // d c_mean / d log(1/eps)
  double unrenorm_slope = std::numeric_limits<double>::quiet_NaN();  // same for unrenorm_sup_mean
  double moment_slope = std::numeric_limits<double>::quiet_NaN();    // d log moment / d log eps
  bool strictly_decreasing = true;
};

/// Coupled-seed Monte Carlo for the renormalized resonant product along a
/// decreasing eps ladder: sample m uses the noise seeded sample_seed(master, m)
/// at every eps.
inline CauchyStudy cauchy_study(const Symbol& a, const std::vector<double>& ladder, int samples,
                                double r, double gamma, std::uint64_t master,
                                const CutoffProfile& chi = {}) {
  if (samples < 2) throw ArgumentError("cauchy_study: need at least two samples");
  if (ladder.empty()) throw ArgumentError("cauchy_study: empty epsilon ladder");
  for (std::size_t l = 1; l < ladder.size(); ++l)
    if (!(ladder[l] < ladder[l - 1])) throw ArgumentError("cauchy_study: ladder must be decreasing");
  const Grid& g = a.grid();
  for (double e : ladder) require_resolved_cutoff(g, e);
  const std::size_t ne = ladder.size();
  std::vector<TorusField> consts;
  for (double e : ladder) consts.push_back(renorm_constant(a, e, chi));

  // per sample: [sup norms per eps..., difference norms^r per pair...]
  auto per_sample = parallel_map<std::vector<double>>(
      static_cast<std::size_t>(samples), [&](std::size_t m) {
        const auto xi = sample_white_noise(g, sample_seed(master, m));
        std::vector<double> out(2 * ne - 1, 0.0);
        TorusField prev;
        for (std::size_t l = 0; l < ne; ++l) {
          const TorusField xi_eps = regularize(xi.xi, ladder[l], chi);
          const TorusField raw = resonant(apply_op(a, make_X(xi_eps)), xi_eps);
          out[l] = raw.sup_norm();
          TorusField y = raw - consts[l];
          if (l > 0) out[ne + l - 1] = std::pow(besov_norm(prev - y, gamma), r);
          prev = std::move(y);
        }
        return out;
      });

  CauchyStudy st;
  st.ladder = ladder;
  std::vector<double> mean(2 * ne - 1, 0.0);
  for (const auto& s : per_sample)
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += s[i];
  for (auto& v : mean) v /= samples;
  for (std::size_t l = 0; l < ne; ++l) {
    st.unrenorm_sup_mean.push_back(mean[l]);
    st.c_mean.push_back(consts[l].mean().real());
  }
  for (std::size_t l = 1; l < ne; ++l) {
    st.rows.push_back({ladder[l - 1], ladder[l], gamma, r, samples, mean[ne + l - 1]});
    if (l >= 2 && !(st.rows[l - 1].moment < st.rows[l - 2].moment)) st.strictly_decreasing = false;
  }
  if (ne >= 2) {
    std::vector<double> x;
    for (double e : ladder) x.push_back(std::log(1.0 / e));
    st.c_slope = fit_slope(x, st.c_mean);
    st.unrenorm_slope = fit_slope(x, st.unrenorm_sup_mean);
  }
  if (st.rows.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& row : st.rows) {
      x.push_back(std::log(row.eps));
      y.push_back(std::log(row.moment));
    }
    st.moment_slope = fit_slope(x, y);
  }
  return st;
}

/// Spatial means of c(eps) along a ladder and their slope against log(1/eps).
struct ConstantLadder {
  std::vector<double> ladder;
  std::vector<TorusField> constants;
  std::vector<double> means;
  std::vector<double> spreads;  // max - min over grid points
  double slope = std::numeric_limits<double>::quiet_NaN();
};

inline ConstantLadder renorm_constant_ladder(const Symbol& a, const std::vector<double>& ladder,
                                             const CutoffProfile& chi = {}) {
  ConstantLadder out;
  out.ladder = ladder;
  std::vector<double> x;
  for (double e : ladder) {
    out.constants.push_back(renorm_constant(a, e, chi));
    const auto& c = out.constants.back();
    out.means.push_back(c.mean().real());
    out.spreads.push_back(c.max_real() - c.min_real());
    x.push_back(std::log(1.0 / e));
  }
  if (ladder.size() >= 2) out.slope = fit_slope(x, out.means);
  return out;
}

}  // namespace paratorus
