#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/field.hpp"
#include "paratorus/parallel.hpp"
#include "paratorus/partition.hpp"
#include "paratorus/spectral.hpp"

namespace paratorus {

/// splitmix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Per-sample seed: splitmix64(master ^ splitmix64(index)).
inline std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

/// Standard normals from mt19937_64 through Box-Muller. The library
/// std::normal_distribution is implementation-defined, this is not.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;          // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct NoiseRealization {
  TorusField xi;
  std::uint64_t seed = 0;
  bool zero_mean = false;
  const Grid& grid() const { return xi.grid(); }
};

/// Discrete white noise: unit-variance complex Gaussians xi^(k) = (a + ib)/sqrt2
/// on the half-space k1 > 0 or (k1 = 0, k2 > 0), mirrored Hermitian; xi^(0)
/// real standard normal (or zero); the unpaired Nyquist modes are zero.
/// Draws happen in flat-index order, two normals per half-space mode.
inline NoiseRealization sample_white_noise(const Grid& g, std::uint64_t seed,
                                           bool zero_mean = false) {
  GaussianSource normal(seed);
  std::vector<cplx> spec(g.size(), cplx(0.0, 0.0));
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Mode k = g.mode(idx);
    if (g.is_nyquist(idx)) continue;
    if (k.k1 == 0 && k.k2 == 0) {
      const double z = normal();
      spec[idx] = zero_mean ? 0.0 : z;
      continue;
    }
    if (!(k.k1 > 0 || (k.k1 == 0 && k.k2 > 0))) continue;
    const double a = normal();
    const double b = normal();
    spec[idx] = cplx(a, b) * inv_sqrt2;
    spec[g.index(-k)] = cplx(a, -b) * inv_sqrt2;
  }
  return {TorusField::from_spectral(g, std::move(spec), true), seed, zero_mean};
}

/// chi(eps |k|) on every flat index.
inline std::vector<double> cutoff_weights(const Grid& g, double eps, const CutoffProfile& chi = {}) {
  if (!(eps > 0.0)) throw ArgumentError("regularize: epsilon must be positive");
  std::vector<double> w(g.size());
  const auto& norms = g.mode_norms();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = chi(eps * norms[i]);
  return w;
}

/// R^eps(u): spectrum multiplied by chi(eps |k|).
inline TorusField regularize(const TorusField& u, double eps, const CutoffProfile& chi = {}) {
  return u.multiplied(cutoff_weights(u.grid(), eps, chi));
}

/// X = -Delta^{-1} xi with zero mean.
inline TorusField make_X(const NoiseRealization& xi) { return inverse_laplacian(xi.xi); }
inline TorusField make_X(const TorusField& xi) { return inverse_laplacian(xi); }

struct RegularityRow {
  double eps;
  double gamma;
  double mean_norm;
};

struct RegularityReport {
  std::vector<RegularityRow> rows;
  std::vector<double> gammas;
  std::vector<double> slopes;   // log2 growth of the mean norm per halving of eps
  std::vector<bool> bounded;    // slope below the boundedness threshold
  double threshold = 0.25;
  /// Largest tested gamma whose norms stay bounded in eps (NaN if none).
  double largest_bounded_gamma = std::numeric_limits<double>::quiet_NaN();
};

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/// Empirical mean of besov_norm(xi^eps, gamma) over samples seeded
/// sample_seed(master, m), for every (eps, gamma).
inline RegularityReport noise_regularity_report(const Grid& g, std::uint64_t master, int samples,
                                                const std::vector<double>& eps_ladder,
                                                const std::vector<double>& gammas) {
  if (samples < 1) throw ArgumentError("noise_regularity_report: need at least one sample");
  const std::size_t ne = eps_ladder.size(), ng = gammas.size();
  std::vector<std::vector<double>> cutoffs;
  for (double e : eps_ladder) cutoffs.push_back(cutoff_weights(g, e));
  auto per_sample = parallel_map<std::vector<double>>(
      static_cast<std::size_t>(samples), [&](std::size_t m) {
        const auto xi = sample_white_noise(g, sample_seed(master, m));
        std::vector<double> out;
        out.reserve(ne * ng);
        for (std::size_t e = 0; e < ne; ++e) {
          const auto norms = besov_norms(xi.xi.multiplied(cutoffs[e]), gammas);
          out.insert(out.end(), norms.begin(), norms.end());
        }
        return out;
      });
  RegularityReport rep;
  rep.gammas = gammas;
  std::vector<double> mean(ne * ng, 0.0);
  for (const auto& s : per_sample)
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += s[i];
  for (auto& v : mean) v /= samples;
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t q = 0; q < ng; ++q) rep.rows.push_back({eps_ladder[e], gammas[q], mean[e * ng + q]});
  for (std::size_t q = 0; q < ng; ++q) {
    std::vector<double> x, y;
    for (std::size_t e = 0; e < ne; ++e) {
      x.push_back(std::log2(1.0 / eps_ladder[e]));
      y.push_back(std::log2(mean[e * ng + q]));
    }
    const double slope = ne >= 2 ? fit_slope(x, y) : 0.0;
    rep.slopes.push_back(slope);
    rep.bounded.push_back(slope < rep.threshold);
    if (slope < rep.threshold &&
        (std::isnan(rep.largest_bounded_gamma) || gammas[q] > rep.largest_bounded_gamma)) {
      rep.largest_bounded_gamma = gammas[q];
    }
  }
  return rep;
}

}  // namespace paratorus
