#pragma once

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "paratorus/paratorus.hpp"

namespace testutil {

using namespace paratorus;

inline TorusField to_field(const oracle::Spectrum& s, const Grid& g, bool real = true) {
  std::vector<cplx> spec(g.size(), cplx(0.0, 0.0));
  for (const auto& [k, c] : s) spec[g.index(k.first, k.second)] += c;
  return TorusField::from_spectral(g, std::move(spec), real);
}

/// max_k |f^(k) - s(k)| over every grid mode (s missing = 0); s must lie on the grid.
inline double spectral_gap(const TorusField& f, const oracle::Spectrum& s) {
  const Grid& g = f.grid();
  std::vector<cplx> ref(g.size(), cplx(0.0, 0.0));
  for (const auto& [k, c] : s) {
    if (!g.contains(k.first, k.second)) throw std::logic_error("oracle spectrum leaves the grid");
    ref[g.index(k.first, k.second)] += c;
  }
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(f.spectral()[i] - ref[i]));
  return m;
}

inline double sup_gap(const TorusField& a, const TorusField& b) { return (a - b).sup_norm(); }

/// Real random band-limited field, Hermitian spectrum on max(|k1|,|k2|) <= radius.
inline TorusField random_band_limited(const Grid& g, std::mt19937_64& rng, int radius, double decay = 1.0) {
  return to_field(oracle::random_real_spectrum(rng, radius, decay), g);
}

}  // namespace testutil
