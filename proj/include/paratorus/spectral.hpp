#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/field.hpp"
#include "paratorus/partition.hpp"

namespace paratorus {

/// Littlewood-Paley block Delta_j f, spectrum rho_j * f^.
inline TorusField lp_project(const TorusField& f, int j) {
  auto part = partition_for(f.grid());
  return f.multiplied(part->weights(j));
}

/// L-infinity norms of every block Delta_j f, j = -1..j_max (index j+1).
inline std::vector<double> block_sup_norms(const TorusField& f) {
  const Grid& g = f.grid();
  auto part = partition_for(g);
  std::vector<double> out(static_cast<std::size_t>(part->block_count()), 0.0);
  std::vector<cplx> spec(g.size()), phys(g.size());
  for (int j = -1; j <= part->j_max(); ++j) {
    const auto& w = part->weights(j);
    bool any = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      spec[i] = f.spectral()[i] * w[i];
      any = any || spec[i] != cplx(0.0, 0.0);
    }
    if (!any) continue;
    fft_inverse(g.n(), spec.data(), phys.data());
    double m = 0.0;
    if (f.is_real()) {
      for (const auto& v : phys) m = std::max(m, std::abs(v.real()));
    } else {
      for (const auto& v : phys) m = std::max(m, std::abs(v));
    }
    out[static_cast<std::size_t>(j + 1)] = m;
  }
  return out;
}

/// Discrete Besov-Hoelder norm sup_{j >= -1} 2^{j gamma} ||Delta_j f||_inf.
inline double besov_norm(const TorusField& f, double gamma) {
  const auto blocks = block_sup_norms(f);
  double m = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const int j = static_cast<int>(b) - 1;
    m = std::max(m, std::exp2(j * gamma) * blocks[b]);
  }
  return m;
}

/// Besov norms for several exponents from one block decomposition.
inline std::vector<double> besov_norms(const TorusField& f, const std::vector<double>& gammas) {
  const auto blocks = block_sup_norms(f);
  std::vector<double> out;
  out.reserve(gammas.size());
  for (double gamma : gammas) {
    double m = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      m = std::max(m, std::exp2((static_cast<int>(b) - 1) * gamma) * blocks[b]);
    out.push_back(m);
  }
  return out;
}

/// e^{t Delta} f: spectrum multiplied by exp(-t |k|^2).
inline TorusField heat_semigroup(const TorusField& f, double t) {
  if (t < 0.0) throw ArgumentError("heat_semigroup: negative time");
  if (t == 0.0) return f;
  const auto& k2 = f.grid().mode_norms2();
  std::vector<double> m(k2.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::exp(-t * k2[i]);
  return f.multiplied(m);
}

inline TorusField laplacian(const TorusField& f) {
  const auto& k2 = f.grid().mode_norms2();
  std::vector<double> m(k2.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = -k2[i];
  return f.multiplied(m);
}

/// Mean-zero solution w of -Delta w = f - mean(f).
inline TorusField inverse_laplacian(const TorusField& f) {
  const auto& k2 = f.grid().mode_norms2();
  std::vector<double> m(k2.size());
  m[0] = 0.0;
  for (std::size_t i = 1; i < m.size(); ++i) m[i] = 1.0 / k2[i];
  return f.multiplied(m);
}

}  // namespace paratorus
