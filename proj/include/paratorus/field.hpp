#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/fft.hpp"
#include "paratorus/grid.hpp"

namespace paratorus {

/// A field on the discretized 2-torus, held in both physical and spectral
/// form. Fields are immutable: every factory fills both representations, so
/// concurrent readers never trigger a transform.
///
/// Real fields keep exactly zero imaginary parts in physical space and a
/// Hermitian spectrum up to rounding.
class TorusField {
 public:
  TorusField() = default;

  static TorusField from_physical(const Grid& g, std::vector<cplx> values, bool real) {
    if (values.size() != g.size()) throw ArgumentError("from_physical: size mismatch");
    if (real) {
      for (auto& v : values) v = cplx(v.real(), 0.0);
    }
    auto spec = fft_forward(g.n(), values);
    return TorusField(g, real, std::move(values), std::move(spec));
  }

  static TorusField from_real(const Grid& g, std::span<const double> values) {
    if (values.size() != g.size()) throw ArgumentError("from_real: size mismatch");
    std::vector<cplx> v(values.begin(), values.end());
    return from_physical(g, std::move(v), true);
  }

  static TorusField from_spectral(const Grid& g, std::vector<cplx> coeffs, bool real) {
    if (coeffs.size() != g.size()) throw ArgumentError("from_spectral: size mismatch");
    auto phys = fft_inverse(g.n(), coeffs);
    if (real) {
      for (auto& v : phys) v = cplx(v.real(), 0.0);
    }
    return TorusField(g, real, std::move(phys), std::move(coeffs));
  }

  /// Samples fn(x1, x2) at the grid points.
  static TorusField sample(const Grid& g, const std::function<double(double, double)>& fn) {
    std::vector<cplx> v(g.size());
    const double h = g.spacing();
    for (int a = 0; a < g.n(); ++a)
      for (int b = 0; b < g.n(); ++b) v[static_cast<std::size_t>(a) * g.n() + b] = fn(a * h, b * h);
    return from_physical(g, std::move(v), true);
  }

  static TorusField constant(const Grid& g, double c) {
    std::vector<cplx> phys(g.size(), cplx(c, 0.0));
    std::vector<cplx> spec(g.size(), cplx(0.0, 0.0));
    spec[0] = c;
    return TorusField(g, true, std::move(phys), std::move(spec));
  }

  static TorusField zero(const Grid& g) { return constant(g, 0.0); }

  /// Complex exponential e_k(x) = exp(i k.x).
  static TorusField exponential(const Grid& g, const Mode& k) {
    if (!g.contains(k)) throw ArgumentError("exponential: mode outside grid");
    std::vector<cplx> spec(g.size(), cplx(0.0, 0.0));
    spec[g.index(k)] = 1.0;
    return from_spectral(g, std::move(spec), false);
  }

  const Grid& grid() const { return grid_; }
  bool is_real() const { return real_; }
  const std::vector<cplx>& physical() const { return phys_; }
  const std::vector<cplx>& spectral() const { return spec_; }

  cplx value(int i1, int i2) const { return phys_[static_cast<std::size_t>(i1) * grid_.n() + i2]; }
  cplx coeff(int k1, int k2) const { return spec_[grid_.index(k1, k2)]; }
  cplx coeff(const Mode& k) const { return spec_[grid_.index(k)]; }

  /// Real parts of the physical values.
  std::vector<double> real_values() const {
    std::vector<double> r(phys_.size());
    for (std::size_t i = 0; i < phys_.size(); ++i) r[i] = phys_[i].real();
    return r;
  }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& v : phys_) m = std::max(m, std::abs(v));
    return m;
  }

  double min_real() const {
    double m = phys_.empty() ? 0.0 : phys_[0].real();
    for (const auto& v : phys_) m = std::min(m, v.real());
    return m;
  }

  double max_real() const {
    double m = phys_.empty() ? 0.0 : phys_[0].real();
    for (const auto& v : phys_) m = std::max(m, v.real());
    return m;
  }

  cplx mean() const { return spec_.empty() ? cplx() : spec_[0]; }

  /// Both representations are linear, so combinations skip the transforms.
  friend TorusField operator+(const TorusField& a, const TorusField& b) {
    return combine(a, b, 1.0, 1.0);
  }
  friend TorusField operator-(const TorusField& a, const TorusField& b) {
    return combine(a, b, 1.0, -1.0);
  }
  friend TorusField operator*(double s, const TorusField& a) {
    TorusField r = a;
    for (auto& v : r.phys_) v *= s;
    for (auto& v : r.spec_) v *= s;
    return r;
  }
  friend TorusField operator*(cplx s, const TorusField& a) {
    TorusField r = a;
    r.real_ = a.real_ && s.imag() == 0.0;
    for (auto& v : r.phys_) v *= s;
    for (auto& v : r.spec_) v *= s;
    return r;
  }
  TorusField operator-() const { return (-1.0) * *this; }

  /// a*x + b*y with one pass over both representations.
  static TorusField combine(const TorusField& x, const TorusField& y, double a, double b) {
    require_same_grid(x.grid_, y.grid_, "combine");
    TorusField r = x;
    r.real_ = x.real_ && y.real_;
    for (std::size_t i = 0; i < r.phys_.size(); ++i) {
      r.phys_[i] = a * x.phys_[i] + b * y.phys_[i];
      r.spec_[i] = a * x.spec_[i] + b * y.spec_[i];
    }
    return r;
  }

  /// Applies a spectral multiplier m(k) given per flat index.
  TorusField multiplied(std::span<const double> m) const {
    std::vector<cplx> s(spec_.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = spec_[i] * m[i];
    return from_spectral(grid_, std::move(s), real_);
  }

  /// Maps each physical value through fn (real fields only).
  TorusField mapped(const std::function<double(double)>& fn) const {
    std::vector<cplx> v(phys_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(phys_[i].real());
    return from_physical(grid_, std::move(v), true);
  }

 private:
  TorusField(Grid g, bool real, std::vector<cplx> phys, std::vector<cplx> spec)
      : grid_(std::move(g)), real_(real), phys_(std::move(phys)), spec_(std::move(spec)) {}

  Grid grid_;
  bool real_ = true;
  std::vector<cplx> phys_;
  std::vector<cplx> spec_;
};

/// Collocation (aliased) pointwise product.
inline TorusField pointwise_product(const TorusField& u, const TorusField& v) {
  require_same_grid(u.grid(), v.grid(), "pointwise_product");
  std::vector<cplx> w(u.grid().size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = u.physical()[i] * v.physical()[i];
  return TorusField::from_physical(u.grid(), std::move(w), u.is_real() && v.is_real());
}

/// Pointwise quotient u / v; caller guarantees v stays away from zero.
inline TorusField pointwise_quotient(const TorusField& u, const TorusField& v) {
  require_same_grid(u.grid(), v.grid(), "pointwise_quotient");
  std::vector<cplx> w(u.grid().size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = u.physical()[i] / v.physical()[i];
  return TorusField::from_physical(u.grid(), std::move(w), u.is_real() && v.is_real());
}

namespace detail {

/// Embedding of an n-grid spectrum into the 3n/2 padded grid. A coefficient on
/// the unpaired -n/2 frequency is split evenly between -n/2 and +n/2 so the
/// padded spectrum stays Hermitian; truncation folds the pair back.
struct PadMap {
  int n = 0;
  int m = 0;
  std::vector<std::array<std::size_t, 4>> targets;
  std::vector<int> count;
};

inline std::shared_ptr<const PadMap> pad_map(int n) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const PadMap>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto p = std::make_shared<PadMap>();
  p->n = n;
  p->m = 3 * n / 2;
  const int m = p->m;
  const std::size_t size = static_cast<std::size_t>(n) * n;
  p->targets.resize(size);
  p->count.resize(size);
  auto wrap = [m](int k) { return ((k % m) + m) % m; };
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int k1 = a < n / 2 ? a : a - n;
      const int k2 = b < n / 2 ? b : b - n;
      std::vector<int> c1{k1}, c2{k2};
      if (k1 == -n / 2) c1.push_back(n / 2);
      if (k2 == -n / 2) c2.push_back(n / 2);
      const std::size_t idx = static_cast<std::size_t>(a) * n + b;
      int c = 0;
      for (int x : c1)
        for (int y : c2)
          p->targets[idx][c++] = static_cast<std::size_t>(wrap(x)) * m + wrap(y);
      p->count[idx] = c;
    }
  }
  cache.emplace(n, p);
  return p;
}

/// Physical values on the padded grid of the field whose n-grid spectrum is
/// spec[i] * weight[i] (weight may be empty for the identity).
inline std::vector<cplx> padded_values(const PadMap& pm, std::span<const cplx> spec,
                                       std::span<const double> weight) {
  std::vector<cplx> padded(static_cast<std::size_t>(pm.m) * pm.m, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < spec.size(); ++i) {
    cplx c = spec[i];
    if (!weight.empty()) c *= weight[i];
    if (c == cplx(0.0, 0.0)) continue;
    const int cnt = pm.count[i];
    const double w = 1.0 / cnt;
    for (int t = 0; t < cnt; ++t) padded[pm.targets[i][t]] += w * c;
  }
  std::vector<cplx> out(padded.size());
  fft_inverse(pm.m, padded.data(), out.data());
  return out;
}

/// Transforms padded physical values back and truncates to the n-grid.
inline std::vector<cplx> truncate_from_padded(const PadMap& pm, const std::vector<cplx>& values) {
  std::vector<cplx> spec_m(values.size());
  fft_forward(pm.m, values.data(), spec_m.data());
  std::vector<cplx> out(static_cast<std::size_t>(pm.n) * pm.n);
  for (std::size_t i = 0; i < out.size(); ++i) {
    cplx s(0.0, 0.0);
    for (int t = 0; t < pm.count[i]; ++t) s += spec_m[pm.targets[i][t]];
    out[i] = s;
  }
  return out;
}

}  // namespace detail

/// Product with zero-padding dealiasing (3/2 rule): the spectrum of the
/// result is the exact convolution of the inputs truncated to the grid.
inline TorusField dealiased_product(const TorusField& u, const TorusField& v) {
  require_same_grid(u.grid(), v.grid(), "dealiased_product");
  auto pm = detail::pad_map(u.grid().n());
  auto pu = detail::padded_values(*pm, u.spectral(), {});
  auto pv = detail::padded_values(*pm, v.spectral(), {});
  for (std::size_t i = 0; i < pu.size(); ++i) pu[i] *= pv[i];
  return TorusField::from_spectral(u.grid(), detail::truncate_from_padded(*pm, pu),
                                   u.is_real() && v.is_real());
}

}  // namespace paratorus
