#pragma once

// Symbols sigma(x,k) of x-dependent Fourier multipliers, stored through their
// x-Fourier coefficients sigma^(p,k). Only the band |p| <= mu <k> can carry
// nonzero entries, so the table is kept sparse: one row per frequency k
// holding the nonzero (p, value) pairs.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/field.hpp"
#include "paratorus/paraproducts.hpp"
#include "paratorus/snapshot.hpp"

namespace paratorus {

inline double japanese(double r) { return 1.0 + r; }

struct SymbolEntry {
  Mode p;
  cplx value;
};

enum class SymbolKind : std::uint32_t { General = 0, Convolution = 1, Modulated = 2 };

class Symbol {
 public:
  Symbol() = default;

  /// Builds a symbol from per-row entries (rows indexed by flat k index).
  /// With validate set, any entry outside the band |p| <= mu <k> is rejected.
  static Symbol from_rows(const Grid& g, double order, double mu,
                          std::vector<std::vector<SymbolEntry>> rows, SymbolKind kind,
                          bool validate = true, std::string name = "general") {
    if (rows.size() != g.size()) throw ArgumentError("symbol: row count must equal grid size");
    if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("symbol: mu must lie in (0,1)");
    Symbol s;
    s.grid_ = g;
    s.order_ = order;
    s.mu_ = mu;
    s.kind_ = kind;
    s.name_ = std::move(name);
    s.row_start_.assign(g.size() + 1, 0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      auto& row = rows[k];
      std::erase_if(row, [](const SymbolEntry& e) { return e.value == cplx(0.0, 0.0); });
      std::sort(row.begin(), row.end(), [](const SymbolEntry& a, const SymbolEntry& b) {
        return a.p.k1 != b.p.k1 ? a.p.k1 < b.p.k1 : a.p.k2 < b.p.k2;
      });
      if (validate) {
        const double kn = g.mode(k).norm();
        for (const auto& e : row) {
          if (e.p.norm() > mu * japanese(kn)) {
            const Mode km = g.mode(k);
            throw ValidationError("symbol support violated at n=(" + std::to_string(e.p.k1) + "," +
                                  std::to_string(e.p.k2) + "), k=(" + std::to_string(km.k1) + "," +
                                  std::to_string(km.k2) + ")");
          }
        }
      }
      s.row_start_[k + 1] = s.row_start_[k] + row.size();
      s.entries_.insert(s.entries_.end(), row.begin(), row.end());
    }
    s.real_operator_ = s.compute_real_operator();
    return s;
  }

  const Grid& grid() const { return grid_; }
  double order() const { return order_; }
  double mu() const { return mu_; }
  double alpha() const { return alpha_; }
  void set_alpha(double a) { alpha_ = a; }
  SymbolKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool real_operator() const { return real_operator_; }
  std::size_t entry_count() const { return entries_.size(); }

  std::span<const SymbolEntry> row(std::size_t k) const {
    return {entries_.data() + row_start_[k], row_start_[k + 1] - row_start_[k]};
  }

  /// sigma^(p, k); zero for entries not stored.
  cplx coefficient(const Mode& p, const Mode& k) const {
    if (!grid_.contains(k)) return {};
    for (const auto& e : row(grid_.index(k)))
      if (e.p == p) return e.value;
    return {};
  }

  /// Set of x-modes p appearing anywhere in the table.
  std::vector<Mode> offsets() const {
    std::vector<Mode> out;
    for (const auto& e : entries_)
      if (std::find(out.begin(), out.end(), e.p) == out.end()) out.push_back(e.p);
    return out;
  }

  bool is_identity() const {
    if (kind_ != SymbolKind::Convolution) return false;
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      auto r = row(k);
      if (r.size() != 1 || !(r[0].p == Mode{0, 0}) || r[0].value != cplx(1.0, 0.0)) return false;
    }
    return true;
  }

 private:
  bool compute_real_operator() const {
    // real operator: sigma^(-p,-k) = conj sigma^(p,k) whenever -k is stored
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      const Mode km = grid_.mode(k);
      if (!grid_.contains(-km)) continue;
      for (const auto& e : row(k)) {
        if (std::abs(coefficient(-e.p, -km) - std::conj(e.value)) > 1e-14 * (1.0 + std::abs(e.value)))
          return false;
      }
    }
    return true;
  }

  Grid grid_;
  double order_ = 0.0;
  double mu_ = 0.5;
  double alpha_ = 1.0;
  SymbolKind kind_ = SymbolKind::General;
  std::string name_;
  bool real_operator_ = true;
  std::vector<std::size_t> row_start_;
  std::vector<SymbolEntry> entries_;
};

/// Convolution symbol sigma^(p,k) = 1_{p=0} m(k). Rejects any k with
/// |m(k)| > bound_constant <k>^s.
inline Symbol make_convolution_symbol(const Grid& g, const std::function<cplx(const Mode&)>& m,
                                      double order, double mu = 0.5, double bound_constant = 1.0,
                                      std::string name = "convolution") {
  std::vector<std::vector<SymbolEntry>> rows(g.size());
  std::vector<Mode> offending;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Mode km = g.mode(k);
    const cplx v = m(km);
    if (std::abs(v) > bound_constant * std::pow(japanese(km.norm()), order) * (1.0 + 1e-12)) {
      offending.push_back(km);
    }
    rows[k].push_back({Mode{0, 0}, v});
  }
  if (!offending.empty()) {
    std::ostringstream os;
    os << "convolution symbol violates |m(k)| <= C<k>^s at " << offending.size() << " modes:";
    for (std::size_t i = 0; i < std::min<std::size_t>(offending.size(), 8); ++i)
      os << " (" << offending[i].k1 << "," << offending[i].k2 << ")";
    throw ValidationError(os.str());
  }
  return Symbol::from_rows(g, order, mu, std::move(rows), SymbolKind::Convolution, true,
                           std::move(name));
}

inline Symbol identity_symbol(const Grid& g) {
  return make_convolution_symbol(g, [](const Mode&) { return cplx(1.0, 0.0); }, 0.0, 0.5, 1.0,
                                 "identity");
}

/// Gaussian smoothing m(k) = exp(-tau |k|^2): a positive kernel of unit mass.
inline Symbol gaussian_smoothing_symbol(const Grid& g, double tau, double mu = 0.5) {
  if (!(tau > 0.0)) throw ConfigError("gaussian smoothing: tau must be positive");
  return make_convolution_symbol(
      g, [tau](const Mode& k) { return cplx(std::exp(-tau * k.norm2()), 0.0); }, 0.0, mu, 1.0,
      "gaussian:tau=" + std::to_string(tau));
}

/// Bessel-potential multiplier m(k) = <k>^s.
inline Symbol bessel_symbol(const Grid& g, double s, double mu = 0.5) {
  return make_convolution_symbol(
      g, [s](const Mode& k) { return cplx(std::pow(japanese(k.norm()), s), 0.0); }, s, mu, 1.0,
      "bessel:s=" + std::to_string(s));
}

/// x-modulated multiplier sigma(x,k) = theta(x) m(k), table theta^(p) m(k).
/// theta^ must be supported in |p| <= mu (1 + K0), K0 = min{|k| : m(k) != 0}.
inline Symbol make_modulated_symbol(const TorusField& theta, const std::function<cplx(const Mode&)>& m,
                                    double mu, double order = 0.0,
                                    std::string name = "modulated") {
  const Grid& g = theta.grid();
  if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("modulated symbol: mu must lie in (0,1)");
  std::vector<cplx> mvals(g.size());
  double k0 = -1.0;
  Mode k0_mode{};
  for (std::size_t k = 0; k < g.size(); ++k) {
    mvals[k] = m(g.mode(k));
    if (mvals[k] != cplx(0.0, 0.0)) {
      const double r = g.mode(k).norm();
      if (k0 < 0.0 || r < k0) {
        k0 = r;
        k0_mode = g.mode(k);
      }
    }
  }
  std::vector<SymbolEntry> theta_modes;
  const double tol = 1e-13 * std::max(1.0, theta.sup_norm());
  std::optional<Mode> worst;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const cplx c = theta.spectral()[p];
    if (std::abs(c) <= tol) continue;
    const Mode pm = g.mode(p);
    theta_modes.push_back({pm, c});
    if (k0 >= 0.0 && pm.norm() > mu * (1.0 + k0)) {
      if (!worst || pm.norm2() < worst->norm2()) worst = pm;
    }
  }
  if (worst) {
    throw ValidationError("modulated symbol support violated: smallest violating pair n=(" +
                          std::to_string(worst->k1) + "," + std::to_string(worst->k2) + "), k=(" +
                          std::to_string(k0_mode.k1) + "," + std::to_string(k0_mode.k2) + ")");
  }
  std::vector<std::vector<SymbolEntry>> rows(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (mvals[k] == cplx(0.0, 0.0)) continue;
    for (const auto& t : theta_modes) rows[k].push_back({t.p, t.value * mvals[k]});
  }
  return Symbol::from_rows(g, order, mu, std::move(rows), SymbolKind::Modulated, true,
                           std::move(name));
}

/// Op(a)v with spectrum (Av)^(n) = sum_k a^(n-k, k) v^(k); output modes
/// outside the grid are dropped.
inline TorusField apply_op(const Symbol& a, const TorusField& v) {
  require_same_grid(a.grid(), v.grid(), "apply_op");
  const Grid& g = v.grid();
  if (a.is_identity()) return v;
  std::vector<cplx> out(g.size(), cplx(0.0, 0.0));
  const auto& vs = v.spectral();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (vs[k] == cplx(0.0, 0.0)) continue;
    const Mode km = g.mode(k);
    for (const auto& e : a.row(k)) {
      const Mode target = km + e.p;
      if (!g.contains(target)) continue;
      out[g.index(target)] += e.value * vs[k];
    }
  }
  return TorusField::from_spectral(g, std::move(out), v.is_real() && a.real_operator());
}

/// Op(a)(P_{h1} h2) - P_{h1}(Op(a) h2).
inline TorusField commutator_para(const Symbol& a, const TorusField& h1, const TorusField& h2) {
  return apply_op(a, para(h1, h2)) - para(h1, apply_op(a, h2));
}

/// Structural certificate for a symbol table.
struct SymbolCertificate {
  bool support_ok = true;
  std::optional<std::pair<Mode, Mode>> support_violation;  // (p, k)
  double bound_constant = 0.0;  // smallest C with |a^(p,k)| <= C <p>^-4 <k>^s
  /// decay[i][j]: smallest C with sum_p |p|^i |D^j a^(p,k)| <= C <k>^{s-j},
  /// i = x-derivative order, j = order of the k-difference, both <= 2.
  std::array<std::array<double, 3>, 3> decay{};
  double max_constant = 0.0;
  bool pass = false;
  std::string scope = "x-derivatives |i| <= 2 and k-differences |j| <= 2 (Wiener norm in x)";
};

namespace detail {

// sum_p |p|^i |sum_t c_t a^(p, k + shift_t)| over the union of rows.
inline std::array<double, 3> difference_norms(const Symbol& a, const Mode& k,
                                              const std::vector<std::pair<Mode, double>>& stencil) {
  const Grid& g = a.grid();
  std::vector<SymbolEntry> acc;
  for (const auto& [shift, c] : stencil) {
    for (const auto& e : a.row(g.index(k + shift))) {
      auto it = std::find_if(acc.begin(), acc.end(), [&](const SymbolEntry& x) { return x.p == e.p; });
      if (it == acc.end())
        acc.push_back({e.p, c * e.value});
      else
        it->value += c * e.value;
    }
  }
  std::array<double, 3> out{};
  for (const auto& e : acc) {
    const double r = e.p.norm();
    const double m = std::abs(e.value);
    out[0] += m;
    out[1] += r * m;
    out[2] += r * r * m;
  }
  return out;
}

}  // namespace detail

inline SymbolCertificate check_symbol(const Symbol& a, double max_constant = 100.0) {
  SymbolCertificate cert;
  cert.max_constant = max_constant;
  const Grid& g = a.grid();
  const double s = a.order();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Mode km = g.mode(k);
    const double jk = japanese(km.norm());
    for (const auto& e : a.row(k)) {
      if (e.p.norm() > a.mu() * jk && cert.support_ok) {
        cert.support_ok = false;
        cert.support_violation = std::make_pair(e.p, km);
      }
      const double bound = std::pow(japanese(e.p.norm()), -4.0) * std::pow(jk, s);
      cert.bound_constant = std::max(cert.bound_constant, std::abs(e.value) / bound);
    }
  }
  const Mode e1{1, 0}, e2{0, 1}, zero{0, 0};
  using Stencil = std::vector<std::pair<Mode, double>>;
  const std::array<std::vector<Stencil>, 3> stencils = {{
      {Stencil{{zero, 1.0}}},
      {Stencil{{e1, 1.0}, {zero, -1.0}}, Stencil{{e2, 1.0}, {zero, -1.0}}},
      {Stencil{{Mode{2, 0}, 1.0}, {e1, -2.0}, {zero, 1.0}},
       Stencil{{Mode{1, 1}, 1.0}, {e1, -1.0}, {e2, -1.0}, {zero, 1.0}},
       Stencil{{Mode{0, 2}, 1.0}, {e2, -2.0}, {zero, 1.0}}},
  }};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Mode km = g.mode(k);
    const double jk = japanese(km.norm());
    for (int j = 0; j < 3; ++j) {
      for (const auto& st : stencils[j]) {
        bool inside = true;
        for (const auto& [shift, c] : st) inside = inside && g.contains(km + shift);
        if (!inside) continue;
        const auto norms = detail::difference_norms(a, km, st);
        const double scale = std::pow(jk, s - j);
        for (int i = 0; i < 3; ++i) cert.decay[i][j] = std::max(cert.decay[i][j], norms[i] / scale);
      }
    }
  }
  bool bounded = cert.bound_constant <= max_constant;
  for (const auto& r : cert.decay)
    for (double c : r) bounded = bounded && c <= max_constant;
  cert.pass = cert.support_ok && bounded;
  return cert;
}

struct PositivityReport {
  bool pass = false;
  double min_a_of_one = 0.0;       // min_x A(1)(x)
  double worst_bound_margin = 0.0; // max_x (|A v| - 2 ||v||_inf A(1)) over trials
  double min_positive_image = 0.0; // min_x A(v)(x) over trials with v >= 1
  int trials = 0;
};

/// Random smooth real field with modes |k| <= radius (used for probing).
inline TorusField random_smooth_field(const Grid& g, std::mt19937_64& rng, int radius = 4) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> spec(g.size(), cplx(0.0, 0.0));
  for (int k1 = -radius; k1 <= radius; ++k1) {
    for (int k2 = 0; k2 <= radius; ++k2) {
      if (k2 == 0 && k1 < 0) continue;
      if (k1 * k1 + k2 * k2 > radius * radius) continue;
      const double re = normal(rng), im = normal(rng);
      if (k1 == 0 && k2 == 0) {
        spec[0] = re;
        continue;
      }
      spec[g.index(k1, k2)] = cplx(re, im) / std::sqrt(2.0);
      spec[g.index(-k1, -k2)] = cplx(re, -im) / std::sqrt(2.0);
    }
  }
  return TorusField::from_spectral(g, std::move(spec), true);
}

/// Pointwise checks of A(1) > 0, |A(v)| <= 2 ||v||_inf A(1) and A(v) > 0 for
/// v >= 1 over random smooth v.
inline PositivityReport positivity_certificate(const Symbol& a, int trials, std::uint64_t seed,
                                               double tol = 1e-9) {
  const Grid& g = a.grid();
  PositivityReport rep;
  rep.trials = trials;
  const TorusField one = apply_op(a, TorusField::constant(g, 1.0));
  rep.min_a_of_one = one.min_real();
  rep.worst_bound_margin = -std::numeric_limits<double>::infinity();
  rep.min_positive_image = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const TorusField v = random_smooth_field(g, rng);
    const TorusField av = apply_op(a, v);
    const double vinf = v.sup_norm();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double margin = std::abs(av.physical()[i]) - 2.0 * vinf * one.physical()[i].real();
      rep.worst_bound_margin = std::max(rep.worst_bound_margin, margin);
    }
    const TorusField vpos = v + TorusField::constant(g, 1.0 - v.min_real());
    rep.min_positive_image = std::min(rep.min_positive_image, apply_op(a, vpos).min_real());
  }
  if (trials == 0) {
    rep.worst_bound_margin = 0.0;
    rep.min_positive_image = rep.min_a_of_one;
  }
  rep.pass = rep.min_a_of_one > 0.0 && rep.worst_bound_margin <= tol && rep.min_positive_image > 0.0;
  return rep;
}

// Symbol files:
//   "PTSY", u32 version (1), u32 endianness tag, u32 n, u32 kind,
//   f64 order, f64 mu, f64 alpha, u32 name length and name bytes, then for
//   each flat k index in order:
//   u32 entry count followed by (i32 p1, i32 p2, f64 re, f64 im) per entry.
inline void write_symbol(std::ostream& os, const Symbol& a) {
  os.write("PTSY", 4);
  detail::write_pod<std::uint32_t>(os, 1);
  detail::write_pod<std::uint32_t>(os, kEndianTag);
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(a.grid().n()));
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(a.kind()));
  detail::write_pod<double>(os, a.order());
  detail::write_pod<double>(os, a.mu());
  detail::write_pod<double>(os, a.alpha());
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(a.name().size()));
  os.write(a.name().data(), static_cast<std::streamsize>(a.name().size()));
  for (std::size_t k = 0; k < a.grid().size(); ++k) {
    const auto r = a.row(k);
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(r.size()));
    for (const auto& e : r) {
      detail::write_pod<std::int32_t>(os, e.p.k1);
      detail::write_pod<std::int32_t>(os, e.p.k2);
      detail::write_pod<double>(os, e.value.real());
      detail::write_pod<double>(os, e.value.imag());
    }
  }
}

inline Symbol read_symbol(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), 4);
  if (!is || std::memcmp(magic.data(), "PTSY", 4) != 0) throw ArgumentError("not a symbol file");
  if (detail::read_pod<std::uint32_t>(is) != 1u) throw ArgumentError("unsupported symbol version");
  if (detail::read_pod<std::uint32_t>(is) != kEndianTag) {
    throw ArgumentError("symbol written with a different byte order");
  }
  const Grid g(static_cast<int>(detail::read_pod<std::uint32_t>(is)));
  const auto kind = static_cast<SymbolKind>(detail::read_pod<std::uint32_t>(is));
  const double order = detail::read_pod<double>(is);
  const double mu = detail::read_pod<double>(is);
  const double alpha = detail::read_pod<double>(is);
  std::string name(detail::read_pod<std::uint32_t>(is), '\0');
  if (name.size() > 4096) throw ArgumentError("corrupt symbol name");
  is.read(name.data(), static_cast<std::streamsize>(name.size()));
  if (!is) throw ArgumentError("truncated symbol file");
  std::vector<std::vector<SymbolEntry>> rows(g.size());
  for (auto& r : rows) {
    const auto count = detail::read_pod<std::uint32_t>(is);
    r.reserve(count);
    for (std::uint32_t c = 0; c < count; ++c) {
      SymbolEntry e;
      e.p.k1 = detail::read_pod<std::int32_t>(is);
      e.p.k2 = detail::read_pod<std::int32_t>(is);
      const double re = detail::read_pod<double>(is);
      const double im = detail::read_pod<double>(is);
      e.value = cplx(re, im);
      r.push_back(e);
    }
  }
  Symbol s = Symbol::from_rows(g, order, mu, std::move(rows), kind, false, name);
  s.set_alpha(alpha);
  return s;
}

}  // namespace paratorus
