#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "test_util.hpp"

using namespace paratorus;
using testutil::sup_gap;
using testutil::to_field;

namespace {

double bracket(double r) { return 1.0 + r; }

// theta = 1 + 0.3 cos x1 + 0.2 sin 2x2; |p| <= 2
TorusField theta_field(const Grid& g) {
  return TorusField::sample(g, [](double x1, double x2) { return 1.0 + 0.3 * std::cos(x1) + 0.2 * std::sin(2 * x2); });
}

// high-pass multiplier supported on 8 <= |k| <= 12
cplx high_pass(const Mode& k) {
  const double r = k.norm();
  return r >= 8.0 && r <= 12.0 ? cplx(1.0 / (1.0 + r), 0.0) : cplx(0.0, 0.0);
}

}  // namespace

TEST(ApplyOp, IdentityAndUnitMultiplier) {
  const Grid g(64);
  std::mt19937_64 rng(1);
  const TorusField v = testutil::random_band_limited(g, rng, 31);
  EXPECT_EQ(sup_gap(apply_op(identity_symbol(g), v), v), 0.0);
  const Symbol one = make_convolution_symbol(g, [](const Mode&) { return cplx(1.0, 0.0); }, 0.0);
  EXPECT_TRUE(one.is_identity());
  EXPECT_LE(sup_gap(apply_op(one, v), v), 1e-15);
}

TEST(ApplyOp, ConvolutionIsDiagonal) {
  const Grid g(64);
  std::mt19937_64 rng(2);
  const TorusField v = testutil::random_band_limited(g, rng, 31);
  const Symbol a = bessel_symbol(g, -0.7);
  const TorusField av = apply_op(a, v);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double m = std::pow(bracket(g.mode(i).norm()), -0.7);
    EXPECT_LE(std::abs(av.spectral()[i] - m * v.spectral()[i]), 1e-12);
  }
}

TEST(ApplyOp, ModulatedMatchesDirectDoubleSum) {
  const int n = 32;
  const Grid g(n);
  const TorusField theta = theta_field(g);
  const Symbol a = make_modulated_symbol(theta, high_pass, 0.5);
  std::mt19937_64 rng(3);
  const auto sv = oracle::random_real_spectrum(rng, 12, 0.3);
  const TorusField v = to_field(sv, g);
  const TorusField av = apply_op(a, v);
  // A v(x) = sum_k theta(x) m(k) v^(k) e^{i k.x}, summed point by point
  const double h = 2.0 * oracle::kPi / n;
  double worst = 0.0, scale = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const double x1 = p * h, x2 = q * h;
      const double th = 1.0 + 0.3 * std::cos(x1) + 0.2 * std::sin(2 * x2);
      cplx acc(0.0, 0.0);
      for (const auto& [k, c] : sv) acc += th * high_pass({k.first, k.second}) * c * std::polar(1.0, k.first * x1 + k.second * x2);
      worst = std::max(worst, std::abs(av.value(p, q) - acc));
      scale = std::max(scale, std::abs(acc));
    }
  EXPECT_LE(worst, 1e-12 * std::max(1.0, scale));
}

TEST(ApplyOp, ConstantThetaReducesToConvolution) {
  const Grid g(32);
  const Symbol mod = make_modulated_symbol(TorusField::constant(g, 2.0), high_pass, 0.5);
  const Symbol conv = make_convolution_symbol(g, [](const Mode& k) { return 2.0 * high_pass(k); }, 0.0);
  std::mt19937_64 rng(4);
  const TorusField v = testutil::random_band_limited(g, rng, 15);
  EXPECT_LE(sup_gap(apply_op(mod, v), apply_op(conv, v)), 1e-13);
}

TEST(ApplyOp, LinearAndTranslationCovariant) {
  const Grid g(64);
  std::mt19937_64 rng(5);
  const TorusField v = testutil::random_band_limited(g, rng, 31);
  const TorusField w = testutil::random_band_limited(g, rng, 31);
  const Symbol a = gaussian_smoothing_symbol(g, 0.02);
  EXPECT_LE(sup_gap(apply_op(a, 2.0 * v - w), 2.0 * apply_op(a, v) - apply_op(a, w)), 1e-12);
  // shifting by 3 grid points in x1 multiplies mode k by exp(-i k1 3h)
  const int s = 3;
  std::vector<cplx> shifted(g.size());
  for (int p = 0; p < g.n(); ++p)
    for (int q = 0; q < g.n(); ++q)
      shifted[static_cast<std::size_t>((p + s) % g.n()) * g.n() + q] = v.value(p, q);
  const TorusField vs = TorusField::from_physical(g, shifted, true);
  const TorusField lhs = apply_op(a, vs);
  const TorusField av = apply_op(a, v);
  for (int p = 0; p < g.n(); ++p)
    for (int q = 0; q < g.n(); ++q) EXPECT_NEAR(lhs.value((p + s) % g.n(), q).real(), av.value(p, q).real(), 1e-12);
}

TEST(Support, NarrowThetaAcceptedAndBandHolds) {
  const Grid g(64);
  auto theta2 = TorusField::sample(g, [](double x1, double x2) { return 1.0 + 0.2 * std::cos(2 * x1) + 0.1 * std::sin(x1 + x2); });
  const Symbol a = make_modulated_symbol(theta2, [](const Mode& k) { return k.norm() >= 8.0 ? cplx(1.0, 0.0) : cplx(); }, 0.5);
  std::size_t checked = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    for (const auto& e : a.row(k)) {
      ASSERT_LE(e.p.norm(), 0.5 * bracket(g.mode(k).norm()));
      ++checked;
    }
  EXPECT_GT(checked, 0u);
  EXPECT_TRUE(check_symbol(a).support_ok);
}

TEST(Support, WideThetaRejected) {
  const Grid g(64);
  auto theta6 = TorusField::sample(g, [](double x1, double) { return 1.0 + 0.1 * std::cos(6 * x1); });
  try {
    make_modulated_symbol(theta6, [](const Mode& k) { return k.norm() >= 8.0 ? cplx(1.0, 0.0) : cplx(); }, 0.5);
    FAIL() << "expected a support violation";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("n=(6,0)"), std::string::npos) << e.what();
  }
}

TEST(Support, PlantedViolationIsNamed) {
  const Grid g(16);
  std::vector<std::vector<SymbolEntry>> rows(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) rows[k].push_back({Mode{0, 0}, 1.0});
  rows[g.index(2, 0)].push_back({Mode{3, 0}, 0.1});  // 3 > 0.5 * (1 + 2)
  EXPECT_THROW(Symbol::from_rows(g, 0.0, 0.5, rows, SymbolKind::General), ValidationError);
  const Symbol bad = Symbol::from_rows(g, 0.0, 0.5, rows, SymbolKind::General, false);
  const auto cert = check_symbol(bad);
  EXPECT_FALSE(cert.pass);
  ASSERT_TRUE(cert.support_violation.has_value());
  EXPECT_EQ(cert.support_violation->first, (Mode{3, 0}));
  EXPECT_EQ(cert.support_violation->second, (Mode{2, 0}));
}

TEST(Certificate, IdentityConstants) {
  const auto cert = check_symbol(identity_symbol(Grid(32)));
  EXPECT_TRUE(cert.pass);
  EXPECT_EQ(cert.bound_constant, 1.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(cert.decay[i][j], (i == 0 && j == 0) ? 1.0 : 0.0) << i << "," << j;
}

TEST(Certificate, BesselFirstDifferenceMatchesScan) {
  const Grid g(64);
  const double s = -0.5;
  const auto cert = check_symbol(bessel_symbol(g, s));
  EXPECT_TRUE(cert.pass);
  EXPECT_NEAR(cert.bound_constant, 1.0, 1e-12);
  double scan = 0.0;
  const int h = g.n() / 2;
  for (int a = -h; a < h; ++a)
    for (int b = -h; b < h; ++b) {
      const double jk = bracket(oracle::norm(a, b));
      const double m = std::pow(jk, s);
      if (a + 1 < h) scan = std::max(scan, std::abs(std::pow(bracket(oracle::norm(a + 1, b)), s) - m) / std::pow(jk, s - 1));
      if (b + 1 < h) scan = std::max(scan, std::abs(std::pow(bracket(oracle::norm(a, b + 1)), s) - m) / std::pow(jk, s - 1));
    }
  EXPECT_NEAR(cert.decay[0][1], scan, 1e-12);
}

TEST(Positivity, IdentityGaussianAndPureOscillation) {
  const Grid g(64);
  const auto id = positivity_certificate(identity_symbol(g), 16, 1);
  EXPECT_TRUE(id.pass);
  EXPECT_EQ(id.min_a_of_one, 1.0);

  const double tau = 0.05;
  const auto gauss = positivity_certificate(gaussian_smoothing_symbol(g, tau), 16, 1);
  EXPECT_TRUE(gauss.pass);
  // the kernel sum_k exp(-tau|k|^2) e^{ik.x}, summed directly, is nonnegative at every
  // grid point; near x = (pi,pi) its true value (~e^{-pi^2/(2 tau)}) is below roundoff
  oracle::Spectrum kernel;
  for (int a = -32; a < 32; ++a)
    for (int b = -32; b < 32; ++b) kernel[{a, b}] = std::exp(-tau * (a * a + b * b));
  const auto k = oracle::synthesize(kernel, 64);
  ASSERT_GT(k[0].real(), 1.0);
  for (const auto& v : k) ASSERT_GE(v.real(), -1e-13 * k[0].real());

  const Symbol osc = make_convolution_symbol(
      g, [](const Mode& k) { return std::abs(k.k1) == 1 && k.k2 == 0 ? cplx(1.0, 0.0) : cplx(); }, 0.0);
  const auto rep = positivity_certificate(osc, 16, 1);
  EXPECT_FALSE(rep.pass);
  EXPECT_EQ(rep.min_a_of_one, 0.0);
}

TEST(Positivity, CertifiedSymbolsObeyTwoSupBound) {
  const Grid g(64);
  const Symbol a = gaussian_smoothing_symbol(g, 0.05);
  const TorusField one = apply_op(a, TorusField::constant(g, 1.0));
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const TorusField v = random_smooth_field(g, rng);
    const TorusField av = apply_op(a, v);
    const double vs = v.sup_norm();
    for (std::size_t i = 0; i < g.size(); ++i)
      ASSERT_LE(std::abs(av.physical()[i].real()), 2.0 * vs * one.physical()[i].real() + 1e-9);
  }
}

TEST(Commutator, IdentityVanishesAndConstantOracle) {
  const int n = 32;
  const Grid g(n);
  std::mt19937_64 rng(8);
  const TorusField h2 = testutil::random_band_limited(g, rng, 12);
  const TorusField h1 = testutil::random_band_limited(g, rng, 12);
  EXPECT_LE(commutator_para(identity_symbol(g), h1, h2).sup_norm(), 1e-13);

  // h1 = c: Op(a) P_c h2 - P_c Op(a) h2 with Op(a) applied by the
  // explicit (p, k) double sum and P_c by the block oracle.
  const Symbol a = make_modulated_symbol(theta_field(g), high_pass, 0.5);
  const auto s2 = oracle::random_real_spectrum(rng, 12, 0.3);
  const oracle::Spectrum c{{{0, 0}, cplx(0.8, 0.0)}};
  const oracle::Spectrum th{{{1, 0}, 0.15}, {{-1, 0}, 0.15}, {{0, 0}, 1.0}, {{0, 2}, cplx(0.0, -0.1)}, {{0, -2}, cplx(0.0, 0.1)}};
  auto op = [&](const oracle::Spectrum& v) {
    oracle::Spectrum out;
    for (const auto& [k, vk] : v)
      for (const auto& [p, tp] : th) out[{k.first + p.first, k.second + p.second}] += tp * high_pass({k.first, k.second}) * vk;
    return out;
  };
  const auto expected = oracle::add(op(oracle::para(c, s2, n)), oracle::para(c, op(s2), n), cplx(-1.0, 0.0));
  EXPECT_LE(testutil::spectral_gap(commutator_para(a, to_field(c, g), to_field(s2, g)), expected), 1e-12);
}

TEST(Serialization, RoundTrip) {
  const Grid g(32);
  const Symbol a = make_modulated_symbol(theta_field(g), high_pass, 0.5, 0.0, "probe");
  std::stringstream ss;
  write_symbol(ss, a);
  const Symbol b = read_symbol(ss);
  EXPECT_EQ(b.entry_count(), a.entry_count());
  EXPECT_EQ(b.name(), "probe");
  std::mt19937_64 rng(9);
  const TorusField v = testutil::random_band_limited(g, rng, 12);
  EXPECT_EQ(sup_gap(apply_op(a, v), apply_op(b, v)), 0.0);
}

TEST(Factories, RejectBadParameters) {
  const Grid g(32);
  EXPECT_THROW(gaussian_smoothing_symbol(g, 0.0), ConfigError);
  EXPECT_THROW(make_convolution_symbol(g, [](const Mode& k) { return cplx(1.0 + k.norm(), 0.0); }, 0.0), ValidationError);
  EXPECT_THROW(make_modulated_symbol(theta_field(g), high_pass, 1.5), ConfigError);
}
