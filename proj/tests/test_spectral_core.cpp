#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "test_util.hpp"

using namespace paratorus;
using testutil::to_field;

TEST(Fft, ConstantFieldHasOnlyZeroMode) {
  const Grid g(16);
  const TorusField c = TorusField::from_real(g, std::vector<double>(g.size(), 2.5));
  EXPECT_NEAR(std::abs(c.coeff(0, 0) - cplx(2.5, 0.0)), 0.0, 1e-14);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(std::abs(c.spectral()[i]), 1e-14);
}

TEST(Fft, CosineHasTwoHalfModes) {
  const Grid g(32);
  const TorusField f = TorusField::sample(g, [](double x1, double) { return std::cos(x1); });
  EXPECT_NEAR(std::abs(f.coeff(1, 0) - 0.5), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(f.coeff(-1, 0) - 0.5), 0.0, 1e-14);
  double rest = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Mode k = g.mode(i);
    if (std::abs(k.k1) == 1 && k.k2 == 0) continue;
    rest = std::max(rest, std::abs(f.spectral()[i]));
  }
  EXPECT_LT(rest, 1e-15);
}

TEST(Fft, InverseMatchesDirectSynthesis) {
  const Grid g(16);
  std::mt19937_64 rng(11);
  const auto s = oracle::random_real_spectrum(rng, 5, 0.5);
  const TorusField f = to_field(s, g);
  const auto ref = oracle::synthesize(s, 16);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(std::abs(f.physical()[i] - ref[i]), 1e-12);
}

TEST(Fft, RoundTripOnRandomFields) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (int n : {64, 128, 256}) {
    const Grid g(n);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      std::vector<cplx> v(g.size());
      for (auto& x : v) x = cplx(z(rng), z(rng));
      const auto spec = fft_forward(n, v);
      const auto back = fft_inverse(n, spec);
      double err = 0.0, ref = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        err = std::max(err, std::abs(back[i] - v[i]));
        ref = std::max(ref, std::abs(v[i]));
      }
      worst = std::max(worst, err / ref);
    }
    EXPECT_LE(worst, 1e-12) << "n=" << n;
  }
}

TEST(Grid, RejectsOddOrTinySizes) {
  EXPECT_THROW(Grid(7), ConfigError);
  EXPECT_THROW(Grid(6), ConfigError);
  EXPECT_NO_THROW(Grid(8));
}

TEST(Partition, UnityAndOracleAgreement) {
  for (int n : {32, 64, 128, 256}) {
    const Grid g(n);
    auto part = partition_for(g);
    ASSERT_EQ(part->j_max(), oracle::top_block(n));
    double unity = 0.0, oracle_gap = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double sum = 0.0;
      for (int j = -1; j <= part->j_max(); ++j) {
        sum += part->rho(j, i);
        oracle_gap = std::max(oracle_gap,
                              std::abs(part->rho(j, i) - oracle::rho(j, g.mode_norms()[i], part->j_max())));
      }
      unity = std::max(unity, std::abs(sum - 1.0));
    }
    EXPECT_LE(unity, 1e-10) << "n=" << n;
    EXPECT_LE(oracle_gap, 1e-14) << "n=" << n;
  }
}

TEST(Partition, LowBlockContainsOrigin) {
  auto part = partition_for(Grid(64));
  EXPECT_EQ(part->rho(-1, 0), 1.0);
}

TEST(Partition, BlocksTwoApartAreDisjoint) {
  const Grid g(256);
  auto part = partition_for(g);
  for (int i = -1; i <= part->j_max(); ++i)
    for (int j = i + 2; j <= part->j_max(); ++j)
      for (std::size_t k = 0; k < g.size(); ++k) ASSERT_EQ(part->rho(i, k) * part->rho(j, k), 0.0);
}

TEST(Partition, RejectsBadBlockIndex) {
  auto part = partition_for(Grid(64));
  EXPECT_THROW(part->weights(-2), ArgumentError);
  EXPECT_THROW(part->weights(part->j_max() + 1), ArgumentError);
}

TEST(LittlewoodPaley, BlocksSumToField) {
  const Grid g(64);
  std::mt19937_64 rng(3);
  const TorusField f = testutil::random_band_limited(g, rng, 31);
  TorusField sum = TorusField::zero(g);
  for (int j = -1; j <= partition_for(g)->j_max(); ++j) sum = sum + lp_project(f, j);
  EXPECT_LE(testutil::sup_gap(sum, f), 1e-10);
}

TEST(LittlewoodPaley, ConstantsLiveInLowestBlock) {
  const Grid g(64);
  const TorusField c = TorusField::constant(g, 3.0);
  for (int j = 0; j <= partition_for(g)->j_max(); ++j) EXPECT_EQ(lp_project(c, j).sup_norm(), 0.0);
  EXPECT_NEAR(lp_project(c, -1).sup_norm(), 3.0, 1e-14);
}

TEST(LittlewoodPaley, ExponentialIsEigenvector) {
  const Grid g(64);
  const Mode k{5, -3};
  const TorusField e = TorusField::exponential(g, k);
  auto part = partition_for(g);
  for (int j = -1; j <= part->j_max(); ++j) {
    const TorusField d = lp_project(e, j);
    const double w = part->rho(j, g.index(k));
    EXPECT_LE(testutil::sup_gap(d, w * e), 1e-14) << "j=" << j;
  }
}

TEST(Besov, ConstantNorm) {
  const Grid g(32);
  for (double gamma : {-1.5, -0.2, 0.0, 0.7})
    EXPECT_NEAR(besov_norm(TorusField::constant(g, -2.0), gamma), std::exp2(-gamma) * 2.0, 1e-14);
}

TEST(Besov, Homogeneity) {
  const Grid g(64);
  std::mt19937_64 rng(8);
  const TorusField f = testutil::random_band_limited(g, rng, 20);
  for (double gamma : {-1.0, 0.5})
    EXPECT_NEAR(besov_norm(-3.0 * f, gamma), 3.0 * besov_norm(f, gamma), 1e-12 * besov_norm(f, gamma));
}

TEST(Besov, SingleModeInBlockFive) {
  const Grid g(128);
  auto part = partition_for(g);
  const Mode k{32, 0};
  const double r5 = oracle::rho(5, 32.0, part->j_max());
  ASSERT_NEAR(r5, 1.0, 0.0);
  for (double gamma : {-0.5, 0.3})
    EXPECT_NEAR(besov_norm(TorusField::exponential(g, k), gamma), std::exp2(5.0 * gamma) * r5, 1e-13);
}

TEST(Besov, BlockWeightsMonotoneInGamma) {
  const Grid g(64);
  std::mt19937_64 rng(4);
  const auto blocks = block_sup_norms(testutil::random_band_limited(g, rng, 31));
  for (std::size_t b = 1; b < blocks.size(); ++b) {
    const int j = static_cast<int>(b) - 1;
    EXPECT_LE(std::exp2(j * -0.4) * blocks[b], std::exp2(j * 0.3) * blocks[b] + 1e-15);
  }
}

TEST(ParabolicNorm, TimeConstantAndZero) {
  const Grid g(32);
  std::mt19937_64 rng(2);
  const TorusField f = testutil::random_band_limited(g, rng, 10);
  const Trajectory constant(0.1, {f, f, f, f});
  EXPECT_DOUBLE_EQ(parabolic_norm(constant, 0.5), besov_norm(f, 0.5));
  const Trajectory zero(0.1, {TorusField::zero(g), TorusField::zero(g)});
  EXPECT_EQ(parabolic_norm(zero, 0.5), 0.0);
}

TEST(ParabolicNorm, LinearRampClosedForm) {
  // u(t) = t: the Hoelder quotient |t-s|^{1 - a/2} peaks at |t-s| = T.
  const Grid g(16);
  const double T = 0.5, alpha = 0.5;
  std::vector<TorusField> fs;
  for (int m = 0; m <= 10; ++m) fs.push_back(TorusField::constant(g, T * m / 10.0));
  const Trajectory u(T / 10.0, fs);
  EXPECT_NEAR(time_hoelder_seminorm(u, alpha / 2.0), std::pow(T, 1.0 - alpha / 2.0), 1e-14);
  const double space = T * std::exp2(-alpha);
  EXPECT_NEAR(parabolic_norm(u, alpha), std::max(space, std::pow(T, 1.0 - alpha / 2.0)), 1e-14);
}

TEST(Heat, ZeroTimeAndEigenfunctions) {
  const Grid g(32);
  const Mode k{3, 4};
  const TorusField e = TorusField::exponential(g, k);
  EXPECT_EQ(testutil::sup_gap(heat_semigroup(e, 0.0), e), 0.0);
  EXPECT_LE(testutil::sup_gap(heat_semigroup(e, 0.01), std::exp(-0.25) * e), 1e-14);
  EXPECT_THROW(heat_semigroup(e, -1.0), ArgumentError);
}

TEST(Heat, MeanConserved) {
  const Grid g(64);
  std::mt19937_64 rng(6);
  const TorusField f = testutil::random_band_limited(g, rng, 31);
  EXPECT_NEAR(std::abs(heat_semigroup(f, 0.3).mean() - f.mean()), 0.0, 1e-12);
}

TEST(InverseLaplacian, EigenfunctionsConstantsAndComposition) {
  const Grid g(64);
  const Mode k{-2, 5};
  const TorusField e = TorusField::exponential(g, k);
  EXPECT_LE(testutil::sup_gap(inverse_laplacian(e), (1.0 / 29.0) * e), 1e-15);
  EXPECT_EQ(inverse_laplacian(TorusField::constant(g, 4.0)).sup_norm(), 0.0);
  std::mt19937_64 rng(9);
  const TorusField f = testutil::random_band_limited(g, rng, 31);
  const TorusField back = -1.0 * laplacian(inverse_laplacian(f));
  EXPECT_LE(testutil::sup_gap(back, f - TorusField::constant(g, f.mean().real())), 1e-10);
}

TEST(Product, DealiasedMatchesExactConvolution) {
  const int n = 32;
  const Grid g(n);
  std::mt19937_64 rng(12);
  const auto su = oracle::random_real_spectrum(rng, 7, 0.5);
  const auto sv = oracle::random_real_spectrum(rng, 7, 0.5);
  const TorusField uv = dealiased_product(to_field(su, g), to_field(sv, g));
  EXPECT_LE(testutil::spectral_gap(uv, oracle::product(su, sv)), 1e-12);
}

TEST(Snapshot, RoundTripAndTagCheck) {
  const Grid g(16);
  std::mt19937_64 rng(1);
  const TorusField f = testutil::random_band_limited(g, rng, 7);
  std::stringstream ss;
  write_snapshot(ss, f);
  const TorusField back = read_snapshot(ss);
  EXPECT_EQ(back.grid().n(), 16);
  EXPECT_EQ(back.physical(), f.physical());

  std::string bytes;
  {
    std::stringstream s2;
    write_snapshot(s2, f);
    bytes = s2.str();
  }
  bytes[8] ^= 0x7f;  // endianness tag
  std::stringstream bad(bytes);
  EXPECT_THROW(read_snapshot(bad), ArgumentError);
}
