#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "calderon/gridcore.hpp"
#include "oracles.hpp"

using namespace calderon;

namespace {
GridFunction random_function(const Domain& d, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(d.size());
  for (auto& z : v) z = {g(rng), g(rng)};
  return GridFunction(d, v);
}
double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST(Domain, RejectsBadSizes) {
  EXPECT_THROW(Domain(1.0, 100), std::invalid_argument);
  EXPECT_THROW(Domain(-1.0, 64), std::invalid_argument);
  Domain d(8.0, 16);
  EXPECT_DOUBLE_EQ(d.dx(), 0.5);
  EXPECT_DOUBLE_EQ(d.x(0), -4.0);
}

TEST(ForwardTransform, ConstantIsDcMode) {
  Domain d(4.0, 32);
  auto s = forward_transform(GridFunction::sample(d, [](double) { return 1.0; }));
  for (long xi = -16; xi < 16; ++xi) EXPECT_NEAR(std::abs(s.at(xi) - (xi == 0 ? 4.0 : 0.0)), 0, 1e-13);
}

TEST(ForwardTransform, PureModeIsSingleCoefficient) {
  Domain d(3.0, 64);
  auto s = forward_transform(GridFunction::sample(d, [](double x) { return std::polar(1.0, 2 * kPi * x * 5 / 3.0); }));
  for (long xi = -32; xi < 32; ++xi) EXPECT_NEAR(std::abs(s.at(xi) - (xi == 5 ? 3.0 : 0.0)), 0, 1e-12);
}

TEST(ForwardTransform, GaussianMatchesAnalyticPair) {
  Domain d(64.0, 1024);
  auto s = forward_transform(GridFunction::sample(d, [](double x) { return std::exp(-kPi * x * x); }));
  double err = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double nu = s.frequency(k);
    err = std::max(err, std::abs(s.coeffs[k] - std::exp(-kPi * nu * nu)));
  }
  EXPECT_LT(err, 1e-10);
}

TEST(ForwardTransform, MatchesNaiveDft) {
  Domain d(5.0, 64);
  auto f = random_function(d, 3);
  auto s = forward_transform(f);
  auto ref = oracle::naive_forward(f);
  EXPECT_LT(max_abs_diff(s.coeffs, ref), 1e-12);
}

TEST(ForwardTransform, RejectsNonFinite) {
  Domain d(1.0, 8);
  GridFunction f(d);
  f.values[3] = std::nan("");
  EXPECT_THROW(forward_transform(f), std::invalid_argument);
}

TEST(InverseTransform, ZeroAndSingleMode) {
  Domain d(2.0, 16);
  auto z = inverse_transform(Spectrum(d));
  for (auto& v : z.values) EXPECT_EQ(v, cplx(0));
  Spectrum s(d);
  s.at(3) = 2.0;  // f = (1/L)·2·e^{2πi·3x/L}
  auto f = inverse_transform(s);
  for (std::size_t m = 0; m < d.size(); ++m)
    EXPECT_NEAR(std::abs(f[m] - std::polar(1.0, 2 * kPi * 3 * d.x(m) / 2.0)), 0, 1e-14);
}

TEST(InverseTransform, RoundTripProperty) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    Domain d(1.0 + seed, std::size_t(8) << (seed % 7));
    auto f = random_function(d, seed);
    auto g = inverse_transform(forward_transform(f));
    EXPECT_LT(max_abs_diff(f.values, g.values) / lp_norm(f, INFINITY), 1e-12);
  }
}

TEST(ForwardTransform, PlancherelProperty) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    Domain d(0.5 + seed, std::size_t(16) << (seed % 6));
    auto f = random_function(d, 100 + seed);
    auto s = forward_transform(f);
    double e = 0;
    for (auto& c : s.coeffs) e += std::norm(c);
    const double n2 = std::pow(lp_norm(f, 2), 2);
    EXPECT_NEAR(e / d.length(), n2, 1e-10 * n2);
  }
}

TEST(Transforms, Linearity) {
  Domain d(7.0, 128);
  auto f = random_function(d, 1), g = random_function(d, 2);
  const cplx a(0.3, -1.2), b(2.0, 0.5);
  auto lhs = forward_transform(a * f + b * g);
  auto sf = forward_transform(f), sg = forward_transform(g);
  double err = 0, scale = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    err = std::max(err, std::abs(lhs.coeffs[k] - (a * sf.coeffs[k] + b * sg.coeffs[k])));
    scale = std::max(scale, std::abs(lhs.coeffs[k]));
  }
  EXPECT_LT(err, 1e-12 * scale);
  auto h = pv_convolve(a * f + b * g, [](double y) { return 1.0 / y; }, 3.5);
  auto hf = pv_convolve(f, [](double y) { return 1.0 / y; }, 3.5);
  auto hg = pv_convolve(g, [](double y) { return 1.0 / y; }, 3.5);
  EXPECT_LT(max_abs_diff(h.values, (a * hf + b * hg).values), 1e-12 * lp_norm(h, INFINITY));
}

TEST(PvConvolve, HilbertKernelOnModeMatchesTruncatedMultiplier) {
  // Truncated p.v. ∫_{|y|≤R} e^{-2πiνy} dy/y = -2i Si(2πνR); the oracle integrates Si by high-order quadrature.
  const double L = 16, R = 4;
  std::vector<double> errs;
  for (std::size_t n : {128, 256, 512}) {
    Domain d(L, n);
    for (long xi : {1L, 3L, -5L}) {
      const double nu = double(xi) / L;
      auto f = GridFunction::sample(d, [&](double x) { return std::polar(1.0, 2 * kPi * nu * x); });
      auto g = pv_convolve(f, [](double y) { return 1.0 / y; }, R);
      const cplx expect = cplx(0, -2) * oracle::sine_integral(2 * kPi * nu * R);
      double e = 0;
      for (std::size_t m = 0; m < n; ++m) e = std::max(e, std::abs(g[m] - expect * f[m]));
      if (xi == 3) errs.push_back(e);
    }
  }
  EXPECT_LT(errs.back(), 1e-3);
  // dx-halving slope at least 2
  EXPECT_GT(std::log2(errs[0] / errs[1]), 1.9);
  EXPECT_GT(std::log2(errs[1] / errs[2]), 1.9);
  // and the untruncated multiplier -iπ sgn(ξ) is approached like 1/R
  Domain d(64.0, 1024);
  auto f = GridFunction::sample(d, [](double x) { return std::polar(1.0, 2 * kPi * 4 * x / 64.0); });
  auto g = pv_convolve(f, [](double y) { return 1.0 / y; }, 32.0);
  EXPECT_LT(std::abs(g[100] / f[100] - cplx(0, -kPi)), 2.0 / (2 * kPi * (4 / 64.0) * 32.0));
}

TEST(PvConvolve, ZeroKernelGivesZero) {
  Domain d(4.0, 64);
  auto f = random_function(d, 9);
  auto g = pv_convolve(f, [](double) { return 0.0; }, 2.0);
  EXPECT_EQ(lp_norm(g, INFINITY), 0.0);
}

TEST(PvConvolve, EvenFunctionOddKernelVanishesAtCenter) {
  Domain d(8.0, 128);
  auto f = GridFunction::sample(d, [](double x) { return std::exp(-x * x) * (1 + x * x); });
  auto g = pv_convolve(f, [](double y) { return 1.0 / y + y; }, 4.0);
  EXPECT_LT(std::abs(g[64]), 1e-14);
}

TEST(PvConvolve, Rejections) {
  Domain d(4.0, 64);
  GridFunction f(d);
  EXPECT_THROW(pv_convolve(f, [](double y) { return 1.0 / y; }, 2.5), std::invalid_argument);
  EXPECT_THROW(pv_convolve(f, [](double y) { return y > 1 ? NAN : 1.0 / y; }, 2.0), std::invalid_argument);
}

TEST(LpNorm, Examples) {
  Domain d4(4.0, 64);
  EXPECT_NEAR(lp_norm(GridFunction::sample(d4, [](double) { return 1.0; }), 2), 2.0, 1e-14);
  Domain d(8.0, 256);
  auto step = GridFunction::sample(d, [](double x) { return (x >= 0 && x < 1) ? 3.0 : 0.0; });
  EXPECT_NEAR(lp_norm(step, 1), 3.0, 1e-14);
  Domain g(16.0, 1024);
  EXPECT_NEAR(lp_norm(GridFunction::sample(g, [](double x) { return std::exp(-kPi * x * x); }), 2), std::pow(2.0, -0.25), 1e-6);
  EXPECT_THROW(lp_norm(step, 0.5), std::invalid_argument);
  EXPECT_DOUBLE_EQ(lp_norm(step, INFINITY), 3.0);
}

TEST(Antiderivative, DifferencesMatchClosedForm) {
  Domain d(32.0, 1024);
  auto a = [](double x) { return std::exp(-kPi * x * x) + 0.5 * std::exp(-kPi * (x - 1) * (x - 1)); };
  auto da = [](double x) { return -2 * kPi * x * std::exp(-kPi * x * x) - kPi * (x - 1) * std::exp(-kPi * (x - 1) * (x - 1)); };
  auto G = antiderivative(GridFunction::sample(d, da));
  double err = 0;
  for (std::size_t m = 0; m < d.size(); m += 7)
    for (long j : {1L, 5L, 100L, -37L, 300L}) {
      const double x = d.x(m), y = x - j * d.dx();
      err = std::max(err, std::abs(G.diff(m, j) - (a(x) - a(y))));
    }
  EXPECT_LT(err, 1e-12);
  // constant input: G(x) - G(y) = x - y
  auto C = antiderivative(GridFunction::sample(d, [](double) { return 1.0; }));
  EXPECT_NEAR(std::abs(C.diff(10, 700) - 700 * d.dx()), 0, 1e-11);
}

TEST(Antiderivative, TransposeIsAdjoint) {
  Domain d(6.0, 64);
  auto g = random_function(d, 11), a = random_function(d, 12);
  auto P = antiderivative(g).periodic;
  auto Q = antiderivative_transpose(a);
  cplx lhs = 0, rhs = 0;
  for (std::size_t m = 0; m < d.size(); ++m) lhs += P[m] * a[m], rhs += g[m] * Q[m];
  EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
}
