#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "calderon/lp_decomp.hpp"
#include "oracles.hpp"

using namespace calderon;

namespace {
const BumpFamily G(FamilyKind::NonCompact);
const BumpFamily C(FamilyKind::Compact);

double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}
}  // namespace

TEST(BuildFamily, NonCompactMoments) {
  EXPECT_LT(std::abs(trapezoid([](double x) { return G.psi(x); }, -40, 40, 8192)), 1e-12);
  EXPECT_LT(std::abs(trapezoid([](double x) { return x * G.psi(x); }, -40, 40, 8192)), 1e-12);
  // Ψ̂'(0) = -2πi ∫ x Ψ(x) dx, and the closed form is even
  const double h = 1e-4;
  EXPECT_LT(std::abs(G.psi_hat(h) - G.psi_hat(-h)) / (2 * h), 1e-12);
  EXPECT_NEAR(trapezoid([](double x) { return G.phi(x); }, -40, 40, 8192), 1.0, 1e-13);
}

TEST(BuildFamily, CompactPlateau) {
  EXPECT_EQ(C.phi_hat(0.4), 1.0);
  EXPECT_EQ(C.phi_hat(1.2), 0.0);
  EXPECT_EQ(C.phi_hat(-0.5), 1.0);
  EXPECT_EQ(C.psi_hat(0.2), 0.0);
  for (double x = 0; x < 1.5; x += 0.01) EXPECT_GE(C.psi_hat(x), 0.0);
  // space-side mother integrates to Φ̂(0) = 1
  EXPECT_NEAR(trapezoid([](double x) { return C.phi(x); }, -60, 60, 6000), 1.0, 1e-6);
}

TEST(BumpFamily, UnitMassAndScaleCovariance) {
  for (int k = -3; k <= 3; ++k) {
    const double s = std::ldexp(1.0, k);
    const double mass = trapezoid([&](double x) { return std::abs(G.phi_k(k, x)); }, -40 / s, 40 / s, 16384);
    EXPECT_NEAR(mass, 1.0, 1e-10);
    for (double x : {-0.7, 0.0, 0.3, 1.9})
      EXPECT_NEAR(G.phi_k(k, x), s * std::exp(-kPi * s * s * x * x), 1e-14 * std::max(1.0, s));
  }
}

TEST(TelescopeCheck, ExactFiniteTelescoping) {
  Domain grid(16.0, 2048);
  for (int kbar : {0, 2, 5}) {
    auto r = telescope_check(G, -6, kbar, grid);
    EXPECT_LE(r.max_error, 1e-12);
  }
  const double a = telescope_check(G, -3, 2, grid).truncation_sup, b = telescope_check(G, -4, 2, grid).truncation_sup;
  EXPECT_DOUBLE_EQ(a / b, 2.0);
  EXPECT_DOUBLE_EQ(a, std::ldexp(1.0, -4));
  EXPECT_THROW(telescope_check(C, 0, 1, grid), std::invalid_argument);
}

TEST(PartitionOfUnity, ResidualShrinksPerScale) {
  double prev = partition_of_unity_residual(G, -6, 6, 1.0 / 16, 16.0);
  for (int K = 7; K <= 10; ++K) {
    const double r = partition_of_unity_residual(G, -K, K, 1.0 / 16, 16.0);
    EXPECT_GE(prev / r, 1.9) << K;
    prev = r;
  }
  EXPECT_LT(partition_of_unity_residual(C, -8, 8, 1.0 / 16, 16.0), 1e-15);
}

TEST(PsiFactor, RemovableSingularityAndReconstruction) {
  EXPECT_TRUE(std::isfinite(psi_factor(G, 0.0)));
  EXPECT_NEAR(psi_factor(G, 0.0), psi_factor(G, 1e-6), 1e-9);
  EXPECT_DOUBLE_EQ(psi_factor(G, 1.0), G.psi_hat(1.0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-8, 8);
  for (int i = 0; i < 100; ++i) {
    const double xi = U(rng);
    const double direct = std::exp(-kPi * xi * xi) - std::exp(-4 * kPi * xi * xi);
    EXPECT_NEAR(xi * xi * psi_factor(G, xi), direct, 1e-10);
  }
}

TEST(Paraproduct, Validation) {
  Domain d(16.0, 256);
  std::vector<GridFunction> in(2, GridFunction(d));
  EXPECT_THROW(paraproduct_apply({{SlotType::Phi, SlotType::Phi, SlotType::Psi}, {}, 0, 1}, in), std::invalid_argument);
  EXPECT_THROW(paraproduct_apply({{SlotType::Psi, SlotType::Phi, SlotType::Psi}, {}, 0, 4}, in), std::invalid_argument);
  EXPECT_NO_THROW(paraproduct_apply({{SlotType::Psi, SlotType::Phi, SlotType::Psi}, {}, 0, 3}, in));
}

TEST(Paraproduct, ConstantsPassThroughPhiSlots) {
  Domain d(32.0, 1024);
  auto f = GridFunction::sample(d, [](double x) { return std::exp(-kPi * x * x) * std::cos(5 * x); });
  auto one = GridFunction::sample(d, [](double) { return 1.0; });
  ParaproductSpec spec{{SlotType::Phi, SlotType::Psi, SlotType::Phi, SlotType::Psi}, {}, -4, 3};
  auto out = paraproduct_apply(spec, {one, f, one});
  // oracle: Σ_k Ψ̂_k(ξ)² f̂(ξ)
  auto ref = apply_multiplier(f, [](double xi) {
    double s = 0;
    for (int k = -4; k <= 3; ++k) s += std::pow(G.psi_hat_k(k, xi), 2);
    return cplx(s);
  });
  double e = 0;
  for (std::size_t m = 0; m < d.size(); ++m) e = std::max(e, std::abs(out[m] - ref[m]));
  EXPECT_LT(e, 1e-12);
}

TEST(Paraproduct, PerfectInequality) {
  Domain d(32.0, 2048);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> N;
  for (int t = 0; t < 5; ++t) {
    std::vector<cplx> v(d.size());
    for (auto& z : v) z = N(rng);
    GridFunction f(d, v);
    const double sup = lp_norm(f, INFINITY);
    for (int k = -3; k <= 2; ++k) {
      auto g = apply_multiplier(f, [k](double xi) { return cplx(G.phi_hat_k(k, xi)); });
      EXPECT_LE(lp_norm(g, INFINITY), sup + 1e-12) << k;
    }
  }
}

TEST(Paraproduct, SingleScaleMatchesDirectConvolution) {
  Domain d(16.0, 256);
  const int k = 1;
  std::vector<GridFunction> in;
  for (int j = 0; j < 2; ++j)
    in.push_back(GridFunction::sample(d, [j](double x) { return std::exp(-0.5 * x * x) * std::polar(1.0, 2 * kPi * (j + 1) * x / 16.0); }));
  ParaproductSpec spec{{SlotType::Psi, SlotType::Phi, SlotType::Psi}, {}, k, k};
  auto out = paraproduct_apply(spec, in);
  // direct periodic space-side convolutions with the closed-form bumps
  auto conv = [&](const GridFunction& f, auto kernel) {
    GridFunction r(d);
    for (std::size_t m = 0; m < d.size(); ++m)
      for (std::size_t q = 0; q < d.size(); ++q) {
        double y = d.x(m) - d.x(q);
        double acc = 0;
        for (int w = -2; w <= 2; ++w) acc += kernel(y + w * d.length());
        r[m] += f[q] * acc * d.dx();
      }
    return r;
  };
  auto psi = [&](double y) { return G.psi_k(k, y); };
  auto phi = [&](double y) { return G.phi_k(k, y); };
  auto ref = conv(pointwise_product(conv(in[0], psi), conv(in[1], phi)), psi);
  double e = 0;
  for (std::size_t m = 0; m < d.size(); ++m) e = std::max(e, std::abs(out[m] - ref[m]));
  EXPECT_LT(e, 1e-8);
}

TEST(WhitneySplit, BranchesSumToOne) {
  auto w = whitney_split(C, -10, 10);
  EXPECT_NEAR(w.total(0.3, 0.3), 1.0, 1e-8);
  EXPECT_EQ(w.branches(8.0, 0.3)[0], 0.0);
  for (double a = -3; a <= 3; a += 0.07)
    for (double b = -3; b <= 3; b += 0.11) {
      auto br = w.branches(a, b);
      for (double v : br) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0 + 1e-12);
      }
      if (std::abs(a) > 0.01 && std::abs(b) > 0.01) EXPECT_NEAR(br[0] + br[1] + br[2], 1.0, 1e-12);
    }
  EXPECT_THROW(whitney_split(G, 0, 1), std::invalid_argument);
}

TEST(DecompositionCheck, ExactAgainstTelescopedProduct) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-6, 6);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> xs(2 + t % 4);
    for (auto& v : xs) v = U(rng);
    for (const auto* fam : {&G, &C}) {
      auto c = decomposition_check(*fam, xs, -8, 6);
      EXPECT_NEAR(c.sum, c.target, 1e-12);
    }
    auto c = decomposition_check(C, xs, -12, 6);
    bool away = true;
    for (double v : xs) away &= std::abs(v) > 0.01;
    if (away) EXPECT_NEAR(c.target, 1.0, 1e-12);
  }
}
