#include <gtest/gtest.h>

#include <cmath>

#include "calderon/operators.hpp"
#include "oracles.hpp"

using namespace calderon;

namespace {

LipschitzProfile bump(double a = 1, double b = 1) {
  ProfileSeed s;
  s.tag = ProfileTag::GaussianBump;
  s.amplitude = a;
  s.bandwidth = b;
  return make_profile(s);
}

LipschitzProfile trig(std::vector<TrigTerm> t) { return LipschitzProfile(ProfileTag::Custom, {}, std::move(t)); }

// Relative L² difference of a against b over |x| ≤ lim.
double rel_l2(const GridFunction& a, const GridFunction& b, double lim) {
  double e = 0, s = 0;
  for (std::size_t m = 0; m < a.size(); ++m)
    if (std::abs(a.domain.x(m)) <= lim) {
      e += std::norm(a[m] - b[m]);
      s += std::norm(b[m]);
    }
  return std::sqrt(e / s);
}

double max_diff(const GridFunction& a, const GridFunction& b, double lim) {
  double e = 0;
  for (std::size_t m = 0; m < a.size(); ++m)
    if (std::abs(a.domain.x(m)) <= lim) e = std::max(e, std::abs(a[m] - b[m]));
  return e;
}

GridFunction mode(const Domain& d, long k) {
  return GridFunction::sample(d, [&](double x) { return std::polar(1.0, 2 * kPi * double(k) * x / d.length()); });
}

}  // namespace

TEST(Hilbert, GaussianMatchesDawsonOracle) {
  // ∫ e^{-(x-y)²} dy / y = 2√π D(x), D the Dawson function.
  Domain d(32, 2048);
  auto f = GridFunction::sample(d, [](double x) { return std::exp(-x * x); });
  auto h = apply_hilbert(f);
  for (double x : {-3.0, -1.0, -0.25, 0.5, 2.0, 4.0}) {
    const std::size_t m = std::size_t(std::lround((x + 16) / d.dx()));
    const double xm = d.x(m);
    const double dawson = std::exp(-xm * xm) * oracle::simpson([](double t) { return std::exp(t * t); }, 0, xm, 4000);
    EXPECT_NEAR(h[m].real(), 2 * std::sqrt(kPi) * dawson, 1e-6) << x;
  }
}

TEST(Hilbert, SpectralRouteOnModes) {
  Domain d(8, 64);
  for (long k : {-5L, -1L, 1L, 7L}) {
    auto h = apply_hilbert_spectral(mode(d, k));
    auto expect = cplx(0, -kPi * sgn(double(k))) * mode(d, k);
    EXPECT_LT(max_diff(h, expect, 8), 1e-12);
  }
  // H∘H = -π² on zero-mean functions.
  auto f = mode(d, 3) + 0.5 * mode(d, -2);
  EXPECT_LT(max_diff(apply_hilbert_spectral(apply_hilbert_spectral(f)), -kPi * kPi * f, 8), 1e-11);
}

TEST(Hilbert, TruncatedModeMatchesSineIntegral) {
  Domain d(16, 1024);
  const long k = 3;
  const double R = 4, nu = double(k) / 16;
  auto h = apply_hilbert(mode(d, k), R);
  // ∫_{|y|≤R} e^{-2πiνy} dy/y = -2i Si(2πνR)
  const cplx factor(0, -2 * oracle::sine_integral(2 * kPi * nu * R));
  // The hard cut at R limits the pair rule to second order.
  EXPECT_LT(max_diff(h, factor * mode(d, k), 8), 1e-5);
}

TEST(CommutatorKernel, DegreeZeroIsHilbert) {
  Domain d(32, 1024);
  auto f = sample(bump(1, 1.5), d);
  EXPECT_LT(max_diff(apply_commutator_kernel(0, bump(), f), apply_hilbert(f), 16), 1e-13);
}

TEST(CommutatorKernel, HomogeneousOfDegreeD) {
  Domain d(32, 512);
  auto A = bump(0.7, 0.8);
  auto f = sample(bump(1, 1.3), d);
  for (int deg = 1; deg <= 4; ++deg)
    for (double c : {0.5, 2.0, -1.5}) {
      auto lhs = apply_commutator_kernel(deg, A.scaled(c), f);
      auto rhs = std::pow(c, deg) * apply_commutator_kernel(deg, A, f);
      EXPECT_LT(max_diff(lhs, rhs, 16), 1e-12 * (1 + lp_norm(rhs, INFINITY))) << deg << " " << c;
    }
}

TEST(CommutatorKernel, ScalingCovariance) {
  // A_λ(x) = A(λx)/λ and f_λ(x) = f(λx) on the grid of length L/λ reproduce the unscaled samples.
  const double lambda = 2;
  Domain d(32, 512), dl(32 / lambda, 512);
  auto f = sample(bump(1, 1.3), d), fl = sample(bump(1, 1.3 * lambda), dl);
  for (int deg = 1; deg <= 3; ++deg) {
    auto a = apply_commutator_kernel(deg, bump(0.9, 0.7), f);
    auto b = apply_commutator_kernel(deg, bump(0.9 / lambda, 0.7 * lambda), fl);
    double e = 0;
    for (std::size_t m = 0; m < d.size(); ++m) e = std::max(e, std::abs(a[m] - b[m]));
    EXPECT_LT(e, 1e-12) << deg;
  }
}

TEST(CommutatorKernel, MatchesMultiplierRouteDegreeOne) {
  Domain d(64, 1024);
  auto A = bump();
  auto f = sample(bump(1, 1.5), d);
  auto k = apply_commutator_kernel(1, A, f);
  auto m = apply_commutator_multiplier(SymbolSpec::commutator(1), f, {sample(A, d, 1)}, cplx(0, -kPi));
  EXPECT_LT(rel_l2(k, m, 8), 2e-3);
}

TEST(CommutatorKernel, MatchesMultiplierRouteDegreeTwo) {
  Domain d(16, 256);
  auto A = bump();
  auto f = sample(bump(1, 1.5), d);
  auto a1 = sample(A, d, 1);
  auto k = apply_commutator_kernel(2, A, f);
  auto m = apply_commutator_multiplier(SymbolSpec::commutator(2), f, {a1, a1}, cplx(0, -kPi));
  EXPECT_LT(rel_l2(k, m, 2), 1e-3);
}

TEST(CommutatorKernel, ProfileListMixesProfiles) {
  Domain d(32, 512);
  auto A = bump(), B = bump(0.5, 2);
  auto f = sample(bump(1, 1.5), d);
  const LipschitzProfile* ps[] = {&A, &B};
  auto k = apply_commutator_kernel(ps, f);
  auto ml = apply_multilinear_kernel(f, {sample(A, d, 1), sample(B, d, 1)});
  EXPECT_LT(max_diff(k, ml, 8), 1e-10);
}

TEST(CommutatorMultiplier, RejectsOverBudget) {
  Domain d(16, 512);
  auto f = sample(bump(), d);
  EXPECT_THROW(apply_commutator_multiplier(SymbolSpec::commutator(2), f, {f, f}), std::invalid_argument);
  EXPECT_THROW(apply_commutator_multiplier(SymbolSpec::commutator(2), f, {f}), std::invalid_argument);
}

TEST(CommutatorMultiplier, SingleFrequencySymbolGivesHilbertOfProduct) {
  // m = -iπ sgn(ξ+ξ₁) acts on (f, g) as H(f g).
  Domain d(8, 64);
  auto f = mode(d, 3) + 0.3 * mode(d, -1), g = mode(d, 2) + mode(d, -6);
  auto out = apply_commutator_multiplier(
      [](std::span<const double> x) { return cplx(0, -kPi * sgn(x[0] + x[1])); }, f, {g});
  EXPECT_LT(max_diff(out, apply_hilbert_spectral(pointwise_product(f, g)), 8), 1e-11);
}

TEST(MultilinearKernel, AveragedDerivativeFormMatchesKernel) {
  // (A(x)-A(y))/(x-y) = average of A' over [y, x].
  Domain d(32, 1024);
  auto A = bump(0.8, 0.9);
  auto f = sample(bump(1, 1.5), d), a1 = sample(A, d, 1);
  for (int deg = 1; deg <= 3; ++deg) {
    std::vector<GridFunction> gs(std::size_t(deg), a1);
    EXPECT_LT(max_diff(apply_multilinear_kernel(f, gs), apply_commutator_kernel(deg, A, f), 8), 1e-10);
  }
}

TEST(Form, AdjointPairingsAgreeForEverySlot) {
  Domain d(32, 1024);
  auto f = sample(bump(1, 1.5), d);
  auto g1 = GridFunction::sample(d, [](double x) { return std::exp(-(x - 0.4) * (x - 0.4)) * (1 + x); });
  auto g2 = GridFunction::sample(d, [](double x) { return std::exp(-2 * (x + 0.3) * (x + 0.3)); });
  auto h = GridFunction::sample(d, [](double x) { return std::exp(-(x - 1) * (x - 1)) * std::cos(x); });
  for (const auto& inputs : {std::vector{f, g1}, std::vector{f, g1, g2}}) {
    const int top = int(inputs.size()) + 1;
    for (int i = 1; i <= top; ++i) {
      auto p = form_and_adjoints(i, inputs, h);
      EXPECT_GT(std::abs(p.via_output), 1e-3);
      EXPECT_LT(std::abs(p.via_output - p.via_slot), 1e-8 * std::abs(p.via_output)) << inputs.size() << " " << i;
    }
  }
  EXPECT_THROW(form_and_adjoints(4, {f, g1}, h), std::invalid_argument);
  EXPECT_THROW(form_and_adjoints(0, {f, g1}, h), std::invalid_argument);
}

TEST(Bht, DegenerateAnglesReduceToHilbert) {
  Domain d(32, 1024);
  auto f = sample(bump(1, 1.2), d);
  auto one = GridFunction::sample(d, [](double) { return 1.0; });
  auto g = sample(bump(1, 0.8), d);
  EXPECT_LT(max_diff(apply_bht(0, f, one), -1.0 * apply_hilbert(f), 8), 1e-12);
  EXPECT_LT(max_diff(apply_bht(1, f, g), -1.0 * apply_hilbert(pointwise_product(f, g)), 8), 1e-12);
}

TEST(Bht, ModesMatchSineIntegral) {
  Domain d(16, 512);
  const double R = 4;
  for (double alpha : {0.5, -1.5, 2.0}) {
    const long k1 = 2, k2 = -3;
    auto out = apply_bht(alpha, mode(d, k1), mode(d, k2), R);
    const double w = (double(k1) + alpha * double(k2)) / 16;
    const cplx factor(0, 2 * oracle::sine_integral(2 * kPi * w * R));
    EXPECT_LT(max_diff(out, factor * mode(d, k1 + k2), 8), 2e-4) << alpha;
  }
}

TEST(Bht, AffineProfileIdentity) {
  // p.v.∫ f(x+t) A(x+αt) dt/t with α = 2 and A affine: BHT(f, A) - 2 Hp(A f) + A Hp f = 0, Hp = -H.
  Domain d(32, 1024);
  auto f = sample(bump(1, 1.2), d);
  auto A = GridFunction::sample(d, [](double x) { return 0.3 * x + 0.2; });
  auto lhs = apply_bht(2, f, A) + 2.0 * apply_hilbert(pointwise_product(A, f)) -
             pointwise_product(A, apply_hilbert(f));
  EXPECT_LT(max_diff(lhs, GridFunction(d), 3), 1e-9);
}

TEST(TaylorRemainder, DegreeOneIsFirstCommutator) {
  Domain d(32, 512);
  auto A = bump();
  auto f = sample(bump(1, 1.5), d);
  EXPECT_LT(max_diff(apply_taylor_remainder(1, A, f), apply_commutator_kernel(1, A, f), 16), 1e-12);
}

TEST(TaylorRemainder, VanishesOnLowDegreePolynomials) {
  Domain d(32, 512);
  auto f = sample(bump(1, 1.5), d);
  ProfileSeed s;
  s.tag = ProfileTag::Linear;
  s.amplitude = 0.7;
  auto lin = make_profile(s);
  for (int deg = 2; deg <= 4; ++deg) EXPECT_LT(lp_norm(apply_taylor_remainder(deg, lin, f), INFINITY), 1e-12);
}

TEST(TaylorRemainder, MatchesWeightedSymbol) {
  // Degree 2: -iπ · TaylorWeighted(1, 1)(ξ+ξ₁, -ξ₁) acting on (f, A'').
  Domain d(32, 1024);
  auto A = bump();
  auto f = sample(bump(1, 1.5), d);
  auto k = apply_taylor_remainder(2, A, f);
  const auto tw = SymbolSpec::taylor_weighted(1, 1);
  auto m = apply_commutator_multiplier(
      [&](std::span<const double> x) {
        const double fr[2] = {x[0] + x[1], -x[1]};
        return cplx(0, -kPi) * eval_symbol_exact(tw, fr);
      },
      f, {sample(A, d, 2)});
  EXPECT_LT(rel_l2(k, m, 4), 1e-2);
}

TEST(Cauchy, SeriesInCommutatorsConverges) {
  Domain d(64, 1024);
  auto A0 = bump();
  auto A = A0.scaled(0.3 / A0.lip_norm());
  auto f = sample(bump(1, 1.5), d);
  auto c = apply_cauchy(A, f);
  GridFunction part(d);
  cplx w = 1;
  std::vector<double> err;
  for (int deg = 0; deg <= 6; ++deg) {
    part += w * apply_commutator_kernel(deg, A, f);
    w *= cplx(0, -1);
    err.push_back(rel_l2(part, c, 8));
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_LT(err[i], 0.45 * err[i - 1]) << i;
  EXPECT_LT(err.back(), 2 * std::pow(0.3, 7) / 0.7);
}

TEST(FiniteDifference, SingleKernelLinearIsFirstCommutator) {
  Domain d(32, 512);
  auto A = bump();
  auto f = sample(bump(1, 1.5), d);
  FiniteDifferenceSpec spec;
  spec.factors.push_back({A, {1.0}, {{0.0, 1.0}}});
  auto out = apply_finite_difference_op(spec, f);
  EXPECT_LT(max_diff(out, -1.0 * apply_commutator_kernel(1, A, f), 16), 1e-12);
}

TEST(FiniteDifference, DoubleKernelWithoutFactorsIsHilbertSquared) {
  Domain d(8, 256);
  auto f = mode(d, 2) + 0.5 * mode(d, -3);
  FiniteDifferenceSpec spec;
  spec.kernels = 2;
  spec.mode = KernelMode::Periodic;
  EXPECT_LT(max_diff(apply_finite_difference_op(spec, f), -kPi * kPi * f, 8), 1e-5);
}

TEST(FiniteDifference, SecondDifferenceIsBilinearPowerSymbol) {
  // F(z) = z with shifts (1, 1) acts on (f, A'') with symbol -π² m₁(ξ, ξ₁)².
  Domain d(8, 64);
  auto A = trig({{1 / 8.0, 0.3, 0.1}, {2 / 8.0, 0.0, 0.2}});
  auto f = mode(d, 3) + 0.4 * mode(d, -1);
  FiniteDifferenceSpec spec;
  spec.kernels = 2;
  spec.mode = KernelMode::Periodic;
  spec.factors.push_back({A, {1.0, 1.0}, {{0.0, 1.0}}});
  auto out = apply_finite_difference_op(spec, f);
  auto m = apply_commutator_multiplier(SymbolSpec::power(1, 2), f, {sample(A, d, 2)}, -kPi * kPi);
  EXPECT_LT(rel_l2(out, m, 8), 1e-3);
}

TEST(FiniteDifference, Validation) {
  Domain d(8, 64);
  auto f = mode(d, 1);
  FiniteDifferenceSpec spec;
  spec.factors.push_back({bump(), {1.0}, {{1.0, 1.0}, 0.1}});
  EXPECT_THROW(apply_finite_difference_op(spec, f), std::invalid_argument);  // radius below ‖A'‖
  spec.factors[0].F.radius = 10;
  spec.factors[0].shifts = {0.0};
  EXPECT_THROW(apply_finite_difference_op(spec, f), std::invalid_argument);
  spec.factors[0].shifts = {0.5};
  spec.mode = KernelMode::Periodic;
  EXPECT_THROW(apply_finite_difference_op(spec, f), std::invalid_argument);
  spec.kernels = 3;
  EXPECT_THROW(apply_finite_difference_op(spec, f), std::invalid_argument);
}

TEST(Circular, PeriodicInputsMatchProductOfFirstOrderSymbols) {
  const double L = 8;
  Domain d(L, 32);
  auto A = trig({{1 / L, 1, 0.3}}), B = trig({{2 / L, 0.5, 1}}), C = trig({{1 / L, 0.2, 0.7}});
  for (auto abc : {std::array{1.0, 1.0, 1.0}, std::array{1.0, -1.0, 2.0}}) {
    auto out = apply_circular(abc[0], abc[1], abc[2], A, B, C, d);
    auto m = apply_commutator_multiplier(
        [&](std::span<const double> x) { return circular_operator_symbol(abc[0], abc[1], abc[2], x[0], x[1], x[2]); },
        sample(A, d, 1), {sample(B, d, 1), sample(C, d, 1)});
    EXPECT_LT(rel_l2(out, m, L), 2e-3);
  }
  EXPECT_THROW(apply_circular(0.5, 1, 1, A, B, C, d), std::invalid_argument);
  EXPECT_THROW(apply_circular(0, 1, 1, A, B, C, d, KernelMode::Truncated), std::invalid_argument);
}

TEST(Identities, ResidualsSmallAndConverging) {
  auto A = bump(), f = bump(1, 1.5);
  ProfileSeed sb;
  sb.tag = ProfileTag::PolynomialGrowth;
  sb.degree = 1;
  auto B = make_profile(sb);
  for (const auto& tag : identity_tags()) {
    auto coarse = identity_residuals(tag, A, B, f, Domain(64, 1024));
    auto fine = identity_residuals(tag, A, B, f, Domain(64, 2048));
    EXPECT_LT(fine.sup, 1e-3) << tag;
    EXPECT_GT(std::log2(coarse.sup / fine.sup), 1.8) << tag;
  }
}

TEST(Identities, RejectsUnknownTagAndWideSupport) {
  auto A = bump();
  EXPECT_THROW(identity_residuals("calc3", A, A, A, Domain(64, 256)), std::invalid_argument);
  EXPECT_THROW(identity_residuals("t1_c1", bump(1, 0.3), A, A, Domain(64, 256)), std::invalid_argument);
}
