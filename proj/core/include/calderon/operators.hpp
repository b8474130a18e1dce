#pragma once
// Singular integral operators evaluated by symmetric-pair p.v. quadrature, and their multiplier forms.
//
// Conventions: Hf(x) = p.v.∫ f(x-y) dy/y (multiplier -iπ sgn ξ, so H∘H = -π²),
// C_d f(x) = p.v.∫ (A(x)-A(y))^d/(x-y)^{d+1} f(y) dy. R = 0 selects the default truncation L/4.
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "calderon/gridcore.hpp"
#include "calderon/profiles.hpp"
#include "calderon/symbols.hpp"

namespace calderon {

double default_radius(const Domain& d);

GridFunction apply_hilbert(const GridFunction& f, double R = 0);
GridFunction apply_hilbert_spectral(const GridFunction& f);

GridFunction apply_cauchy(const LipschitzProfile& A, const GridFunction& f, double R = 0);

GridFunction apply_commutator_kernel(int d, const LipschitzProfile& A, const GridFunction& f, double R = 0);
// ∏_j (A_j(x)-A_j(y))/(x-y) · f(y)/(x-y) for a list of profiles.
GridFunction apply_commutator_kernel(std::span<const LipschitzProfile* const> profiles, const GridFunction& f,
                                     double R = 0);

using SymbolFn = std::function<cplx(std::span<const double>)>;
// Output spectrum at η: Σ_{ξ+Σξ_j=η} m(ξ, ξ_1..ξ_d) f̂(ξ) ∏ ĝ_j(ξ_j), frequencies in cycles per unit length.
GridFunction apply_commutator_multiplier(const SymbolFn& symbol, const GridFunction& f,
                                         const std::vector<GridFunction>& gs);
GridFunction apply_commutator_multiplier(const SymbolSpec& symbol, const GridFunction& f,
                                         const std::vector<GridFunction>& gs, cplx prefactor = 1.0);
// Largest frequency-tuple count accepted by the multiplier route.
inline constexpr double kMultiplierBudget = 16777216.0;  // 2^24

// C_d(f, g_1..g_d)(x) = p.v.∫ f(y)/(x-y) ∏_j [(1/(x-y)) ∫_y^x g_j] dy.
GridFunction apply_multilinear_kernel(const GridFunction& f, const std::vector<GridFunction>& gs, double R = 0);

struct FormPair {
  cplx via_output = 0;  // ∫ C_d(f_1..f_{d+1}) f_{d+2}
  cplx via_slot = 0;    // ∫ C_d^{*i}(...) f_i
};
// inputs = (f_1, ..., f_{d+1}) as for apply_multilinear_kernel, test = f_{d+2}; 1 ≤ i ≤ d+2.
FormPair form_and_adjoints(int i, const std::vector<GridFunction>& inputs, const GridFunction& test, double R = 0);
// C_d^{*i} evaluated on the grid (the slot-i adjoint).
GridFunction apply_adjoint(int i, const std::vector<GridFunction>& inputs, const GridFunction& test, double R = 0);

// p.v.∫ f(x+t) g(x+αt) dt/t
GridFunction apply_bht(double alpha, const GridFunction& f, const GridFunction& g, double R = 0);

// p.v.∫ (A(x) - T^{d-1}_y A(x))/(x-y)^d · f(y)/(x-y) dy, 1 ≤ d ≤ 4.
GridFunction apply_taylor_remainder(int d, const LipschitzProfile& A, const GridFunction& f, double R = 0);

enum class KernelMode {
  Truncated,  // real-line kernels cut at |t| ≤ R
  Periodic,   // kernels summed over all periods; exact for periodic inputs and integer shifts
};

struct PowerSeries {
  std::vector<double> coeffs;  // F(z) = Σ c_n z^n
  double radius = std::numeric_limits<double>::infinity();
};

struct FiniteDifferenceFactor {
  LipschitzProfile A;
  std::vector<double> shifts;  // one per kernel variable, all nonzero
  PowerSeries F;
};

struct FiniteDifferenceSpec {
  int kernels = 1;  // 1 or 2 (variables t, s)
  std::vector<FiniteDifferenceFactor> factors;
  KernelMode mode = KernelMode::Truncated;  // Periodic needs integer shifts and at most one linear factor
};

// p.v.∫∫ f(x+t+s) ∏_i F_i(Δ_{c_i1 t}/t ∘ Δ_{c_i2 s}/s A_i(x)) dt/t ds/s (one variable when kernels = 1).
GridFunction apply_finite_difference_op(const FiniteDifferenceSpec& spec, const GridFunction& f, double R = 0);

// p.v.∭ (Δ_{at₁}A(x+t₂)/t₁)(Δ_{bt₂}B(x+t₃)/t₂)(Δ_{ct₃}C(x+t₁)/t₃) dt₁dt₂dt₃/(t₁t₂t₃)
GridFunction apply_circular(double a, double b, double c, const LipschitzProfile& A, const LipschitzProfile& B,
                            const LipschitzProfile& C, const Domain& d, KernelMode mode = KernelMode::Periodic,
                            double R = 0);
// Multiplier of apply_circular on modes of (A', B', C') with frequencies (ξ₁, ξ₂, ξ₃).
cplx circular_operator_symbol(double a, double b, double c, double xi1, double xi2, double xi3);

struct IdentityResidual {
  std::string which;
  GridFunction lhs, rhs, residual;  // residual = lhs - rhs on |x| ≤ L/8, zero elsewhere
  double sup = 0, l2 = 0;
};
// which ∈ {calc1, calc2, t1_c1, t1_c2, t1_T1A}; f is used by calc1/calc2, B by t1_c2.
IdentityResidual identity_residuals(const std::string& which, const LipschitzProfile& A, const LipschitzProfile& B,
                                    const LipschitzProfile& f, const Domain& d, double R = 0);
const std::vector<std::string>& identity_tags();

}  // namespace calderon
