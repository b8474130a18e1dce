#pragma once
// Littlewood–Paley families, the paraproduct form and the Whitney-type splitting.
#include <array>
#include <span>
#include <vector>

#include "calderon/gridcore.hpp"
#include "calderon/symbols.hpp"

namespace calderon {

enum class FamilyKind { NonCompact, Compact };

// Φ_k(x) = 2^k Φ(2^k x), Ψ = Φ - ½Φ(·/2), Ψ_k = Φ_k - Φ_{k-1}.
class BumpFamily {
 public:
  explicit BumpFamily(FamilyKind kind) : kind_(kind) {}
  FamilyKind kind() const { return kind_; }

  double phi(double x) const;
  double psi(double x) const { return phi(x) - 0.5 * phi(0.5 * x); }
  double phi_hat(double xi) const;
  double psi_hat(double xi) const;

  double phi_k(int k, double x) const;
  double psi_k(int k, double x) const;
  double phi_hat_k(int k, double xi) const;
  double psi_hat_k(int k, double xi) const;

 private:
  FamilyKind kind_;
};

BumpFamily build_family(FamilyKind kind);

struct TelescopeReport {
  double max_error = 0;       // |Σ Ψ_k - (Φ_k̄ - Φ_{k_min-1})| over the grid
  double truncation_sup = 0;  // sup |Φ_{k_min-1}|
};
TelescopeReport telescope_check(const BumpFamily& f, int k_min, int k_bar, const Domain& grid);

// sup over |ξ| ∈ [xi_lo, xi_hi] of |Σ_{k=k_min}^{k_max} Ψ̂_k(ξ) - 1|.
double partition_of_unity_residual(const BumpFamily& f, int k_min, int k_max, double xi_lo, double xi_hi,
                                   std::size_t samples = 2001);

// Ψ̂(ξ)/ξ², continuous at 0.
double psi_factor(const BumpFamily& f, double xi);

enum class SlotType { Phi, Psi };

struct ParaproductSpec {
  std::vector<SlotType> slots;    // d+2 entries; the last slot is the output slot
  std::vector<FamilyKind> kinds;  // per slot; empty means all non-compact
  int k_min = 0, k_max = 0;
  void validate() const;
};

// Σ_k Φ^{d+2}_k ∗ ∏_{j≤d+1} (f_j ∗ Φ^j_k), so that ⟨Π(f_1..f_{d+1}), f_{d+2}⟩ is the form.
GridFunction paraproduct_apply(const ParaproductSpec& spec, const std::vector<GridFunction>& inputs);

// Three-branch splitting of the (ξ̃, ξ₁) plane over r ∈ [r_min, r_max].
class WhitneySplit {
 public:
  WhitneySplit(BumpFamily f, int r_min, int r_max);
  // {Σ Φ̂_{r-1}(ξ̃)Ψ̂_r(ξ₁), Σ Ψ̂_r(ξ̃)Ψ̂_r(ξ₁), Σ Ψ̂_r(ξ̃)Φ̂_{r-1}(ξ₁)}
  std::array<double, 3> branches(double xi_t, double xi1) const;
  double total(double xi_t, double xi1) const;
  int r_min() const { return r_min_; }
  int r_max() const { return r_max_; }

 private:
  BumpFamily f_;
  int r_min_, r_max_;
};
WhitneySplit whitney_split(const BumpFamily& f, int r_min, int r_max);

// Σ_k Σ_i Ψ̂_k(ξ_i) ∏_{j<i} Φ̃_{k-1}(ξ_j) ∏_{j>i} Φ̃_k(ξ_j) with Φ̃_k = Φ̂_k - Φ̂_{k_min-1};
// equals ∏_j Φ̃_{k_max}(ξ_j) exactly.
struct DecompositionCheck {
  double sum = 0, target = 0;
};
DecompositionCheck decomposition_check(const BumpFamily& f, std::span<const double> freqs, int k_min, int k_max);

// Compact family at scale 0: Φ̂ for ξ̃ and Ψ̂ for ξ₁.
WindowPair standard_window_pair();

}  // namespace calderon
