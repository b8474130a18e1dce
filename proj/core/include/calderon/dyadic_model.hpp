#pragma once
// Shifted dyadic intervals, adapted bumps, the discrete model operator and shifted maximal/square functions.
#include <map>
#include <string>
#include <vector>

#include "calderon/gridcore.hpp"
#include "calderon/lp_decomp.hpp"

namespace calderon {

// I = [2^{-k} m, 2^{-k}(m+1))
struct DyadicInterval {
  int k = 0;
  long m = 0;

  double length() const;
  double left() const { return double(m) * length(); }
  double center() const { return left() + 0.5 * length(); }
  bool contains(double x) const { return x >= left() && x < left() + length(); }
  // I_n: same length, n lengths to the right.
  DyadicInterval shifted(long n) const { return {k, m + n}; }
  bool operator==(const DyadicInterval&) const = default;
};

enum class BumpType { Phi, Psi };

// |I|^{-1/p} g((x - c)/|I|), c the center of I_n; g(u) ∝ e^{-πu²} (Φ) or (1 - 2πu²)e^{-πu²} (Ψ),
// scaled so that the p = 2 bump has unit L² norm.
struct AdaptedBump {
  DyadicInterval base;
  long shift = 0;
  BumpType type = BumpType::Phi;
  double p = 2;

  DyadicInterval support_interval() const { return base.shifted(shift); }
  double eval(double x) const { return derivative(0, x); }
  double derivative(int order, double x) const;  // order ≤ 2
  // Half-width beyond which |bump| < 1e-40 relative to its peak.
  double reach() const { return 6.0 * base.length(); }
};

struct ModelOperatorSpec {
  int l = 2;
  std::vector<long> shifts;     // l entries
  std::vector<BumpType> types;  // l + 1 entries, the last is the output slot
  int k_min = 0, k_max = 0;     // scales
  double x_lo = 0, x_hi = 1;    // family: every I with left endpoint in [x_lo, x_hi)

  void validate() const;
  std::vector<DyadicInterval> family() const;
  std::map<std::string, std::string> to_kv() const;
  static ModelOperatorSpec from_kv(const std::map<std::string, std::string>& kv);
};

// Σ_I |I|^{-(l-2)/2} ∏_j ⟨f_j, Φ^j_{I_{n_j}}⟩ Φ^{l+1}_I
GridFunction apply_model(const ModelOperatorSpec& spec, const std::vector<GridFunction>& fs);
// Σ_I |I|^{-(l-1)/2} ∏_j |⟨f_j, Φ^j_{I_{n_j}}⟩| · |⟨χ, Φ^{l+1}_I⟩|
double model_form(const ModelOperatorSpec& spec, const std::vector<GridFunction>& fs, const GridFunction& indicator);
// ∫ f · bump by grid quadrature over the bump's reach (periodic wrap).
cplx pairing(const GridFunction& f, const AdaptedBump& b);

struct ScaleRange {
  int k_min = 0, k_max = 0;
};

// M^n f(x) = max over dyadic I ∋ x, k ∈ [k_min, k_max], of the mean of |f| over I_n.
// Grid cells [x_m, x_m + dx) carry the sample values; intervals must be unions of cells.
GridFunction shifted_maximal(long n, const GridFunction& f, ScaleRange scales);
// S^n f(x) = (Σ_k |(f ∗ Ψ_k)(x + n 2^{-k})|²)^{1/2}
GridFunction shifted_square(long n, const BumpFamily& family, const GridFunction& f, ScaleRange scales);

}  // namespace calderon
