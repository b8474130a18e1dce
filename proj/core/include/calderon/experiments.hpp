#pragma once
// Experiment drivers: randomized norm lower bounds, growth/decay/shift/convergence studies, records.
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "calderon/dyadic_model.hpp"
#include "calderon/lp_decomp.hpp"
#include "calderon/operators.hpp"
#include "calderon/profiles.hpp"
#include "calderon/symbols.hpp"

namespace calderon {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

enum class OperatorKind { Identity, Hilbert, Commutator, Paraproduct };
std::string to_string(OperatorKind k);
OperatorKind operator_kind_from_string(const std::string& s);

struct NormQuery {
  OperatorKind op = OperatorKind::Commutator;
  int d = 1;                // commutator / paraproduct degree
  ProfileSeed profile{};    // rescaled so that ‖A'‖∞ = profile_scale
  double profile_scale = 1;
  std::vector<double> exponents{2};  // p_1..p_arity, ∞ allowed
  double p_out = 2;
  std::size_t trials = 64;
  std::uint64_t seed = 1;
  double L = 64;
  std::size_t n = 4096;
  double R = 0;  // 0: L/4

  std::size_t arity() const;
  // Hölder relation 1/p = Σ 1/p_j (1e-12), p_j ∈ (1, ∞], arity match, grid budget.
  void validate() const;
  std::map<std::string, std::string> to_kv() const;
  static NormQuery from_kv(const std::map<std::string, std::string>& kv);
};

struct FitResult {
  std::string name;
  double slope = 0, intercept = 0, r2 = 0;
  std::size_t points = 0;
  double aic = 0;
};

// Curve data for plots; not part of the CSV or JSON output.
struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct ExperimentRecord {
  std::string experiment;
  std::map<std::string, std::string> query;
  double estimate = 0;
  std::string estimate_kind = "value";  // what `estimate` measures
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // CSV body
  std::vector<FitResult> fits;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;
  std::string verdict;
  bool pass = true;
  double wall_time = 0;
  std::string version = kArtifactVersion;
  std::vector<Series> series;
  std::string x_label = "x", y_label = "y";
  bool log_x = false, log_y = false;

  double metric(const std::string& name) const;  // throws if absent
  const FitResult& fit(const std::string& name) const;
  std::string to_csv() const;
  std::string to_json() const;
};

// Writes <dir>/<stem>.csv and <dir>/<stem>.json and appends the JSON summary to <dir>/records.jsonl.
void persist(const ExperimentRecord& r, const std::string& dir, const std::string& stem);

// Lower bound: max over trials of ‖T(f_1..)‖_p / ∏ ‖f_j‖_{p_j}. For commutators and paraproducts the
// infinite-exponent slots j ≥ 1 hold A' (sup = profile_scale) and act as operator parameters, so they are
// left out of the denominator and the estimate scales like profile_scale^d. Finite slots draw seeded
// band-limited, translated-bump and modulated-bump inputs.
ExperimentRecord estimate_norm(const NormQuery& q);
// The inputs used by trial t (exposed for tests).
std::vector<GridFunction> trial_inputs(const NormQuery& q, std::size_t t);

// Least squares with an AIC figure n·ln(RSS/n) + 4.
FitResult fit_named(const std::string& name, const std::vector<double>& x, const std::vector<double>& y);

struct GrowthOptions {
  double p1 = 2;  // exponent of the f slot; the remaining slots are ∞
  ProfileSeed profile{};
  std::size_t trials = 48;
  std::uint64_t seed = 7;
  double L = 64;
  std::size_t n = 4096;
  double profile_scale = 1;
  bool include_linear = true;  // also try A(x) = x, the extremal profile for ‖A'‖∞ = 1
};
// d = 1..d_max, estimate = max over the candidate profiles; fits "loglog" (log est vs log d) and "semilog" (log est vs d).
ExperimentRecord growth_in_d(int d_max, const GrowthOptions& opt);

struct DecayOptions {
  long n_lo = 8, n_hi = 256, n1_lo = 8, n1_hi = 128;
  int resolution = 512;
  long case_extent = 12;   // Case 1_b grid: |n|, |n₁| ≤ extent
  double sharp = 3;        // the "#" exponent of the two-term model
  bool fcoef = true;       // also measure the three-window configuration
  long fcoef_hi = 32;
};
ExperimentRecord decay_study(const WindowPair& w, const DecayOptions& opt);

// Three-window coefficient ∭ Vol₊(ξ+αξ₁+βξ₂) φ̂(ξ)φ̂(ξ₁)φ̂(ξ₂) e^{-2πi(nξ+n₁ξ₁+n₂ξ₂)} with windows on
// [-2,-1], [1,2], [-1/2,1/2].
cplx fcoef_coefficient(long n, long n1, long n2, int resolution);

enum class ShiftOperator { Maximal, Square, ModelForm };
std::string to_string(ShiftOperator k);
ShiftOperator shift_operator_from_string(const std::string& s);

struct ShiftOptions {
  std::size_t random_inputs = 7;
  std::uint64_t seed = 3;
  // Maximal: cells per unit and the half-length of the domain in units.
  std::size_t cells_per_unit = 1024;
  double half_length = 1024;
};
// Fits "log" (estimate vs log(2+n)) and "power" (log estimate vs log n, n ≥ 1).
ExperimentRecord shift_growth_study(ShiftOperator op, const std::vector<long>& shifts, const ShiftOptions& opt);

struct ConvergenceOptions {
  std::vector<std::size_t> ladder{1024, 2048, 4096};
  double L = 64;
  ProfileSeed A{}, B{}, f{};
  double floor = 1e-13;
};
ConvergenceOptions default_convergence_options();
// tag: an identity tag, or "taylor_linear" (Taylor remainder of a linear profile, identically zero).
ExperimentRecord convergence_study(const std::string& tag, const ConvergenceOptions& opt);

// Residual table of every identity tag at one resolution; pass when each sup residual ≤ tol.
ExperimentRecord identity_study(std::size_t n, const ConvergenceOptions& opt, double tol = 1e-3);

// Relative L² gap on |x| ≤ L/8 between the kernel and multiplier routes of C_d for a Gaussian profile.
ExperimentRecord kernel_multiplier_study(int d, double L, std::size_t n, double tol);

// Partial sums Σ_{k≤D} (-i)^k C_k f against the Cauchy integral for a profile with ‖A'‖∞ = lip.
ExperimentRecord cauchy_series_study(int D, double lip, double L, std::size_t n);

}  // namespace calderon
