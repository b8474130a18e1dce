#pragma once
// Multilinear symbols: exact hypercube averages, Monte-Carlo oracle, windowed Fourier coefficients.
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "calderon/numeric.hpp"

namespace calderon {

struct SymbolSpec {
  enum class Kind { Commutator, TaylorWeighted, Power, Product, Circular };
  Kind kind = Kind::Commutator;
  int d = 1;
  int k = 1;
  std::vector<std::vector<double>> c;  // Product: d rows of k nonzero coefficients

  static SymbolSpec commutator(int d);
  static SymbolSpec taylor_weighted(int k, int d);
  static SymbolSpec power(int k, int d);
  static SymbolSpec product(std::vector<std::vector<double>> c);
  static SymbolSpec circular();

  std::size_t arity() const;
  // Number of independent uniform variables used by one Monte-Carlo sample.
  std::size_t mc_dimension() const;
  std::string name() const;
};

// m_d(ξ, ξ_1..ξ_d) = 1 - 2 Vol{α ∈ [0,1]^d : ξ + Σ α_j ξ_j < 0}.
double commutator_symbol(double xi, std::span<const double> xis);
double m1_closed_form(double xi, double xi1);

double eval_symbol_exact(const SymbolSpec& spec, std::span<const double> freqs);

struct McEstimate {
  double estimate = 0, std_error = 0;
  std::size_t samples = 0;
};
McEstimate eval_symbol_mc(const SymbolSpec& spec, std::span<const double> freqs, std::size_t samples,
                          std::uint64_t seed);

// Fourier-coefficient windows on the frequency side.
struct Window {
  enum class Kind { Phi, Psi };
  Kind kind = Kind::Phi;
  std::function<double(double)> hat;
  double lo = -1, hi = 1;  // support of hat
};
struct WindowPair {
  Window phi, psi;
  std::string label = "custom";
};

cplx fourier_coeff(const WindowPair& w, long n, long n1, int resolution);

struct CoeffTable {
  WindowPair windows;
  int resolution = 0;
  std::map<std::pair<long, long>, cplx> values;

  std::string to_csv() const;
};

CoeffTable build_coeff_table(const WindowPair& w, const std::vector<std::pair<long, long>>& indices,
                             int resolution, unsigned threads = 0);

enum class DecayAxis { N, N1 };
struct DecayFit {
  double slope = 0, intercept = 0, r2 = 0;
  std::size_t used = 0;
  std::vector<long> excluded;  // indices dropped because the coefficient was exactly zero
  std::string note;
};
// Least-squares slope of log|C| against log(2 + |n|) along one axis, the other index fixed.
DecayFit fit_decay(const CoeffTable& t, DecayAxis axis, long lo, long hi, long fixed = 0);

}  // namespace calderon
