#pragma once
// Small numeric helpers shared across modules.
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace calderon {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

inline double sgn(double v) { return (v > 0) - (v < 0); }

struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0;
  std::size_t points = 0;
};

// Ordinary least squares y ≈ intercept + slope·x. r2 is 0 when y has no spread.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Gauss–Legendre rule on [-1,1]; nodes ascending.
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int nodes);  // nodes ∈ {8, 16, 32, 64}

// Composite rule on [a,b] with `panels` equal panels of a `nodes`-point rule.
GaussRule composite_gauss(double a, double b, int panels, int nodes = 16);

bool is_power_of_two(std::size_t n);

// Worker count from CALDERON_LAB_THREADS (default: hardware concurrency, at least 1).
unsigned worker_count(unsigned requested = 0);
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace calderon
