#pragma once
// Periodic uniform grids on [-L/2, L/2), Fourier transforms and p.v. convolution.
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "calderon/numeric.hpp"

namespace calderon {

class Domain {
 public:
  Domain(double length, std::size_t n);
  double length() const { return L_; }
  std::size_t size() const { return n_; }
  double dx() const { return L_ / double(n_); }
  double x(std::size_t m) const { return -0.5 * L_ + double(m) * dx(); }
  // Integer frequency index of storage slot k (slots run over -n/2 .. n/2-1).
  long freq_index(std::size_t k) const { return long(k) - long(n_ / 2); }
  bool operator==(const Domain& o) const { return L_ == o.L_ && n_ == o.n_; }

 private:
  double L_;
  std::size_t n_;
};

struct GridFunction {
  Domain domain;
  std::vector<cplx> values;

  GridFunction(Domain d, std::vector<cplx> v);
  explicit GridFunction(Domain d);  // zeros
  static GridFunction sample(Domain d, const std::function<cplx(double)>& f);

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t m) { return values[m]; }
  const cplx& operator[](std::size_t m) const { return values[m]; }
  // Periodic index access.
  const cplx& wrap(long m) const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx c);
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx c, GridFunction a);
GridFunction pointwise_product(const GridFunction& a, const GridFunction& b);

struct Spectrum {
  Domain domain;
  std::vector<cplx> coeffs;  // slot k ↔ frequency (k - n/2)/L

  Spectrum(Domain d, std::vector<cplx> c);
  explicit Spectrum(Domain d);
  cplx at(long xi) const;  // xi ∈ [-n/2, n/2)
  cplx& at(long xi);
  double frequency(std::size_t k) const { return double(domain.freq_index(k)) / domain.length(); }
};

Spectrum forward_transform(const GridFunction& f);
GridFunction inverse_transform(const Spectrum& s);

// Multiply the spectrum by m(frequency) and transform back.
GridFunction apply_multiplier(const GridFunction& f, const std::function<cplx(double)>& m);

// Σ_{0<|y_j|≤R} f(x_m - y_j) kernel(y_j) dx over symmetric pairs, with the
// endpoint-corrected trapezoid weights described in the README.
GridFunction pv_convolve(const GridFunction& f, const std::function<cplx(double)>& kernel, double R);

// Weights c_j, j = 1..J, of the corrected symmetric-pair rule: the p.v. integral of an
// odd-singular integrand over [-R, R] is ≈ Σ_j c_j (g(t_j) + g(-t_j)), t_j = j·dx.
std::vector<double> pv_pair_weights(double dx, std::size_t J);
std::size_t pv_node_count(const Domain& d, double R);

double lp_norm(const GridFunction& f, double p);
// ∫ f g dx (bilinear, no conjugation).
cplx integrate_product(const GridFunction& f, const GridFunction& g);
cplx integrate(const GridFunction& f);

// Spectral antiderivative: G(x_m) = mean·x_m + periodic part, so that
// G(x) - G(y) = ∫_y^x g for y = x - t taken on the real line.
struct Antiderivative {
  GridFunction periodic;
  cplx mean;  // (1/L) ∫ g
  cplx diff(std::size_t m, long j) const;  // G(x_m) - G(x_m - j·dx)
};
Antiderivative antiderivative(const GridFunction& g);
// Transpose of g ↦ periodic part (a circulant map).
GridFunction antiderivative_transpose(const GridFunction& a);

}  // namespace calderon
