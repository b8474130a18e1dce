#include "calderon/gridcore.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace calderon {

Domain::Domain(double length, std::size_t n) : L_(length), n_(n) {
  if (!(length > 0) || !std::isfinite(length)) throw std::invalid_argument("Domain: length must be positive");
  if (n < 2 || !is_power_of_two(n)) throw std::invalid_argument("Domain: n must be a power of two ≥ 2");
}

namespace {
void check_finite(const std::vector<cplx>& v, const char* what) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::invalid_argument(std::string(what) + ": non-finite value");
}
void check_same(const Domain& a, const Domain& b) {
  if (!(a == b)) throw std::invalid_argument("grid functions live on different domains");
}

// One cached plan per (n, sign); execution through fftw_execute_dft is thread safe.
fftw_plan plan_for(std::size_t n, int sign) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
  std::lock_guard lock(mu);
  auto key = std::make_pair(n, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::vector<cplx> a(n), b(n);
  fftw_plan p = fftw_plan_dft_1d(int(n), reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, p);
  return p;
}

void fft(std::vector<cplx>& in, std::vector<cplx>& out, int sign) {
  out.resize(in.size());
  fftw_execute_dft(plan_for(in.size(), sign), reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}
}  // namespace

GridFunction::GridFunction(Domain d, std::vector<cplx> v) : domain(d), values(std::move(v)) {
  if (values.size() != domain.size()) throw std::invalid_argument("GridFunction: size mismatch");
  check_finite(values, "GridFunction");
}
GridFunction::GridFunction(Domain d) : domain(d), values(d.size()) {}

GridFunction GridFunction::sample(Domain d, const std::function<cplx(double)>& f) {
  std::vector<cplx> v(d.size());
  for (std::size_t m = 0; m < v.size(); ++m) v[m] = f(d.x(m));
  return GridFunction(d, std::move(v));
}

const cplx& GridFunction::wrap(long m) const {
  const long n = long(values.size());
  m %= n;
  if (m < 0) m += n;
  return values[std::size_t(m)];
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  check_same(domain, o.domain);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}
GridFunction& GridFunction::operator-=(const GridFunction& o) {
  check_same(domain, o.domain);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}
GridFunction& GridFunction::operator*=(cplx c) {
  for (auto& v : values) v *= c;
  return *this;
}
GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(cplx c, GridFunction a) { return a *= c; }
GridFunction pointwise_product(const GridFunction& a, const GridFunction& b) {
  check_same(a.domain, b.domain);
  GridFunction r(a.domain);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] * b[i];
  return r;
}

Spectrum::Spectrum(Domain d, std::vector<cplx> c) : domain(d), coeffs(std::move(c)) {
  if (coeffs.size() != domain.size()) throw std::invalid_argument("Spectrum: size mismatch");
  check_finite(coeffs, "Spectrum");
}
Spectrum::Spectrum(Domain d) : domain(d), coeffs(d.size()) {}

cplx Spectrum::at(long xi) const {
  const long h = long(domain.size() / 2);
  if (xi < -h || xi >= h) throw std::out_of_range("Spectrum::at: frequency outside band");
  return coeffs[std::size_t(xi + h)];
}
cplx& Spectrum::at(long xi) {
  const long h = long(domain.size() / 2);
  if (xi < -h || xi >= h) throw std::out_of_range("Spectrum::at: frequency outside band");
  return coeffs[std::size_t(xi + h)];
}

Spectrum forward_transform(const GridFunction& f) {
  check_finite(f.values, "forward_transform");
  const std::size_t n = f.size();
  std::vector<cplx> in = f.values, out;
  fft(in, out, FFTW_FORWARD);
  Spectrum s(f.domain);
  const double dx = f.domain.dx();
  for (std::size_t k = 0; k < n; ++k) {
    const long xi = f.domain.freq_index(k);
    const std::size_t slot = std::size_t((xi + long(n)) % long(n));
    s.coeffs[k] = (xi % 2 ? -dx : dx) * out[slot];
  }
  return s;
}

GridFunction inverse_transform(const Spectrum& s) {
  check_finite(s.coeffs, "inverse_transform");
  const std::size_t n = s.domain.size();
  std::vector<cplx> in(n), out;
  for (std::size_t k = 0; k < n; ++k) {
    const long xi = s.domain.freq_index(k);
    in[std::size_t((xi + long(n)) % long(n))] = (xi % 2 ? -1.0 : 1.0) * s.coeffs[k];
  }
  fft(in, out, FFTW_BACKWARD);
  const double inv = 1.0 / s.domain.length();
  for (auto& v : out) v *= inv;
  return GridFunction(s.domain, std::move(out));
}

GridFunction apply_multiplier(const GridFunction& f, const std::function<cplx(double)>& m) {
  Spectrum s = forward_transform(f);
  for (std::size_t k = 0; k < s.coeffs.size(); ++k) s.coeffs[k] *= m(s.frequency(k));
  return inverse_transform(s);
}

std::size_t pv_node_count(const Domain& d, double R) {
  if (!(R > 0) || R > 0.5 * d.length() * (1 + 1e-12)) throw std::invalid_argument("pv quadrature: need 0 < R ≤ L/2");
  return std::size_t(std::floor(R / d.dx() + 1e-9));
}

std::vector<double> pv_pair_weights(double dx, std::size_t J) {
  if (J < 3) throw std::invalid_argument("pv quadrature: truncation radius spans fewer than 3 cells");
  // Trapezoid on [0, R] for the even pair function; the t = 0 value is replaced by
  // the O(h^4) extrapolation (4 g(h) - g(2h)) / 3.
  std::vector<double> c(J + 1, dx);
  c[0] = 0;
  c[J] = 0.5 * dx;
  c[1] += dx * (2.0 / 3.0);
  c[2] -= dx * (1.0 / 6.0);
  return c;
}

GridFunction pv_convolve(const GridFunction& f, const std::function<cplx(double)>& kernel, double R) {
  const Domain& d = f.domain;
  const std::size_t n = d.size(), J = pv_node_count(d, R);
  const auto c = pv_pair_weights(d.dx(), J);
  // Circular convolution weights w[j mod n] for |j| ≤ J.
  GridFunction w(d);
  for (std::size_t j = 1; j <= J; ++j) {
    const double y = double(j) * d.dx();
    const cplx kp = kernel(y), km = kernel(-y);
    if (!std::isfinite(kp.real()) || !std::isfinite(kp.imag()) || !std::isfinite(km.real()) ||
        !std::isfinite(km.imag()))
      throw std::invalid_argument("pv_convolve: kernel is non-finite at a sampled node");
    w[j % n] += c[j] * kp;
    w[(n - j) % n] += c[j] * km;
  }
  std::vector<cplx> a = f.values, b = w.values, fa, fb, out;
  fft(a, fa, FFTW_FORWARD);
  fft(b, fb, FFTW_FORWARD);
  for (std::size_t k = 0; k < n; ++k) fa[k] *= fb[k] / double(n);
  fft(fa, out, FFTW_BACKWARD);
  return GridFunction(d, std::move(out));
}

double lp_norm(const GridFunction& f, double p) {
  if (std::isnan(p) || p < 1) throw std::invalid_argument("lp_norm: p must be ≥ 1");
  if (std::isinf(p)) {
    double m = 0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0;
  for (const auto& v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s * f.domain.dx(), 1.0 / p);
}

cplx integrate_product(const GridFunction& f, const GridFunction& g) {
  check_same(f.domain, g.domain);
  cplx s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * f.domain.dx();
}
cplx integrate(const GridFunction& f) {
  cplx s = 0;
  for (const auto& v : f.values) s += v;
  return s * f.domain.dx();
}

cplx Antiderivative::diff(std::size_t m, long j) const {
  return periodic[m] - periodic.wrap(long(m) - j) + mean * (double(j) * periodic.domain.dx());
}

Antiderivative antiderivative(const GridFunction& g) {
  Spectrum s = forward_transform(g);
  const double L = g.domain.length();
  const cplx mean = s.at(0) / L;
  for (std::size_t k = 0; k < s.coeffs.size(); ++k) {
    const long xi = g.domain.freq_index(k);
    // The Nyquist slot has no antisymmetric partner; drop it.
    if (xi == 0 || xi == -long(g.domain.size() / 2)) {
      s.coeffs[k] = 0;
    } else {
      s.coeffs[k] /= cplx(0, 2 * kPi * double(xi) / L);
    }
  }
  return {inverse_transform(s), mean};
}

GridFunction antiderivative_transpose(const GridFunction& a) {
  // The circulant map has multiplier 1/(2πiξ/L); its transpose has the multiplier at -ξ.
  Spectrum s = forward_transform(a);
  const double L = a.domain.length();
  for (std::size_t k = 0; k < s.coeffs.size(); ++k) {
    const long xi = a.domain.freq_index(k);
    if (xi == 0 || xi == -long(a.domain.size() / 2)) {
      s.coeffs[k] = 0;
    } else {
      s.coeffs[k] /= cplx(0, -2 * kPi * double(xi) / L);
    }
  }
  return inverse_transform(s);
}

}  // namespace calderon
