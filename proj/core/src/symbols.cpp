#include "calderon/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace calderon {

SymbolSpec SymbolSpec::commutator(int d) {
  if (d < 0) throw std::invalid_argument("Commutator(d): d ≥ 0");
  return {Kind::Commutator, d, d, {}};
}
SymbolSpec SymbolSpec::taylor_weighted(int k, int d) {
  if (k < 1 || d < 0) throw std::invalid_argument("TaylorWeighted(k, d): k ≥ 1, d ≥ 0");
  return {Kind::TaylorWeighted, d, k, {}};
}
SymbolSpec SymbolSpec::power(int k, int d) {
  if (k < 0 || d < 1) throw std::invalid_argument("Power(k, d): k ≥ 0, d ≥ 1");
  return {Kind::Power, d, k, {}};
}
SymbolSpec SymbolSpec::product(std::vector<std::vector<double>> c) {
  if (c.empty() || c[0].empty()) throw std::invalid_argument("Product: empty coefficient matrix");
  for (const auto& row : c) {
    if (row.size() != c[0].size()) throw std::invalid_argument("Product: ragged coefficient matrix");
    for (double v : row)
      if (v == 0 || !std::isfinite(v)) throw std::invalid_argument("Product: coefficients must be nonzero and finite");
  }
  const int d = int(c.size()), k = int(c[0].size());
  return {Kind::Product, d, k, std::move(c)};
}
SymbolSpec SymbolSpec::circular() { return {Kind::Circular, 2, 2, {}}; }

std::size_t SymbolSpec::arity() const {
  switch (kind) {
    case Kind::Commutator: return std::size_t(d) + 1;
    case Kind::Circular: return 3;
    default: return std::size_t(k) + 1;
  }
}

std::size_t SymbolSpec::mc_dimension() const {
  switch (kind) {
    case Kind::Commutator: return std::size_t(d);
    case Kind::TaylorWeighted: return std::size_t(k);
    case Kind::Power:
    case Kind::Product: return std::size_t(d) * std::size_t(k);
    case Kind::Circular: return 6;
  }
  return 0;
}

std::string SymbolSpec::name() const {
  std::ostringstream o;
  switch (kind) {
    case Kind::Commutator: o << "Commutator(" << d << ")"; break;
    case Kind::TaylorWeighted: o << "TaylorWeighted(" << k << "," << d << ")"; break;
    case Kind::Power: o << "Power(" << k << "," << d << ")"; break;
    case Kind::Product: o << "Product(" << d << "x" << k << ")"; break;
    case Kind::Circular: o << "Circular"; break;
  }
  return o.str();
}

namespace {

void check_freqs(const SymbolSpec& s, std::span<const double> f) {
  if (f.size() != s.arity()) throw std::invalid_argument(s.name() + ": wrong number of frequencies");
  for (double v : f)
    if (!std::isfinite(v)) throw std::invalid_argument(s.name() + ": non-finite frequency");
}

// Vol{β ∈ [0,1]^d : Σ a_j β_j < t} for a_j > 0, 0 ≤ t ≤ Σa/2, by inclusion–exclusion.
double halfspace_volume(const std::vector<double>& a, double t) {
  const std::size_t d = a.size();
  if (t <= 0) return 0;
  double denom = 1;
  for (std::size_t j = 0; j < d; ++j) denom *= a[j] * double(j + 1);
  double acc = 0;
  for (std::size_t mask = 0; mask < (std::size_t(1) << d); ++mask) {
    double r = t;
    int bits = 0;
    for (std::size_t j = 0; j < d; ++j)
      if (mask >> j & 1) r -= a[j], ++bits;
    if (r <= 0) continue;
    acc += (bits % 2 ? -1.0 : 1.0) * std::pow(r, double(d));
  }
  return acc / denom;
}

// Average over [0,1] of sgn(c + α e)·(1-α)^p, exact.
double weighted_average_1d(double c, double e, int p) {
  auto mass = [p](double lo, double hi) {  // ∫_lo^hi (1-α)^p
    return (std::pow(1 - lo, p + 1) - std::pow(1 - hi, p + 1)) / double(p + 1);
  };
  if (e == 0) return sgn(c) * mass(0, 1);
  const double a = -c / e;
  if (a <= 0 || a >= 1) return sgn(c + 0.5 * e) * mass(0, 1);
  return sgn(c) * mass(0, a) + sgn(c + e) * mass(a, 1);
}

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double taylor_weighted_exact(int k, int d, std::span<const double> f) {
  const double xi = f[0];
  const double norm = std::pow(factorial(d), k);
  if (k == 1) return weighted_average_1d(xi, f[1], d) / norm;
  if (k == 2) {
    // Outer α₁ split where the inner breakpoint enters/leaves [0,1] or c = ξ + α₁ξ₁ vanishes.
    const double e1 = f[1], e2 = f[2];
    std::vector<double> cuts{0.0, 1.0};
    if (e1 != 0) {
      for (double v : {-xi / e1, -(xi + e2) / e1})
        if (v > 0 && v < 1) cuts.push_back(v);
    }
    std::sort(cuts.begin(), cuts.end());
    const GaussRule& g = gauss_legendre(16);  // exact: integrand is a polynomial of degree 2d+1 per piece
    double acc = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double lo = cuts[i], hi = cuts[i + 1];
      if (hi <= lo) continue;
      for (std::size_t q = 0; q < g.x.size(); ++q) {
        const double a1 = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.x[q];
        acc += 0.5 * (hi - lo) * g.w[q] * std::pow(1 - a1, d) * weighted_average_1d(xi + a1 * e1, e2, d);
      }
    }
    return acc / norm;
  }
  // k ≥ 3: tensor Gauss–Legendre, 64 nodes per axis.
  const GaussRule& g = gauss_legendre(64);
  const std::size_t m = g.x.size();
  std::vector<std::size_t> idx(std::size_t(k), 0);
  double acc = 0;
  while (true) {
    double arg = xi, w = 1;
    for (int j = 0; j < k; ++j) {
      const double a = 0.5 + 0.5 * g.x[idx[j]];
      arg += a * f[std::size_t(j) + 1];
      w *= 0.5 * g.w[idx[j]] * std::pow(1 - a, d);
    }
    acc += sgn(arg) * w;
    int j = 0;
    while (j < k && ++idx[std::size_t(j)] == m) idx[std::size_t(j++)] = 0;
    if (j == k) break;
  }
  return acc / norm;
}

}  // namespace

double commutator_symbol(double xi, std::span<const double> xis) {
  // Flip negative ξ_j (α → 1-α) so every slope is positive: Σ a_j β_j < s.
  std::vector<double> a;
  double neg = 0, pos = 0;
  for (double v : xis) {
    if (v > 0) a.push_back(v), pos += v;
    if (v < 0) a.push_back(-v), neg -= v;
  }
  if (a.empty()) return sgn(xi);
  std::sort(a.begin(), a.end());
  const double s = neg - xi, sbar = pos + xi;  // s + sbar = Σa
  if (s <= 0) return 1;
  if (sbar <= 0) return -1;
  const double v = halfspace_volume(a, std::min(s, sbar));
  const double m = std::clamp(1 - 2 * v, -1.0, 1.0);
  return s < sbar ? m : (s > sbar ? -m : 0.0);
}

double m1_closed_form(double xi, double xi1) {
  if (xi1 == 0 || !std::isfinite(xi1) || !std::isfinite(xi))
    throw std::invalid_argument("m1_closed_form: ξ₁ must be finite and nonzero");
  if (xi == 0) return sgn(xi1);
  if (xi * (xi + xi1) >= 0) return sgn(xi);
  return sgn(xi1) * (1 + 2 * xi / xi1);
}

double eval_symbol_exact(const SymbolSpec& spec, std::span<const double> f) {
  check_freqs(spec, f);
  switch (spec.kind) {
    case SymbolSpec::Kind::Commutator: return commutator_symbol(f[0], f.subspan(1));
    case SymbolSpec::Kind::Power: return std::pow(commutator_symbol(f[0], f.subspan(1)), spec.d);
    case SymbolSpec::Kind::Product: {
      double r = 1;
      std::vector<double> scaled(std::size_t(spec.k));
      for (const auto& row : spec.c) {
        for (int j = 0; j < spec.k; ++j) scaled[std::size_t(j)] = row[std::size_t(j)] * f[std::size_t(j) + 1];
        r *= commutator_symbol(f[0], scaled);
      }
      return r;
    }
    case SymbolSpec::Kind::Circular: {
      const double a[2] = {f[1], f[2]}, b[2] = {f[2], f[0]}, c[2] = {f[0], f[1]};
      return commutator_symbol(f[0], a) * commutator_symbol(f[1], b) * commutator_symbol(f[2], c);
    }
    case SymbolSpec::Kind::TaylorWeighted: return taylor_weighted_exact(spec.k, spec.d, f);
  }
  throw std::logic_error("unreachable");
}

McEstimate eval_symbol_mc(const SymbolSpec& spec, std::span<const double> f, std::size_t samples,
                          std::uint64_t seed) {
  check_freqs(spec, f);
  if (samples < 100) throw std::invalid_argument("eval_symbol_mc: need at least 100 samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int d = spec.d, k = spec.k;
  const double taylor_norm = spec.kind == SymbolSpec::Kind::TaylorWeighted ? std::pow(factorial(d), k) : 1;
  auto avg_sample = [&](double xi, auto coef) {  // one draw of sgn(ξ + Σ α_j coef(j))
    double arg = xi;
    for (int j = 0; j < k; ++j) arg += U(rng) * coef(j);
    return sgn(arg);
  };
  double sum = 0, sum2 = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    double v = 1;
    switch (spec.kind) {
      case SymbolSpec::Kind::Commutator: {
        double arg = f[0];
        for (int j = 0; j < d; ++j) arg += U(rng) * f[std::size_t(j) + 1];
        v = sgn(arg);
        break;
      }
      case SymbolSpec::Kind::TaylorWeighted: {
        double arg = f[0], w = 1;
        for (int j = 0; j < k; ++j) {
          const double a = U(rng);
          arg += a * f[std::size_t(j) + 1];
          w *= std::pow(1 - a, d);
        }
        v = sgn(arg) * w / taylor_norm;
        break;
      }
      case SymbolSpec::Kind::Power:
        // independent draws per factor keep the product unbiased
        for (int r = 0; r < d; ++r) v *= avg_sample(f[0], [&](int j) { return f[std::size_t(j) + 1]; });
        break;
      case SymbolSpec::Kind::Product:
        for (const auto& row : spec.c)
          v *= avg_sample(f[0], [&](int j) { return row[std::size_t(j)] * f[std::size_t(j) + 1]; });
        break;
      case SymbolSpec::Kind::Circular: {
        const double a1 = U(rng), a2 = U(rng), b1 = U(rng), b2 = U(rng), c1 = U(rng), c2 = U(rng);
        v = sgn(f[0] + a1 * f[1] + a2 * f[2]) * sgn(f[1] + b1 * f[2] + b2 * f[0]) *
            sgn(f[2] + c1 * f[0] + c2 * f[1]);
        break;
      }
    }
    sum += v;
    sum2 += v * v;
  }
  const double n = double(samples), mean = sum / n;
  const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1));
  return {mean, std::sqrt(var / n), samples};
}

namespace {

// Composite Gauss rule on [a, b] resolving `waves` oscillations plus a resolution floor.
GaussRule oscillation_rule(double a, double b, double waves, double floor_nodes) {
  const int panels = std::max({1, int(std::ceil(waves / 2)), int(std::ceil(floor_nodes / 16))});
  return composite_gauss(a, b, panels, 16);
}

}  // namespace

cplx fourier_coeff(const WindowPair& w, long n, long n1, int resolution) {
  if (resolution < 64) throw std::invalid_argument("fourier_coeff: resolution below 64² is rejected");
  if (w.phi.kind != Window::Kind::Phi || w.psi.kind != Window::Kind::Psi)
    throw std::invalid_argument("fourier_coeff: window kinds must be (Phi, Psi)");
  if (!w.phi.hat || !w.psi.hat || !(w.phi.lo < w.phi.hi) || !(w.psi.lo < w.psi.hi))
    throw std::invalid_argument("fourier_coeff: invalid window");
  const double plen = w.phi.hi - w.phi.lo, qlen = w.psi.hi - w.psi.lo;

  // Outer ξ₁ integral (smooth apart from ξ₁ = 0, where Ψ̂ vanishes).
  std::vector<double> ocuts{w.psi.lo, w.psi.hi};
  if (w.psi.lo < 0 && w.psi.hi > 0) ocuts.insert(ocuts.begin() + 1, 0.0);
  cplx total = 0;
  for (std::size_t p = 0; p + 1 < ocuts.size(); ++p) {
    const double a = ocuts[p], b = ocuts[p + 1];
    const GaussRule outer = oscillation_rule(a, b, std::abs(double(n1)) * (b - a), resolution * (b - a) / qlen);
    for (std::size_t q = 0; q < outer.x.size(); ++q) {
      const double xi1 = outer.x[q];
      const double psi = w.psi.hat(xi1);
      if (psi == 0 || xi1 == 0) continue;
      // Inner ξ̃ integral, split where m₁(·, ξ₁) has kinks.
      std::vector<double> cuts{w.phi.lo, w.phi.hi};
      for (double c : {0.0, -xi1})
        if (c > w.phi.lo && c < w.phi.hi) cuts.push_back(c);
      std::sort(cuts.begin(), cuts.end());
      cplx inner = 0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (hi <= lo) continue;
        const GaussRule r = oscillation_rule(lo, hi, std::abs(double(n)) * (hi - lo), resolution * (hi - lo) / plen);
        for (std::size_t j = 0; j < r.x.size(); ++j) {
          const double xt = r.x[j];
          const double ph = w.phi.hat(xt);
          if (ph == 0) continue;
          inner += r.w[j] * ph * m1_closed_form(xt, xi1) * std::polar(1.0, -2 * kPi * double(n) * xt);
        }
      }
      total += outer.w[q] * psi * inner * std::polar(1.0, -2 * kPi * double(n1) * xi1);
    }
  }
  return total;
}

std::string CoeffTable::to_csv() const {
  std::ostringstream o;
  o.precision(17);
  o << "n,n1,re,im,abs\n";
  for (const auto& [key, v] : values)
    o << key.first << ',' << key.second << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << '\n';
  return o.str();
}

CoeffTable build_coeff_table(const WindowPair& w, const std::vector<std::pair<long, long>>& indices,
                             int resolution, unsigned threads) {
  CoeffTable t{w, resolution, {}};
  std::vector<cplx> out(indices.size());
  parallel_for(indices.size(), threads,
               [&](std::size_t i) { out[i] = fourier_coeff(w, indices[i].first, indices[i].second, resolution); });
  for (std::size_t i = 0; i < indices.size(); ++i) t.values[indices[i]] = out[i];
  return t;
}

DecayFit fit_decay(const CoeffTable& t, DecayAxis axis, long lo, long hi, long fixed) {
  DecayFit fit;
  std::vector<double> x, y;
  for (long v = lo; v <= hi; ++v) {
    const auto key = axis == DecayAxis::N ? std::make_pair(v, fixed) : std::make_pair(fixed, v);
    auto it = t.values.find(key);
    if (it == t.values.end()) continue;
    const double a = std::abs(it->second);
    if (a == 0) {
      fit.excluded.push_back(v);
      continue;
    }
    x.push_back(std::log(2.0 + std::abs(double(v))));
    y.push_back(std::log(a));
  }
  if (x.size() < 6) throw std::invalid_argument("fit_decay: need at least 6 nonzero points along the axis");
  const LinearFit f = fit_line(x, y);
  fit.slope = f.slope;
  fit.intercept = f.intercept;
  fit.r2 = f.r2;
  fit.used = x.size();
  if (!fit.excluded.empty()) fit.note = std::to_string(fit.excluded.size()) + " zero coefficient(s) excluded";
  return fit;
}

}  // namespace calderon
