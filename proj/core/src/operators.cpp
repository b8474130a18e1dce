#include "calderon/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace calderon {
namespace {

struct PairRule {
  std::size_t J = 0;
  double dx = 0;
  std::vector<double> c;  // c[j], j = 1..J
};

double resolve_radius(const Domain& d, double R) { return R > 0 ? R : default_radius(d); }

PairRule pair_rule(const Domain& d, double R) {
  PairRule r;
  r.J = pv_node_count(d, resolve_radius(d, R));
  r.dx = d.dx();
  r.c = pv_pair_weights(r.dx, r.J);
  return r;
}

constexpr std::size_t kBlock = 64;

// out[m] = Σ_j c_j (term(m, j) + term(m, -j)) for m in [lo, hi).
template <class Term>
GridFunction pair_sum(const Domain& d, const PairRule& r, Term&& term, std::size_t lo = 0,
                      std::size_t hi = std::size_t(-1)) {
  hi = std::min(hi, d.size());
  GridFunction out(d);
  if (lo >= hi) return out;
  const std::size_t blocks = (hi - lo + kBlock - 1) / kBlock;
  parallel_for(blocks, 0, [&](std::size_t b) {
    const std::size_t m0 = lo + b * kBlock, m1 = std::min(hi, m0 + kBlock);
    for (std::size_t m = m0; m < m1; ++m) {
      cplx acc = 0;
      for (std::size_t j = 1; j <= r.J; ++j) acc += r.c[j] * (term(m, long(j)) + term(m, -long(j)));
      out[m] = acc;
    }
  });
  return out;
}

// Profile values at x_0 + i·dx for i ∈ [-ext, n + ext).
struct Table {
  long off = 0;
  std::vector<double> v;
  double operator()(long i) const { return v[std::size_t(i + off)]; }
};

Table tabulate(const LipschitzProfile& A, const Domain& d, long ext, int order = 0) {
  Table t;
  t.off = ext;
  t.v.resize(d.size() + 2 * std::size_t(ext));
  for (long i = -ext; i < long(d.size()) + ext; ++i)
    t.v[std::size_t(i + ext)] = A.derivative(order, d.x(0) + double(i) * d.dx());
  return t;
}

void check_same_domain(const GridFunction& a, const GridFunction& b) {
  if (!(a.domain == b.domain)) throw std::invalid_argument("inputs live on different domains");
}

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

cplx horner(const PowerSeries& F, double z) {
  double acc = 0;
  for (auto it = F.coeffs.rbegin(); it != F.coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

// 8-point Lagrange interpolation of periodic samples at fractional index p.
cplx interpolate(const GridFunction& g, double p) {
  const double r = std::round(p);
  if (std::abs(p - r) < 1e-12) return g.wrap(long(r));
  const long base = long(std::floor(p)) - 3;
  cplx acc = 0;
  for (int a = 0; a < 8; ++a) {
    double w = 1;
    for (int b = 0; b < 8; ++b)
      if (b != a) w *= (p - double(base + b)) / double(a - b);
    acc += w * g.wrap(base + a);
  }
  return acc;
}

// Kernels 1/t and 1/t², or their sums over all periods.
double kernel1(double t, double L, KernelMode mode) {
  return mode == KernelMode::Periodic ? (kPi / L) / std::tan(kPi * t / L) : 1.0 / t;
}
double kernel2(double t, double L, KernelMode mode) {
  if (mode == KernelMode::Truncated) return 1.0 / (t * t);
  const double s = std::sin(kPi * t / L);
  return (kPi / L) * (kPi / L) / (s * s);
}

}  // namespace

double default_radius(const Domain& d) { return 0.25 * d.length(); }

GridFunction apply_hilbert(const GridFunction& f, double R) {
  return pv_convolve(f, [](double y) { return cplx(1.0 / y); }, resolve_radius(f.domain, R));
}

GridFunction apply_hilbert_spectral(const GridFunction& f) {
  return apply_multiplier(f, [](double xi) { return cplx(0, -kPi * sgn(xi)); });
}

GridFunction apply_cauchy(const LipschitzProfile& A, const GridFunction& f, double R) {
  const Domain& d = f.domain;
  const PairRule r = pair_rule(d, R);
  const Table a = tabulate(A, d, long(r.J));
  const cplx I(0, 1);
  return pair_sum(d, r, [&](std::size_t m, long j) {
    const double t = double(j) * r.dx;
    return f.wrap(long(m) - j) / (t + I * (a(long(m)) - a(long(m) - j)));
  });
}

GridFunction apply_commutator_kernel(int d, const LipschitzProfile& A, const GridFunction& f, double R) {
  if (d < 0) throw std::invalid_argument("commutator degree must be ≥ 0");
  std::vector<const LipschitzProfile*> ps(std::size_t(d), &A);
  return apply_commutator_kernel(ps, f, R);
}

GridFunction apply_commutator_kernel(std::span<const LipschitzProfile* const> profiles, const GridFunction& f,
                                     double R) {
  const Domain& dom = f.domain;
  const PairRule r = pair_rule(dom, R);
  std::vector<Table> tabs;
  for (const auto* p : profiles) tabs.push_back(tabulate(*p, dom, long(r.J)));
  return pair_sum(dom, r, [&](std::size_t m, long j) {
    const double t = double(j) * r.dx;
    cplx v = f.wrap(long(m) - j) / t;
    for (const auto& a : tabs) v *= (a(long(m)) - a(long(m) - j)) / t;
    return v;
  });
}

GridFunction apply_commutator_multiplier(const SymbolFn& symbol, const GridFunction& f,
                                         const std::vector<GridFunction>& gs) {
  const Domain& dom = f.domain;
  for (const auto& g : gs) check_same_domain(f, g);
  const std::size_t n = dom.size(), d = gs.size();
  if (std::pow(double(n), double(d + 1)) > kMultiplierBudget)
    throw std::invalid_argument("multiplier route: n^(d+1) = " + std::to_string(std::pow(double(n), double(d + 1))) +
                                " frequency tuples exceeds the budget; use the kernel form");
  const double L = dom.length();
  std::vector<Spectrum> spec;
  spec.push_back(forward_transform(f));
  for (const auto& g : gs) spec.push_back(forward_transform(g));

  // Outer index runs over the f frequency; each worker fills a private output spectrum.
  const unsigned threads = worker_count();
  std::vector<std::vector<cplx>> partial(threads, std::vector<cplx>(n, 0.0));
  const long half = long(n / 2);
  const std::size_t chunk = (n + threads - 1) / threads;
  parallel_for(threads, threads, [&](std::size_t w) {
    std::vector<double> freqs(d + 1);
    std::vector<std::size_t> k(d + 1, 0);
    auto& out = partial[w];
    for (std::size_t k0 = w * chunk; k0 < std::min(n, (w + 1) * chunk); ++k0) {
      const cplx f0 = spec[0].coeffs[k0];
      if (f0 == cplx(0)) continue;
      freqs[0] = spec[0].frequency(k0);
      // Odometer over the d remaining frequency slots.
      std::fill(k.begin() + 1, k.end(), 0);
      while (true) {
        cplx prod = f0;
        long eta = dom.freq_index(k0);
        for (std::size_t j = 1; j <= d; ++j) {
          prod *= spec[j].coeffs[k[j]];
          freqs[j] = spec[j].frequency(k[j]);
          eta += dom.freq_index(k[j]);
        }
        if (prod != cplx(0)) {
          const long folded = ((eta + half) % long(n) + long(n)) % long(n);
          out[std::size_t(folded)] += symbol(freqs) * prod;
        }
        std::size_t p = 1;
        while (p <= d && ++k[p] == n) k[p++] = 0;
        if (p > d) break;
      }
    }
  });
  Spectrum res(dom);
  const double scale = std::pow(L, -double(d));
  for (const auto& part : partial)
    for (std::size_t k = 0; k < n; ++k) res.coeffs[k] += scale * part[k];
  return inverse_transform(res);
}

GridFunction apply_commutator_multiplier(const SymbolSpec& symbol, const GridFunction& f,
                                         const std::vector<GridFunction>& gs, cplx prefactor) {
  if (symbol.arity() != gs.size() + 1)
    throw std::invalid_argument("symbol " + symbol.name() + " takes " + std::to_string(symbol.arity()) +
                                " frequencies, got " + std::to_string(gs.size() + 1));
  return apply_commutator_multiplier(
      [&](std::span<const double> xs) { return prefactor * eval_symbol_exact(symbol, xs); }, f, gs);
}

GridFunction apply_multilinear_kernel(const GridFunction& f, const std::vector<GridFunction>& gs, double R) {
  const Domain& dom = f.domain;
  for (const auto& g : gs) check_same_domain(f, g);
  const PairRule r = pair_rule(dom, R);
  std::vector<Antiderivative> G;
  for (const auto& g : gs) G.push_back(antiderivative(g));
  return pair_sum(dom, r, [&](std::size_t m, long j) {
    const double t = double(j) * r.dx;
    cplx v = f.wrap(long(m) - j) / t;
    for (const auto& a : G) v *= a.diff(m, j) / t;
    return v;
  });
}

GridFunction apply_adjoint(int i, const std::vector<GridFunction>& inputs, const GridFunction& test, double R) {
  if (inputs.empty()) throw std::invalid_argument("form needs at least the f slot");
  const int d = int(inputs.size()) - 1;
  if (i < 1 || i > d + 2)
    throw std::invalid_argument("slot " + std::to_string(i) + " out of range 1.." + std::to_string(d + 2));
  for (const auto& g : inputs) check_same_domain(test, g);
  const std::vector<GridFunction> gs(inputs.begin() + 1, inputs.end());
  if (i == d + 2) return apply_multilinear_kernel(inputs[0], gs, R);

  const Domain& dom = test.domain;
  const std::size_t n = dom.size();
  const PairRule r = pair_rule(dom, R);
  std::vector<Antiderivative> G;
  for (const auto& g : gs) G.push_back(antiderivative(g));
  auto wrap = [n](long m) { return std::size_t(((m % long(n)) + long(n)) % long(n)); };

  if (i == 1) {
    // Terms of the form with y = x_ℓ: m = ℓ + j.
    return pair_sum(dom, r, [&](std::size_t l, long j) {
      const std::size_t m = wrap(long(l) + j);
      const double t = double(j) * r.dx;
      cplx v = test[m] / t;
      for (const auto& a : G) v *= a.diff(m, j) / t;
      return v;
    });
  }

  // Slot of g_k: the form is linear in the antiderivative differences Δ_k(m, j).
  const std::size_t k = std::size_t(i - 2);
  const auto& f = inputs[0];
  auto H = [&](std::size_t m, long j) {
    const double t = double(j) * r.dx;
    cplx v = test[m] * f.wrap(long(m) - j) / (t * t);
    for (std::size_t q = 0; q < G.size(); ++q)
      if (q != k) v *= G[q].diff(m, j) / t;
    return v;
  };
  GridFunction a = pair_sum(dom, r, H);
  GridFunction b = pair_sum(dom, r, [&](std::size_t l, long j) { return H(wrap(long(l) + j), j); });
  GridFunction s = pair_sum(dom, r, [&](std::size_t m, long j) { return H(m, j) * (double(j) * r.dx); });
  cplx stot = 0;
  for (const auto& v : s.values) stot += v;
  GridFunction out = antiderivative_transpose(a) - antiderivative_transpose(b);
  const cplx shift = stot * dom.dx() / dom.length();
  for (auto& v : out.values) v += shift;
  return out;
}

FormPair form_and_adjoints(int i, const std::vector<GridFunction>& inputs, const GridFunction& test, double R) {
  FormPair p;
  const int d = int(inputs.size()) - 1;
  const std::vector<GridFunction> gs(inputs.begin() + 1, inputs.end());
  p.via_output = integrate_product(apply_multilinear_kernel(inputs[0], gs, R), test);
  const GridFunction adj = apply_adjoint(i, inputs, test, R);
  p.via_slot = integrate_product(adj, i == d + 2 ? test : inputs[std::size_t(i - 1)]);
  return p;
}

GridFunction apply_bht(double alpha, const GridFunction& f, const GridFunction& g, double R) {
  check_same_domain(f, g);
  if (!std::isfinite(alpha)) throw std::invalid_argument("bht: alpha must be finite");
  const Domain& dom = f.domain;
  const PairRule r = pair_rule(dom, R);
  return pair_sum(dom, r, [&](std::size_t m, long j) {
    const double t = double(j) * r.dx;
    return f.wrap(long(m) + j) * interpolate(g, double(m) + alpha * double(j)) / t;
  });
}

GridFunction apply_taylor_remainder(int d, const LipschitzProfile& A, const GridFunction& f, double R) {
  if (d < 1 || d > LipschitzProfile::kMaxOrder)
    throw std::invalid_argument("taylor remainder: degree must be in 1..4");
  const Domain& dom = f.domain;
  const PairRule r = pair_rule(dom, R);
  std::vector<Table> tabs;
  for (int k = 0; k < d; ++k) tabs.push_back(tabulate(A, dom, long(r.J), k));
  const GaussRule& gl = gauss_legendre(16);
  const double inv_fact = 1.0 / factorial(d - 1);
  constexpr long kNear = 8;
  return pair_sum(dom, r, [&](std::size_t m, long j) {
    const double t = double(j) * r.dx;
    const long y = long(m) - j;
    double q;
    if (d > 1 && std::abs(j) <= kNear) {
      // (1/(d-1)!) ∫_0^1 A^(d)(x - αt) α^(d-1) dα
      const double x = dom.x(m);
      q = 0;
      for (std::size_t p = 0; p < gl.x.size(); ++p) {
        const double al = 0.5 * (gl.x[p] + 1);
        q += 0.5 * gl.w[p] * A.derivative(d, x - al * t) * std::pow(al, d - 1);
      }
      q *= inv_fact;
    } else {
      double taylor = 0, tk = 1;
      for (int k = 0; k < d; ++k) {
        taylor += tabs[std::size_t(k)](y) * tk / factorial(k);
        tk *= t;
      }
      q = (tabs[0](long(m)) - taylor) / std::pow(t, d);
    }
    return q * f.wrap(y) / t;
  });
}

GridFunction apply_finite_difference_op(const FiniteDifferenceSpec& spec, const GridFunction& f, double R) {
  const Domain& dom = f.domain;
  const double L = dom.length();
  if (spec.kernels != 1 && spec.kernels != 2) throw std::invalid_argument("finite-difference op: kernels must be 1 or 2");
  for (const auto& fac : spec.factors) {
    if (fac.shifts.size() != std::size_t(spec.kernels))
      throw std::invalid_argument("finite-difference op: each factor needs one shift per kernel variable");
    double bound = fac.A.derivative_bound(spec.kernels);
    for (double c : fac.shifts) {
      if (c == 0 || !std::isfinite(c)) throw std::invalid_argument("finite-difference op: shifts must be nonzero");
      bound *= std::abs(c);
    }
    if (fac.F.coeffs.empty()) throw std::invalid_argument("finite-difference op: empty power series");
    if (!(bound < fac.F.radius))
      throw std::invalid_argument("finite-difference op: difference quotients may leave the power-series disc");
  }
  const bool periodic = spec.mode == KernelMode::Periodic;
  if (periodic) {
    if (R > 0 && std::abs(R - 0.5 * L) > 1e-12 * L)
      throw std::invalid_argument("periodic kernels integrate over a full period (R = L/2)");
    R = 0.5 * L;
    if (spec.factors.size() > 1 || (spec.factors.size() == 1 && spec.factors[0].F.coeffs.size() > 2))
      throw std::invalid_argument("periodic mode supports at most one factor with F of degree ≤ 1");
    for (const auto& fac : spec.factors)
      for (double c : fac.shifts)
        if (!is_integer(c)) throw std::invalid_argument("periodic mode needs integer shifts");
  }
  const PairRule r = pair_rule(dom, R);

  // Numerator of the difference quotient (without the 1/(t s) normalization).
  auto numer = [&](const FiniteDifferenceFactor& fac, double x, double t, double s) {
    const auto& A = fac.A;
    if (spec.kernels == 1) return A.eval(x + fac.shifts[0] * t) - A.eval(x);
    const double a = fac.shifts[0] * t, b = fac.shifts[1] * s;
    return A.eval(x + a + b) - A.eval(x + a) - A.eval(x + b) + A.eval(x);
  };

  auto integrand = [&](std::size_t m, long jt, long js) -> cplx {
    const double t = double(jt) * r.dx, s = double(js) * r.dx, x = dom.x(m);
    const cplx fv = f.wrap(long(m) + jt + js);
    if (periodic) {
      const double k1 = kernel1(t, L, spec.mode) * (spec.kernels == 2 ? kernel1(s, L, spec.mode) : 1.0);
      if (spec.factors.empty()) return fv * k1;
      const auto& fac = spec.factors[0];
      const double c0 = fac.F.coeffs[0], c1 = fac.F.coeffs.size() > 1 ? fac.F.coeffs[1] : 0.0;
      const double k2 = kernel2(t, L, spec.mode) * (spec.kernels == 2 ? kernel2(s, L, spec.mode) : 1.0);
      return fv * (c0 * k1 + c1 * numer(fac, x, t, s) * k2);
    }
    const double norm = spec.kernels == 2 ? t * s : t;
    cplx v = fv / norm;
    for (const auto& fac : spec.factors) v *= horner(fac.F, numer(fac, x, t, s) / norm);
    return v;
  };

  if (spec.kernels == 1) return pair_sum(dom, r, [&](std::size_t m, long j) { return integrand(m, j, 0); });
  return pair_sum(dom, r, [&](std::size_t m, long jt) {
    cplx acc = 0;
    for (std::size_t k = 1; k <= r.J; ++k) acc += r.c[k] * (integrand(m, jt, long(k)) + integrand(m, jt, -long(k)));
    return acc;
  });
}

GridFunction apply_circular(double a, double b, double c, const LipschitzProfile& A, const LipschitzProfile& B,
                            const LipschitzProfile& C, const Domain& dom, KernelMode mode, double R) {
  const double L = dom.length();
  for (double v : {a, b, c})
    if (v == 0 || !std::isfinite(v)) throw std::invalid_argument("circular: shifts a, b, c must be nonzero");
  const bool integral = is_integer(a) && is_integer(b) && is_integer(c);
  if (mode == KernelMode::Periodic) {
    if (!integral) throw std::invalid_argument("circular: periodic mode needs integer a, b, c");
    if (R > 0 && std::abs(R - 0.5 * L) > 1e-12 * L)
      throw std::invalid_argument("periodic kernels integrate over a full period (R = L/2)");
    R = 0.5 * L;
  }
  const PairRule r = pair_rule(dom, R);
  const long J = long(r.J);
  const long ia = std::lround(a), ib = std::lround(b), ic = std::lround(c);

  // Profile lookup at x_m + (p·t_{j} + q·t_{k}) with integer multipliers, or closed form otherwise.
  struct Lookup {
    const LipschitzProfile* P;
    Table tab;
    bool use_tab;
  };
  auto make = [&](const LipschitzProfile& P, long mult) {
    Lookup l{&P, {}, integral};
    if (integral) l.tab = tabulate(P, dom, (std::abs(mult) + 1) * J + 1);
    return l;
  };
  const Lookup LA = make(A, ia), LB = make(B, ib), LC = make(C, ic);
  auto val = [&](const Lookup& l, std::size_t m, long j1, double mult, long j2) {
    if (l.use_tab) return l.tab(long(m) + j1 + std::lround(mult) * j2);
    return l.P->eval(dom.x(m) + (double(j1) + mult * double(j2)) * r.dx);
  };

  std::vector<double> K(std::size_t(2 * J + 1));
  for (long j = -J; j <= J; ++j)
    if (j != 0) K[std::size_t(j + J)] = kernel2(double(j) * r.dx, L, mode);
  auto w = [&](long j) { return r.c[std::size_t(std::abs(j))] * K[std::size_t(j + J)]; };

  GridFunction out(dom);
  parallel_for(dom.size(), 0, [&](std::size_t m) {
    double acc = 0;
    for (long j1 = -J; j1 <= J; ++j1) {
      if (j1 == 0) continue;
      const double w1 = w(j1), c1 = val(LC, m, j1, 0, 0);
      for (long j2 = -J; j2 <= J; ++j2) {
        if (j2 == 0) continue;
        const double dA = val(LA, m, j2, a, j1) - val(LA, m, j2, 0, 0);
        const double w12 = w1 * w(j2) * dA;
        double inner = 0;
        for (long j3 = -J; j3 <= J; ++j3) {
          if (j3 == 0) continue;
          const double dB = val(LB, m, j3, b, j2) - val(LB, m, j3, 0, 0);
          const double dC = val(LC, m, j1, c, j3) - c1;
          inner += w(j3) * dB * dC;
        }
        acc += w12 * inner;
      }
    }
    out[m] = acc;
  });
  return out;
}

cplx circular_operator_symbol(double a, double b, double c, double xi1, double xi2, double xi3) {
  const cplx ipi(0, kPi);
  auto m1 = [](double xi, double eta) { return eta == 0 ? sgn(xi) : m1_closed_form(xi, eta); };
  return ipi * ipi * ipi * (a * b * c) * m1(xi3, a * xi1) * m1(xi1, b * xi2) * m1(xi2, c * xi3);
}

const std::vector<std::string>& identity_tags() {
  static const std::vector<std::string> tags{"calc1", "calc2", "t1_c1", "t1_c2", "t1_T1A"};
  return tags;
}

namespace {

// ∫_{|t|>R} dt / (t² (t-c)²) for |c| < R.
double far_kernel(double c, double R) {
  if (std::abs(c) < 0.1 * R) {
    double acc = 0, ck = 1;
    for (int k = 0; k <= 40; k += 2) {
      acc += (k + 1) * ck * 2.0 / ((k + 3) * std::pow(R, k + 3));
      ck *= c * c;
    }
    return acc;
  }
  return (2.0 / R + 1.0 / (R - c) + 1.0 / (R + c)) / (c * c) - 2.0 / (c * c * c) * std::log((R + c) / (R - c));
}

}  // namespace

IdentityResidual identity_residuals(const std::string& which, const LipschitzProfile& A, const LipschitzProfile& B,
                                    const LipschitzProfile& f, const Domain& dom, double R) {
  const auto& tags = identity_tags();
  if (std::find(tags.begin(), tags.end(), which) == tags.end())
    throw std::invalid_argument("unknown identity '" + which + "'");
  const double L = dom.length();
  R = resolve_radius(dom, R);
  if (R > 0.25 * L * (1 + 1e-12)) throw std::invalid_argument("identity residuals need R ≤ L/4");
  const double interior = 0.125 * L;
  auto require_support = [&](const LipschitzProfile& p, const char* name, double limit) {
    if (!(p.support_radius() <= limit))
      throw std::invalid_argument(std::string("identity ") + which + ": profile " + name +
                                  " must be supported in |x| ≤ " + std::to_string(limit));
  };
  const bool uses_f = which == "calc1" || which == "calc2";
  require_support(A, "A", which == "t1_T1A" ? 0.5 * R - 8 * dom.dx() : interior);
  if (which == "t1_c2") require_support(B, "B", interior);
  if (uses_f) require_support(f, "f", interior);

  const PairRule r = pair_rule(dom, R);
  const std::size_t n = dom.size();
  std::size_t lo = n, hi = 0;
  for (std::size_t m = 0; m < n; ++m)
    if (std::abs(dom.x(m)) <= interior) {
      lo = std::min(lo, m);
      hi = std::max(hi, m + 1);
    }

  const GridFunction As = sample(A, dom), A1 = sample(A, dom, 1), A2 = sample(A, dom, 2);
  GridFunction lhs(dom), rhs(dom);
  auto Q_R = [&](const GridFunction& g, std::size_t a, std::size_t b) {
    return pair_sum(
        dom, r, [&](std::size_t m, long j) {
          const double t = double(j) * r.dx;
          return (g.wrap(long(m) + j) - g[m]) / (t * t);
        },
        a, b);
  };

  if (uses_f) {
    const int order = which == "calc1" ? 1 : 2;
    const GridFunction fs = sample(f, dom), fd = sample(f, dom, order);
    lhs = apply_hilbert(pointwise_product(As, fd), R) - pointwise_product(As, apply_hilbert(fd, R));
    if (order == 1) {
      rhs = apply_commutator_kernel(1, A, fs, R) - apply_hilbert(pointwise_product(A1, fs), R);
    } else {
      rhs = apply_hilbert(pointwise_product(A2, fs), R) - 2.0 * apply_taylor_remainder(2, A, fs, R);
    }
  } else if (which == "t1_c1") {
    // p.v.∫ (A(x+t)-A(x))/t² dt over the line, against p.v.∫ A'(x+t) dt/t.
    lhs = Q_R(As, lo, hi);
    for (std::size_t m = lo; m < hi; ++m) lhs[m] -= 2.0 * As[m] / R;
    rhs = pair_sum(
        dom, r, [&](std::size_t m, long j) { return A1.wrap(long(m) + j) / (double(j) * r.dx); }, lo, hi);
  } else if (which == "t1_c2") {
    const GridFunction Bs = sample(B, dom), B1 = sample(B, dom, 1);
    lhs = pair_sum(
        dom, r,
        [&](std::size_t m, long j) {
          const double t = double(j) * r.dx;
          return (As.wrap(long(m) + j) - As[m]) * (Bs.wrap(long(m) + j) - Bs[m]) / (t * t * t);
        },
        lo, hi);
    rhs = pair_sum(
        dom, r,
        [&](std::size_t m, long j) {
          const double t = double(j) * r.dx;
          return 0.5 *
                 (A1.wrap(long(m) + j) * (Bs.wrap(long(m) + j) - Bs[m]) +
                  B1.wrap(long(m) + j) * (As.wrap(long(m) + j) - As[m])) /
                 (t * t);
        },
        lo, hi);
  } else {
    // T f = p.v.∬ Δ_t Δ_s A(x) dt ds/(t² s²) = Q[Q[A]] with Q g(y) = p.v.∫ (g(y+s)-g(y)) ds/s².
    const double near = 0.5 * R;
    GridFunction q = Q_R(As, 0, n);
    for (std::size_t m = 0; m < n; ++m) {
      const double y = dom.x(m);
      if (std::abs(y) <= near) {
        q[m] -= 2.0 * As[m] / R;
      } else {
        cplx acc = 0;
        for (std::size_t u = 0; u < n; ++u) {
          const double du = dom.x(u) - y;
          if (std::abs(dom.x(u)) <= A.support_radius()) acc += As[u] / (du * du);
        }
        q[m] = acc * dom.dx();
      }
    }
    lhs = Q_R(q, lo, hi);
    for (std::size_t m = lo; m < hi; ++m) {
      cplx far = 0;
      for (std::size_t u = 0; u < n; ++u)
        if (std::abs(dom.x(u)) <= A.support_radius()) far += As[u] * far_kernel(dom.x(u) - dom.x(m), R);
      lhs[m] += far * dom.dx() - 2.0 * q[m] / R;
    }
    rhs = -kPi * kPi * A2;
  }

  IdentityResidual res{which, GridFunction(dom), GridFunction(dom), GridFunction(dom)};
  double l2 = 0;
  for (std::size_t m = lo; m < hi; ++m) {
    res.lhs[m] = lhs[m];
    res.rhs[m] = rhs[m];
    res.residual[m] = lhs[m] - rhs[m];
    const double e = std::abs(res.residual[m]);
    res.sup = std::isfinite(e) ? std::max(res.sup, e) : std::numeric_limits<double>::infinity();
    l2 += std::norm(res.residual[m]) * dom.dx();
  }
  res.l2 = std::sqrt(l2);
  return res;
}

}  // namespace calderon
