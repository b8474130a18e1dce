#include "calderon/lp_decomp.hpp"

#include <cmath>
#include <stdexcept>

namespace calderon {

namespace {

// Smooth step: 1 on (-∞, 0], 0 on [1, ∞), built from h(v) = exp(-1/v).
double smooth_step(double u) {
  if (u <= 0) return 1;
  if (u >= 1) return 0;
  const double a = std::exp(-1 / (1 - u)), b = std::exp(-1 / u);
  return a / (a + b);
}

double compact_phi_hat(double xi) { return smooth_step(2 * std::abs(xi) - 1); }

// Φ(x) = 2∫_0^1 Φ̂(ξ) cos(2πxξ) dξ: plateau part in closed form, transition by Gauss panels.
double compact_phi(double x) {
  const double plateau = x == 0 ? 1.0 : std::sin(kPi * x) / (kPi * x);
  const int panels = 64 + int(std::ceil(std::abs(x) / 4));
  const GaussRule r = composite_gauss(0.5, 1.0, panels, 16);
  double s = 0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * compact_phi_hat(r.x[i]) * std::cos(2 * kPi * x * r.x[i]);
  return plateau + 2 * s;
}

}  // namespace

double BumpFamily::phi(double x) const {
  return kind_ == FamilyKind::NonCompact ? std::exp(-kPi * x * x) : compact_phi(x);
}
double BumpFamily::phi_hat(double xi) const {
  return kind_ == FamilyKind::NonCompact ? std::exp(-kPi * xi * xi) : compact_phi_hat(xi);
}
double BumpFamily::psi_hat(double xi) const {
  if (kind_ == FamilyKind::NonCompact) {
    // e^{-πξ²} - e^{-4πξ²}, written to stay accurate near 0
    return -std::exp(-kPi * xi * xi) * std::expm1(-3 * kPi * xi * xi);
  }
  return compact_phi_hat(xi) - compact_phi_hat(2 * xi);
}
double BumpFamily::phi_k(int k, double x) const {
  const double s = std::ldexp(1.0, k);
  return s * phi(s * x);
}
double BumpFamily::psi_k(int k, double x) const {
  const double s = std::ldexp(1.0, k);
  return s * psi(s * x);
}
double BumpFamily::phi_hat_k(int k, double xi) const { return phi_hat(std::ldexp(xi, -k)); }
double BumpFamily::psi_hat_k(int k, double xi) const { return psi_hat(std::ldexp(xi, -k)); }

BumpFamily build_family(FamilyKind kind) { return BumpFamily(kind); }

TelescopeReport telescope_check(const BumpFamily& f, int k_min, int k_bar, const Domain& grid) {
  if (f.kind() != FamilyKind::NonCompact) throw std::invalid_argument("telescope_check: non-compact family only");
  if (k_bar < k_min) throw std::invalid_argument("telescope_check: empty scale range");
  TelescopeReport r;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double x = grid.x(m);
    double s = 0;
    for (int k = k_min; k <= k_bar; ++k) s += f.psi_k(k, x);
    r.max_error = std::max(r.max_error, std::abs(s - (f.phi_k(k_bar, x) - f.phi_k(k_min - 1, x))));
  }
  r.truncation_sup = f.phi_k(k_min - 1, 0.0);
  return r;
}

double partition_of_unity_residual(const BumpFamily& f, int k_min, int k_max, double xi_lo, double xi_hi,
                                   std::size_t samples) {
  if (!(xi_lo > 0) || !(xi_hi > xi_lo) || samples < 2) throw std::invalid_argument("partition_of_unity_residual: bad window");
  double worst = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    // geometric sampling of the window, both signs
    const double xi = xi_lo * std::pow(xi_hi / xi_lo, double(i) / double(samples - 1));
    for (double s : {xi, -xi}) {
      double acc = 0;
      for (int k = k_min; k <= k_max; ++k) acc += f.psi_hat_k(k, s);
      worst = std::max(worst, std::abs(acc - 1));
    }
  }
  return worst;
}

double psi_factor(const BumpFamily& f, double xi) {
  if (f.kind() != FamilyKind::NonCompact) throw std::invalid_argument("psi_factor: non-compact family only");
  const double q = kPi * xi * xi;
  if (q == 0) return 3 * kPi;
  return -std::exp(-q) * std::expm1(-3 * q) / (xi * xi);
}

void ParaproductSpec::validate() const {
  if (slots.size() < 3) throw std::invalid_argument("ParaproductSpec: need arity d+2 ≥ 3");
  if (!kinds.empty() && kinds.size() != slots.size()) throw std::invalid_argument("ParaproductSpec: kinds/slots size mismatch");
  int psi = 0;
  for (auto s : slots) psi += s == SlotType::Psi;
  if (psi < 2) throw std::invalid_argument("ParaproductSpec: at least two slots must be of Ψ type");
  if (k_max < k_min) throw std::invalid_argument("ParaproductSpec: empty scale range");
}

GridFunction paraproduct_apply(const ParaproductSpec& spec, const std::vector<GridFunction>& inputs) {
  spec.validate();
  if (inputs.size() + 1 != spec.slots.size()) throw std::invalid_argument("paraproduct_apply: expected d+1 inputs");
  const Domain d = inputs.front().domain;
  for (const auto& g : inputs)
    if (!(g.domain == d)) throw std::invalid_argument("paraproduct_apply: inputs on different domains");
  const double nyquist = double(d.size()) / (2 * d.length());
  if (std::ldexp(1.0, spec.k_max) > nyquist) throw std::invalid_argument("paraproduct_apply: 2^k_max beyond the grid Nyquist frequency");

  auto family = [&](std::size_t j) {
    return BumpFamily(spec.kinds.empty() ? FamilyKind::NonCompact : spec.kinds[j]);
  };
  auto window = [&](std::size_t j, int k, double xi) {
    BumpFamily f = family(j);
    return spec.slots[j] == SlotType::Phi ? f.phi_hat_k(k, xi) : f.psi_hat_k(k, xi);
  };
  std::vector<Spectrum> spectra;
  for (const auto& g : inputs) spectra.push_back(forward_transform(g));
  Spectrum out(d);
  for (int k = spec.k_min; k <= spec.k_max; ++k) {
    GridFunction prod = GridFunction::sample(d, [](double) { return 1.0; });
    for (std::size_t j = 0; j < inputs.size(); ++j) {
      Spectrum s = spectra[j];
      for (std::size_t q = 0; q < s.coeffs.size(); ++q) s.coeffs[q] *= window(j, k, s.frequency(q));
      const GridFunction piece = inverse_transform(s);
      for (std::size_t m = 0; m < prod.size(); ++m) prod[m] *= piece[m];
    }
    Spectrum ps = forward_transform(prod);
    const std::size_t last = spec.slots.size() - 1;
    for (std::size_t q = 0; q < ps.coeffs.size(); ++q) out.coeffs[q] += ps.coeffs[q] * window(last, k, ps.frequency(q));
  }
  return inverse_transform(out);
}

WhitneySplit::WhitneySplit(BumpFamily f, int r_min, int r_max) : f_(f), r_min_(r_min), r_max_(r_max) {
  if (f.kind() != FamilyKind::Compact) throw std::invalid_argument("whitney_split: compact family only");
  if (r_max < r_min) throw std::invalid_argument("whitney_split: empty r-range");
}

std::array<double, 3> WhitneySplit::branches(double xt, double x1) const {
  std::array<double, 3> b{0, 0, 0};
  for (int r = r_min_; r <= r_max_; ++r) {
    const double pt = f_.psi_hat_k(r, xt), p1 = f_.psi_hat_k(r, x1);
    b[0] += f_.phi_hat_k(r - 1, xt) * p1;
    b[1] += pt * p1;
    b[2] += pt * f_.phi_hat_k(r - 1, x1);
  }
  return b;
}

double WhitneySplit::total(double xt, double x1) const {
  auto b = branches(xt, x1);
  return b[0] + b[1] + b[2];
}

WhitneySplit whitney_split(const BumpFamily& f, int r_min, int r_max) { return WhitneySplit(f, r_min, r_max); }

DecompositionCheck decomposition_check(const BumpFamily& f, std::span<const double> xs, int k_min, int k_max) {
  if (xs.empty() || k_max < k_min) throw std::invalid_argument("decomposition_check: bad arguments");
  auto phit = [&](int k, double xi) { return f.phi_hat_k(k, xi) - f.phi_hat_k(k_min - 1, xi); };
  DecompositionCheck c;
  for (int k = k_min; k <= k_max; ++k) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double t = f.psi_hat_k(k, xs[i]);
      for (std::size_t j = 0; j < i; ++j) t *= phit(k - 1, xs[j]);
      for (std::size_t j = i + 1; j < xs.size(); ++j) t *= phit(k, xs[j]);
      c.sum += t;
    }
  }
  c.target = 1;
  for (double x : xs) c.target *= phit(k_max, x);
  return c;
}

WindowPair standard_window_pair() {
  BumpFamily f(FamilyKind::Compact);
  WindowPair w;
  w.phi = {Window::Kind::Phi, [f](double x) { return f.phi_hat(x); }, -1.0, 1.0};
  w.psi = {Window::Kind::Psi, [f](double x) { return f.psi_hat(x); }, -1.0, 1.0};
  w.label = "compact-scale-0";
  return w;
}

}  // namespace calderon
