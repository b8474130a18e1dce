#include "calderon/dyadic_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace calderon {
namespace {

// ∫ g² du = 1 for g_Φ = c e^{-πu²} and g_Ψ = c (1 - 2πu²) e^{-πu²}.
const double kPhiNorm = std::pow(2.0, 0.25);
const double kPsiNorm = std::sqrt(4.0 * std::sqrt(2.0) / 3.0);

std::string type_name(BumpType t) { return t == BumpType::Phi ? "phi" : "psi"; }
BumpType type_from(const std::string& s) {
  if (s == "phi") return BumpType::Phi;
  if (s == "psi") return BumpType::Psi;
  throw std::invalid_argument("bump type must be phi or psi, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Visits grid indices i (unwrapped) with x_0 + i·dx inside [c - r, c + r].
template <class Body>
void for_window(const Domain& d, double c, double r, Body&& body) {
  const double x0 = d.x(0), dx = d.dx();
  const long lo = long(std::ceil((c - r - x0) / dx)), hi = long(std::floor((c + r - x0) / dx));
  for (long i = lo; i <= hi; ++i) body(i, x0 + double(i) * dx);
}

void check_resolution(const ModelOperatorSpec& spec, const Domain& d) {
  if (std::ldexp(1.0, -spec.k_max) < 16 * d.dx() * (1 - 1e-12))
    throw std::invalid_argument("model operator: smallest interval spans fewer than 16 grid cells");
}

}  // namespace

double DyadicInterval::length() const { return std::ldexp(1.0, -k); }

double AdaptedBump::derivative(int order, double x) const {
  if (order < 0 || order > 2) throw std::invalid_argument("adapted bump: derivative order must be 0..2");
  if (!(p >= 1)) throw std::invalid_argument("adapted bump: p must be in [1, ∞]");
  const double len = base.length();
  const double u = (x - support_interval().center()) / len;
  const double e = std::exp(-kPi * u * u), pi = kPi, u2 = u * u;
  double g;
  if (type == BumpType::Phi) {
    const double polys[3] = {1.0, -2 * pi * u, 4 * pi * pi * u2 - 2 * pi};
    g = kPhiNorm * polys[order] * e;
  } else {
    const double polys[3] = {1 - 2 * pi * u2, -6 * pi * u + 4 * pi * pi * u2 * u,
                             -6 * pi + 24 * pi * pi * u2 - 8 * pi * pi * pi * u2 * u2};
    g = kPsiNorm * polys[order] * e;
  }
  const double norm = std::isinf(p) ? 1.0 : std::pow(len, -1.0 / p);
  return norm * g * std::pow(len, -order);
}

void ModelOperatorSpec::validate() const {
  if (l < 1) throw std::invalid_argument("model operator: arity l must be ≥ 1");
  if (shifts.size() != std::size_t(l)) throw std::invalid_argument("model operator: need one shift per input slot");
  if (types.size() != std::size_t(l + 1)) throw std::invalid_argument("model operator: need l + 1 slot types");
  if (std::count(types.begin(), types.end(), BumpType::Psi) < 2)
    throw std::invalid_argument("model operator: at least two slots must be of Ψ type");
  if (k_min > k_max) throw std::invalid_argument("model operator: empty scale range");
  if (!(x_lo < x_hi)) throw std::invalid_argument("model operator: empty position range");
}

std::vector<DyadicInterval> ModelOperatorSpec::family() const {
  std::vector<DyadicInterval> out;
  for (int k = k_min; k <= k_max; ++k) {
    const double len = std::ldexp(1.0, -k);
    for (long m = long(std::ceil(x_lo / len - 1e-12)); double(m) * len < x_hi - 1e-12 * len; ++m) out.push_back({k, m});
  }
  return out;
}

std::map<std::string, std::string> ModelOperatorSpec::to_kv() const {
  std::map<std::string, std::string> kv;
  std::ostringstream sh, ty;
  for (std::size_t i = 0; i < shifts.size(); ++i) sh << (i ? "," : "") << shifts[i];
  for (std::size_t i = 0; i < types.size(); ++i) ty << (i ? "," : "") << type_name(types[i]);
  auto num = [](double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
  };
  kv["l"] = std::to_string(l);
  kv["shifts"] = sh.str();
  kv["types"] = ty.str();
  kv["k_min"] = std::to_string(k_min);
  kv["k_max"] = std::to_string(k_max);
  kv["x_lo"] = num(x_lo);
  kv["x_hi"] = num(x_hi);
  return kv;
}

ModelOperatorSpec ModelOperatorSpec::from_kv(const std::map<std::string, std::string>& kv) {
  ModelOperatorSpec s;
  s.shifts.clear();
  s.types.clear();
  for (const auto& [key, value] : kv) {
    if (key == "l") s.l = std::stoi(value);
    else if (key == "shifts")
      for (const auto& v : split_list(value)) s.shifts.push_back(std::stol(v));
    else if (key == "types")
      for (const auto& v : split_list(value)) s.types.push_back(type_from(v));
    else if (key == "k_min") s.k_min = std::stoi(value);
    else if (key == "k_max") s.k_max = std::stoi(value);
    else if (key == "x_lo") s.x_lo = std::stod(value);
    else if (key == "x_hi") s.x_hi = std::stod(value);
    else throw std::invalid_argument("model operator: unknown key '" + key + "'");
  }
  s.validate();
  return s;
}

cplx pairing(const GridFunction& f, const AdaptedBump& b) {
  cplx acc = 0;
  for_window(f.domain, b.support_interval().center(), b.reach(),
             [&](long i, double x) { acc += f.wrap(i) * b.eval(x); });
  return acc * f.domain.dx();
}

GridFunction apply_model(const ModelOperatorSpec& spec, const std::vector<GridFunction>& fs) {
  spec.validate();
  if (fs.size() != std::size_t(spec.l)) throw std::invalid_argument("model operator: need l input functions");
  const Domain& d = fs[0].domain;
  for (const auto& f : fs)
    if (!(f.domain == d)) throw std::invalid_argument("model operator: inputs live on different domains");
  check_resolution(spec, d);
  const auto fam = spec.family();
  const std::size_t n = d.size(), scales = std::size_t(spec.k_max - spec.k_min + 1);
  std::vector<std::vector<cplx>> per_scale(scales, std::vector<cplx>(n, 0.0));
  parallel_for(scales, 0, [&](std::size_t s) {
    const int k = spec.k_min + int(s);
    auto& out = per_scale[s];
    for (const auto& I : fam) {
      if (I.k != k) continue;
      cplx coef = std::pow(I.length(), -0.5 * (spec.l - 2));
      for (int j = 0; j < spec.l && coef != cplx(0); ++j)
        coef *= pairing(fs[std::size_t(j)], {I, spec.shifts[std::size_t(j)], spec.types[std::size_t(j)], 2});
      if (coef == cplx(0)) continue;
      const AdaptedBump out_bump{I, 0, spec.types.back(), 2};
      for_window(d, I.center(), out_bump.reach(), [&](long i, double x) {
        out[std::size_t(((i % long(n)) + long(n)) % long(n))] += coef * out_bump.eval(x);
      });
    }
  });
  GridFunction res(d);
  for (const auto& part : per_scale)
    for (std::size_t m = 0; m < n; ++m) res[m] += part[m];
  return res;
}

double model_form(const ModelOperatorSpec& spec, const std::vector<GridFunction>& fs, const GridFunction& indicator) {
  spec.validate();
  if (fs.size() != std::size_t(spec.l)) throw std::invalid_argument("model operator: need l input functions");
  for (const auto& f : fs)
    if (!(f.domain == indicator.domain)) throw std::invalid_argument("model operator: inputs live on different domains");
  check_resolution(spec, indicator.domain);
  const auto fam = spec.family();
  const std::size_t scales = std::size_t(spec.k_max - spec.k_min + 1);
  std::vector<double> per_scale(scales, 0.0);
  parallel_for(scales, 0, [&](std::size_t s) {
    const int k = spec.k_min + int(s);
    for (const auto& I : fam) {
      if (I.k != k) continue;
      double term = std::pow(I.length(), -0.5 * (spec.l - 1));
      term *= std::abs(pairing(indicator, {I, 0, spec.types.back(), 2}));
      for (int j = 0; j < spec.l && term != 0; ++j)
        term *= std::abs(pairing(fs[std::size_t(j)], {I, spec.shifts[std::size_t(j)], spec.types[std::size_t(j)], 2}));
      per_scale[s] += term;
    }
  });
  double total = 0;
  for (double v : per_scale) total += v;
  return total;
}

GridFunction shifted_maximal(long n, const GridFunction& f, ScaleRange scales) {
  if (n < 0) throw std::invalid_argument("shifted maximal: shift must be ≥ 0");
  if (scales.k_min > scales.k_max) throw std::invalid_argument("shifted maximal: empty scale range");
  const Domain& d = f.domain;
  const std::size_t cells = d.size();
  std::vector<double> prefix(cells + 1, 0.0);
  for (std::size_t m = 0; m < cells; ++m) prefix[m + 1] = prefix[m] + std::abs(f[m]);
  GridFunction out(d);
  for (int k = scales.k_min; k <= scales.k_max; ++k) {
    const double len = std::ldexp(1.0, -k);
    const double per = len / d.dx(), offset = 0.5 * d.length() / len;
    if (per < 1 || std::abs(per - std::round(per)) > 1e-9 || std::abs(offset - std::round(offset)) > 1e-9)
      throw std::invalid_argument("shifted maximal: scale " + std::to_string(k) +
                                  " intervals are not unions of grid cells");
    const std::size_t c = std::size_t(std::lround(per));
    // Intervals partially outside the domain are handled by treating f as zero there.
    const std::size_t count = (cells + c - 1) / c;
    for (std::size_t m = 0; m < cells; ++m) {
      const std::size_t i = m / c + std::size_t(n);
      if (i >= count) continue;
      const std::size_t a = i * c, b = std::min(cells, a + c);
      const double avg = (prefix[b] - prefix[a]) / double(c);
      if (avg > out[m].real()) out[m] = avg;
    }
  }
  return out;
}

GridFunction shifted_square(long n, const BumpFamily& family, const GridFunction& f, ScaleRange scales) {
  if (scales.k_min > scales.k_max) throw std::invalid_argument("shifted square: empty scale range");
  const Domain& d = f.domain;
  std::vector<double> acc(d.size(), 0.0);
  for (int k = scales.k_min; k <= scales.k_max; ++k) {
    const double a = double(n) * std::ldexp(1.0, -k);
    auto band = apply_multiplier(
        f, [&](double xi) { return family.psi_hat_k(k, xi) * std::polar(1.0, 2 * kPi * xi * a); });
    for (std::size_t m = 0; m < d.size(); ++m) acc[m] += std::norm(band[m]);
  }
  GridFunction out(d);
  for (std::size_t m = 0; m < d.size(); ++m) out[m] = std::sqrt(acc[m]);
  return out;
}

}  // namespace calderon
