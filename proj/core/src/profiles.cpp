#include "calderon/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace calderon {

namespace {
constexpr int kInternalOrder = 6;

double horner(const std::vector<double>& p, double u) {
  double r = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * u + *it;
  return r;
}

// d/du [P e^{-βu²}] = (P' - 2βuP) e^{-βu²}
std::vector<double> next_poly(const std::vector<double>& p, double beta) {
  std::vector<double> q(p.size() + 1, 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) q[i - 1] += double(i) * p[i];
  for (std::size_t i = 0; i < p.size(); ++i) q[i + 1] -= 2 * beta * p[i];
  while (q.size() > 1 && q.back() == 0) q.pop_back();
  return q;
}

const std::pair<ProfileTag, const char*> kTagNames[] = {
    {ProfileTag::Linear, "linear"},
    {ProfileTag::GaussianBump, "gaussian-bump"},
    {ProfileTag::SmoothedSawtooth, "smoothed-sawtooth"},
    {ProfileTag::RandomTrig, "random-trig"},
    {ProfileTag::PolynomialGrowth, "polynomial-growth"},
    {ProfileTag::Custom, "custom"},
};
}  // namespace

std::string to_string(ProfileTag t) {
  for (auto& [tag, name] : kTagNames)
    if (tag == t) return name;
  return "custom";
}

ProfileTag profile_tag_from_string(const std::string& s) {
  std::string base = s.substr(0, s.find('('));
  for (auto& [tag, name] : kTagNames)
    if (base == name && tag != ProfileTag::Custom) return tag;
  throw std::invalid_argument("unknown profile tag: " + s);
}

std::map<std::string, std::string> ProfileSeed::to_kv() const {
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  return {{"tag", to_string(tag)},
          {"amplitude", num(amplitude)},
          {"bandwidth", num(bandwidth)},
          {"seed", std::to_string(seed)},
          {"degree", std::to_string(degree)}};
}

ProfileSeed ProfileSeed::from_kv(const std::map<std::string, std::string>& kv) {
  ProfileSeed s;
  for (const auto& [k, v] : kv) {
    if (k == "tag") {
      s.tag = profile_tag_from_string(v);
      if (auto p = v.find('('); p != std::string::npos) s.degree = std::stoi(v.substr(p + 1));
    } else if (k == "amplitude") {
      s.amplitude = std::stod(v);
    } else if (k == "bandwidth") {
      s.bandwidth = std::stod(v);
    } else if (k == "seed") {
      s.seed = std::stoull(v);
    } else if (k == "degree") {
      s.degree = std::stoi(v);
    } else {
      throw std::invalid_argument("unknown profile key: " + k);
    }
  }
  return s;
}

LipschitzProfile::LipschitzProfile(ProfileTag tag, std::vector<GaussPolyTerm> g, std::vector<TrigTerm> t)
    : tag_(tag), gauss_(std::move(g)), trig_(std::move(t)) {
  for (const auto& term : gauss_) {
    if (term.beta < 0) throw std::invalid_argument("LipschitzProfile: negative Gaussian exponent");
    if (term.beta == 0 && term.poly.size() > 2)
      throw std::invalid_argument("LipschitzProfile: unbounded derivative (pure polynomial of degree ≥ 2)");
    std::vector<std::vector<double>> d{term.poly.empty() ? std::vector<double>{0.0} : term.poly};
    for (int k = 1; k <= kInternalOrder; ++k) d.push_back(next_poly(d.back(), term.beta));
    gauss_derivs_.push_back(std::move(d));
  }
  certify();
}

double LipschitzProfile::derivative(int k, double x) const {
  if (k < 0 || k > kInternalOrder) throw std::invalid_argument("derivative order out of range");
  double r = 0;
  for (std::size_t i = 0; i < gauss_.size(); ++i) {
    const double u = x - gauss_[i].center;
    const double e = gauss_[i].beta > 0 ? std::exp(-gauss_[i].beta * u * u) : 1.0;
    if (e == 0) continue;
    r += horner(gauss_derivs_[i][k], u) * e;
  }
  for (const auto& t : trig_) {
    const double w = 2 * kPi * t.nu, th = w * x;
    const double c = std::cos(th), s = std::sin(th);
    // k-th derivative of c cos + s sin rotates by k quarter turns.
    double a = t.c, b = t.s;
    for (int j = 0; j < k; ++j) {
      const double na = b * w, nb = -a * w;
      a = na;
      b = nb;
    }
    r += a * c + b * s;
  }
  return r;
}

double LipschitzProfile::derivative_bound(int k) const {
  if (k < 0 || k > kMaxOrder) throw std::invalid_argument("derivative order out of range");
  return bounds_[k];
}

LipschitzProfile LipschitzProfile::scaled(double factor) const {
  auto g = gauss_;
  for (auto& t : g)
    for (auto& c : t.poly) c *= factor;
  auto tr = trig_;
  for (auto& t : tr) t.c *= factor, t.s *= factor;
  return LipschitzProfile(tag_, std::move(g), std::move(tr));
}

void LipschitzProfile::certify() {
  bool decaying = !gauss_.empty();
  bool polynomial = false;
  for (const auto& t : gauss_) {
    if (t.beta == 0) decaying = false, polynomial = true;
  }
  // Trig and affine parts have explicit bounds.
  double trig_bound[kMaxOrder + 1] = {};
  for (const auto& t : trig_) {
    const double amp = std::hypot(t.c, t.s), w = 2 * kPi * std::abs(t.nu);
    for (int k = 0; k <= kMaxOrder; ++k) trig_bound[k] += amp * std::pow(w, k);
  }
  if (!trig_.empty()) decaying = false;

  double gauss_bound[kMaxOrder + 1] = {};
  std::vector<const GaussPolyTerm*> bumps;
  double poly_slope = 0;
  for (const auto& t : gauss_) {
    if (t.beta > 0) {
      bumps.push_back(&t);
    } else {
      poly_slope += t.poly.size() > 1 ? t.poly[1] : 0.0;
      if (!t.poly.empty() && t.poly[0] != 0) gauss_bound[0] = kUnbounded;
    }
  }
  if (polynomial) {
    gauss_bound[0] = kUnbounded;
    gauss_bound[1] += std::abs(poly_slope);
  }

  double radius = 0;
  if (!bumps.empty()) {
    double scale = 0, beta_max = 0;
    for (auto* t : bumps) {
      for (double c : t->poly) scale = std::max(scale, std::abs(c));
      beta_max = std::max(beta_max, t->beta);
    }
    const double tol = 1e-16 * std::max(1.0, scale);
    // Radius beyond which every derivative of every bump is below tol.
    for (std::size_t i = 0; i < gauss_.size(); ++i) {
      const auto& t = gauss_[i];
      if (t.beta == 0) continue;
      const double step = 0.02 / std::sqrt(t.beta);
      double last = 0;
      for (double u = 0; u < 60 / std::sqrt(t.beta); u += step) {
        const double e = std::exp(-t.beta * u * u);
        for (int k = 0; k <= kMaxOrder; ++k) {
          if (std::abs(horner(gauss_derivs_[i][k], u)) * e > tol ||
              std::abs(horner(gauss_derivs_[i][k], -u)) * e > tol)
            last = u;
        }
      }
      radius = std::max(radius, std::abs(t.center) + last + step);
    }
    // Sup of |A^(k)| restricted to the bump part: dense scan plus Newton polishing.
    auto bump_deriv = [&](int k, double x) {
      double r = 0;
      for (std::size_t i = 0; i < gauss_.size(); ++i) {
        const auto& t = gauss_[i];
        if (t.beta == 0) continue;
        const double u = x - t.center;
        r += horner(gauss_derivs_[i][k], u) * std::exp(-t.beta * u * u);
      }
      return r;
    };
    const double h = 0.01 / std::sqrt(beta_max);
    for (int k = 0; k <= kMaxOrder; ++k) {
      double best = 0;
      double prev2 = 0, prev1 = std::abs(bump_deriv(k, -radius - h));
      for (double x = -radius; x <= radius + h; x += h) {
        const double cur = std::abs(bump_deriv(k, x));
        best = std::max(best, cur);
        if (prev1 >= prev2 && prev1 >= cur) {
          double z = x - h;
          for (int it = 0; it < 30; ++it) {
            const double d1 = bump_deriv(k + 1, z), d2 = bump_deriv(k + 2, z);
            if (d2 == 0) break;
            const double step = d1 / d2;
            if (std::abs(step) > h) break;
            z -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
          }
          if (std::abs(z - (x - h)) <= h) best = std::max(best, std::abs(bump_deriv(k, z)));
        }
        prev2 = prev1;
        prev1 = cur;
      }
      gauss_bound[k] += best;
    }
  }

  for (int k = 0; k <= kMaxOrder; ++k) bounds_[k] = gauss_bound[k] + trig_bound[k];
  lip_ = bounds_[1];
  support_ = decaying ? radius : kUnbounded;
}

LipschitzProfile make_profile(const ProfileSeed& seed) {
  if (!(seed.amplitude >= 0)) throw std::invalid_argument("make_profile: amplitude must be ≥ 0");
  if (!(seed.bandwidth > 0)) throw std::invalid_argument("make_profile: bandwidth must be positive");
  const double a = seed.amplitude, b = seed.bandwidth;
  switch (seed.tag) {
    case ProfileTag::Linear:
      return LipschitzProfile(ProfileTag::Linear, {{{0.0, a}, 0.0, 0.0}}, {});
    case ProfileTag::GaussianBump: {
      // a·exp(-π (b x)^2)
      LipschitzProfile p(ProfileTag::GaussianBump, {{{a}, kPi * b * b, 0.0}}, {});
      return p;
    }
    case ProfileTag::PolynomialGrowth: {
      if (seed.degree < 0 || seed.degree > 8) throw std::invalid_argument("polynomial-growth degree must be in [0, 8]");
      // a·(b x)^d·exp(-π (b x)^2 / 4)
      std::vector<double> poly(std::size_t(seed.degree) + 1, 0.0);
      poly.back() = a * std::pow(b, seed.degree);
      return LipschitzProfile(ProfileTag::PolynomialGrowth, {{poly, kPi * b * b / 4, 0.0}}, {});
    }
    case ProfileTag::SmoothedSawtooth: {
      // Sawtooth series with Gaussian smoothing factors; harmonics up to the bandwidth.
      constexpr int K = 8;
      const double nu = b / K;
      std::vector<TrigTerm> t;
      double lip = 0;
      for (int k = 1; k <= K; ++k) {
        const double coef = ((k % 2) ? 1.0 : -1.0) / (kPi * k) * std::exp(-double(k * k) / (K * K));
        t.push_back({k * nu, 0.0, coef});
        lip += std::abs(coef) * 2 * kPi * k * nu;
      }
      for (auto& term : t) term.s *= lip > 0 ? a / lip : 0.0;
      return LipschitzProfile(ProfileTag::SmoothedSawtooth, {}, std::move(t));
    }
    case ProfileTag::RandomTrig: {
      constexpr int K = 8;
      std::mt19937_64 rng(seed.seed);
      std::uniform_real_distribution<double> freq(0.0, b);
      std::normal_distribution<double> coef(0.0, 1.0);
      std::vector<TrigTerm> t;
      double lip = 0;
      for (int k = 0; k < K; ++k) {
        double nu = freq(rng);
        if (nu == 0) nu = b / 2;
        const double c = coef(rng), s = coef(rng);
        t.push_back({nu, c, s});
        lip += std::hypot(c, s) * 2 * kPi * nu;
      }
      for (auto& term : t) term.c *= a / lip, term.s *= a / lip;
      return LipschitzProfile(ProfileTag::RandomTrig, {}, std::move(t));
    }
    case ProfileTag::Custom:
      break;
  }
  throw std::invalid_argument("make_profile: unknown tag");
}

GridFunction sample(const LipschitzProfile& p, const Domain& d, int order) {
  if (order < 0 || order > LipschitzProfile::kMaxOrder) throw std::invalid_argument("sample: order must be in [0, 4]");
  std::vector<cplx> v(d.size());
  for (std::size_t m = 0; m < v.size(); ++m) v[m] = p.derivative(order, d.x(m));
  return GridFunction(d, std::move(v));
}

}  // namespace calderon
