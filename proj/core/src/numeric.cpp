#include "calderon/numeric.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace calderon {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need ≥ 2 paired points");
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = x.size();
  double scale = 0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  if (syy <= 1e-24 * std::max(1.0, scale * scale) * n) {
    f.r2 = 0;
  } else {
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - f.intercept - f.slope * x[i];
      ssr += r * r;
    }
    f.r2 = 1 - ssr / syy;
  }
  return f;
}

namespace {
template <int N>
GaussRule expand() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  GaussRule r;
  for (int i = int(a.size()) - 1; i >= 0; --i) {
    if (a[i] == 0) continue;
    r.x.push_back(-a[i]);
    r.w.push_back(w[i]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    r.x.push_back(a[i]);
    r.w.push_back(w[i]);
  }
  return r;
}
}  // namespace

const GaussRule& gauss_legendre(int nodes) {
  static const GaussRule g8 = expand<8>(), g16 = expand<16>(), g32 = expand<32>(), g64 = expand<64>();
  switch (nodes) {
    case 8: return g8;
    case 16: return g16;
    case 32: return g32;
    case 64: return g64;
  }
  throw std::invalid_argument("gauss_legendre: unsupported node count");
}

GaussRule composite_gauss(double a, double b, int panels, int nodes) {
  if (panels < 1) panels = 1;
  const GaussRule& g = gauss_legendre(nodes);
  GaussRule r;
  r.x.reserve(std::size_t(panels) * g.x.size());
  r.w.reserve(r.x.capacity());
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      r.x.push_back(c + 0.5 * h * g.x[i]);
      r.w.push_back(0.5 * h * g.w[i]);
    }
  }
  return r;
}

bool is_power_of_two(std::size_t n) { return n && !(n & (n - 1)); }

}  // namespace calderon

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

namespace calderon {

unsigned worker_count(unsigned requested) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CALDERON_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = unsigned(v);
  }
  return requested ? std::min(requested, cap) : cap;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  threads = std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(count, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace calderon
