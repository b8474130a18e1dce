// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance [criterion ...]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "calderon/experiments.hpp"

using namespace calderon;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome identities() {
  bool ok = true;
  std::string detail;
  const auto table = identity_study(4096, default_convergence_options(), 1e-3);
  ok = table.pass;
  detail += "worst sup " + fmt("%.2e", table.estimate);
  double min_slope = kInf;
  for (const auto& tag : identity_tags()) {
    const auto c = convergence_study(tag, default_convergence_options());
    ok = ok && c.pass;
    min_slope = std::min(min_slope, c.metric("slope"));
  }
  detail += ", min refinement slope " + fmt("%.2f", min_slope);
  return {ok, detail};
}

Outcome kernel_multiplier() {
  // d = 1 at L = 128: the multiplier route is periodic, so the gap has an O(1/L) part from nonzero-mean f.
  const auto a = kernel_multiplier_study(1, 128, 4096, 1e-3);
  const auto b = kernel_multiplier_study(2, 16, 256, 1e-2);
  return {a.pass && b.pass, "d=1 gap " + fmt("%.2e", a.estimate) + ", d=2 gap " + fmt("%.2e", b.estimate)};
}

Outcome symbol_oracles() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-4, 4);
  constexpr int kInputs = 1000;
  int agree = 0;
  for (int i = 0; i < kInputs; ++i) {
    const int d = 1 + i % 4;
    std::vector<double> freqs(std::size_t(d) + 1);
    for (auto& v : freqs) v = U(rng);
    const auto spec = SymbolSpec::commutator(d);
    const double exact = eval_symbol_exact(spec, freqs);
    const auto mc = eval_symbol_mc(spec, freqs, 1000000, 7000 + std::uint64_t(i));
    // A zero standard error means every sample had the same sign, so the symbol is ±1 exactly.
    if (std::abs(mc.estimate - exact) <= std::max(4 * mc.std_error, 1e-12)) ++agree;
  }
  double m1 = 0;
  for (int i = 0; i < 10000; ++i) {
    double xi = U(rng), xi1 = U(rng);
    if (xi1 == 0) xi1 = 1;
    const double both[2] = {xi, xi1};
    m1 = std::max(m1, std::abs(m1_closed_form(xi, xi1) - eval_symbol_exact(SymbolSpec::commutator(1), both)));
  }
  const bool ok = agree >= 990 && m1 <= 1e-13;
  return {ok, std::to_string(agree) + "/1000 within 4 SE, m1 max gap " + fmt("%.1e", m1)};
}

Outcome decay() {
  DecayOptions o;
  o.resolution = 512;
  const auto r = decay_study(standard_window_pair(), o);
  return {r.pass, "n-axis slope " + fmt("%.2f", r.metric("n_axis_slope")) + ", n1-axis slope " +
                      fmt("%.2f", r.metric("n1_axis_slope"))};
}

Outcome shift_log() {
  std::vector<long> ladder{0};
  for (long n = 1; n <= 1024; n *= 2) ladder.push_back(n);
  ShiftOptions o;
  o.cells_per_unit = 1024;
  o.half_length = 2048;
  const auto mx = shift_growth_study(ShiftOperator::Maximal, ladder, o);
  const auto sq = shift_growth_study(ShiftOperator::Square, ladder, o);
  return {mx.pass && sq.pass, "maximal: log R2 " + fmt("%.3f", mx.metric("log_r2")) + " gamma " +
                                  fmt("%.3f", mx.metric("power_exponent")) + "; square: log R2 " +
                                  fmt("%.3f", sq.metric("log_r2")) + " gamma " + fmt("%.1e", sq.metric("power_exponent"))};
}

Outcome growth() {
  const auto r = growth_in_d(6, GrowthOptions{});
  const bool ok = r.pass && r.verdict.find("consistent with polynomial growth") != std::string::npos;
  return {ok, "max successive ratio " + fmt("%.3f", r.metric("max_successive_ratio")) + ", verdict: " + r.verdict};
}

Outcome adjoints() {
  const Domain d(32, 2048);
  auto gauss = [&](double c, double w, double k) {
    return GridFunction::sample(d, [=](double x) { return std::exp(-(x - c) * (x - c) / (w * w)) * std::cos(k * x); });
  };
  const auto f = gauss(0.2, 1.1, 0.7), g = gauss(-0.4, 0.8, 0.0), h = gauss(0.9, 1.3, 1.5);
  double worst = 0;
  for (int i : {1, 3}) {
    const auto p = form_and_adjoints(i, {f, g}, h);
    worst = std::max(worst, std::abs(p.via_output - p.via_slot) / std::abs(p.via_output));
  }
  return {worst <= 1e-8, "worst relative gap " + fmt("%.1e", worst)};
}

Outcome paraproduct() {
  const auto fam = build_family(FamilyKind::NonCompact);
  const Domain grid(32, 2048);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  double excess = -kInf;
  for (int t = 0; t < 5; ++t) {
    std::vector<cplx> v(grid.size());
    for (auto& z : v) z = N(rng);
    const GridFunction f(grid, v);
    const double sup = lp_norm(f, kInf);
    for (int k = -3; k <= 5; ++k) {
      const auto g = apply_multiplier(f, [&](double xi) { return cplx(fam.phi_hat_k(k, xi)); });
      excess = std::max(excess, lp_norm(g, kInf) - sup);
    }
  }
  double lo = kInf, hi = 0;
  for (int dd = 1; dd <= 6; ++dd) {
    NormQuery q;
    q.op = OperatorKind::Paraproduct;
    q.d = dd;
    q.exponents.assign(std::size_t(dd) + 1, kInf);
    q.exponents[0] = 2;
    q.trials = 24;
    const double e = estimate_norm(q).estimate;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  return {excess <= 1e-12 && hi / lo <= 3,
          "max excess " + fmt("%.1e", excess) + ", estimates vary by factor " + fmt("%.3f", hi / lo)};
}

Outcome littlewood_paley() {
  const auto G = build_family(FamilyKind::NonCompact);
  const double tele = telescope_check(G, -6, 5, Domain(16, 2048)).max_error;
  // Ψ is a Gaussian difference; the trapezoid rule is spectrally accurate for it.
  double m0 = 0, m1 = 0;
  const double h = 1.0 / 64;
  for (int i = -64 * 64; i <= 64 * 64; ++i) {
    const double x = i * h;
    m0 += G.psi(x) * h;
    m1 += x * G.psi(x) * h;
  }
  double prev = partition_of_unity_residual(G, -6, 6, 1.0 / 16, 16.0), worst_factor = kInf;
  for (int K = 7; K <= 10; ++K) {
    const double r = partition_of_unity_residual(G, -K, K, 1.0 / 16, 16.0);
    worst_factor = std::min(worst_factor, prev / r);
    prev = r;
  }
  const bool ok = tele <= 1e-12 && std::abs(m0) <= 1e-12 && std::abs(m1) <= 1e-12 && worst_factor >= 1.9;
  return {ok, "telescope " + fmt("%.1e", tele) + ", moments " + fmt("%.1e", std::max(std::abs(m0), std::abs(m1))) +
                  ", residual factor per scale " + fmt("%.2f", worst_factor)};
}

Outcome cauchy() {
  const auto r = cauchy_series_study(6, 0.3, 64, 2048);
  return {r.pass, "geometric ratio " + fmt("%.3f", r.metric("geometric_ratio")) + ", error at D=6 " +
                      fmt("%.1e", r.metric("final_error"))};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "identity residuals and refinement", 60, identities},
      {2, "kernel vs multiplier route", 300, kernel_multiplier},
      {3, "symbol oracles", 120, symbol_oracles},
      {4, "Fourier-coefficient decay", 600, decay},
      {5, "shifted-operator log growth", 600, shift_log},
      {6, "growth in d", 900, growth},
      {7, "adjoint pairings", 30, adjoints},
      {8, "paraproduct sup bound and d-independence", 300, paraproduct},
      {9, "Littlewood-Paley structure", 10, littlewood_paley},
      {10, "Cauchy series consistency", 300, cauchy},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %s  %s: %s (%.1f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
