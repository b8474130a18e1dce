#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace calderon::cli {
namespace {

const std::string kRun = "run";

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

double to_real(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

long to_int(const std::string& s) {
  std::size_t used = 0;
  const long v = std::stol(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

const KeyInfo* find_key(const std::string& name) {
  for (const auto& k : known_keys())
    if (k.name == name) return &k;
  return nullptr;
}

std::vector<std::string> choices(const std::string& key) {
  if (key == "experiment") {
    std::vector<std::string> ids;
    for (const auto& e : catalog()) ids.push_back(e.id);
    return ids;
  }
  if (key == "operator") return {"identity", "hilbert", "commutator", "paraproduct"};
  if (key == "shift_operator") return {"shifted_maximal", "shifted_square", "model_form"};
  if (key == "identity") {
    auto tags = identity_tags();
    tags.push_back("taylor_linear");
    return tags;
  }
  if (key == "profile") return {"linear", "gaussian-bump", "smoothed-sawtooth", "random-trig", "polynomial-growth"};
  return {};
}

std::string normalize(const KeyInfo& k, const std::string& raw) {
  const std::string v = trim(raw);
  switch (k.type) {
    case ValueType::Int: return std::to_string(to_int(v));
    case ValueType::Real: return fmt(to_real(v));
    case ValueType::Bool:
      if (v == "true" || v == "yes" || v == "on" || v == "1") return "true";
      if (v == "false" || v == "no" || v == "off" || v == "0") return "false";
      throw std::invalid_argument(v);
    case ValueType::RealList:
    case ValueType::IntList: {
      std::string out;
      for (const auto& item : split(v))
        out += (out.empty() ? "" : ",") + (k.type == ValueType::RealList ? fmt(to_real(item)) : std::to_string(to_int(item)));
      if (out.empty()) throw std::invalid_argument(v);
      return out;
    }
    case ValueType::Text: {
      const auto c = choices(k.name);
      if (!c.empty() && std::find(c.begin(), c.end(), v) == c.end()) throw std::invalid_argument(v);
      if (v.empty()) throw std::invalid_argument(v);
      return v;
    }
  }
  return v;
}

ProfileSeed profile_of(const RunConfig& c) {
  ProfileSeed p;
  p.tag = profile_tag_from_string(c.text("profile"));
  p.amplitude = c.real("profile_amplitude");
  p.bandwidth = c.real("profile_bandwidth");
  p.seed = std::uint64_t(c.integer("profile_seed"));
  p.degree = int(c.integer("profile_degree"));
  return p;
}

}  // namespace

const std::vector<ExperimentInfo>& catalog() {
  static const std::vector<ExperimentInfo> c{
      {"t1-identities", "interior residuals of the commutator-calculus and T(1) identities",
       "commutator calculus and T(1) reduction identities"},
      {"convergence", "refinement slope of one identity residual", "quadrature order of the identity checks"},
      {"kernel-multiplier", "kernel route against Fourier-multiplier route for C_d",
       "kernel and symbol forms of the Calderón commutators"},
      {"norm", "randomized lower bound for an operator norm", "multilinear commutator estimate with Hölder exponents"},
      {"growth-in-d", "norm lower bounds of C_d for d = 1..d_max with polynomial and exponential fits",
       "polynomial dependence of the commutator constant on d"},
      {"decay", "Fourier-coefficient decay of the averaged-indicator symbol along both axes",
       "decay of the Fourier coefficients of the smooth symbol pieces"},
      {"shift-log", "shifted maximal, square and model-form estimates against the shift",
       "logarithmic growth of shifted dyadic operators in the shift"},
      {"cauchy-series", "partial sums of the commutator series against the Cauchy integral",
       "Cauchy integral on a Lipschitz graph as a series of commutators"},
  };
  return c;
}

const std::vector<KeyInfo>& known_keys() {
  using V = ValueType;
  const std::vector<std::string> norm_growth{"norm", "growth-in-d"};
  static const std::vector<KeyInfo> k{
      {"experiment", V::Text, "t1-identities", {kRun}, "experiment id (see list)"},
      {"L", V::Real, "64", {kRun}, "domain length"},
      {"n", V::Int, "4096", {kRun}, "grid points"},
      {"R", V::Real, "0", {kRun}, "kernel truncation radius (0: L/4)"},
      {"seed", V::Int, "1", {kRun}, "base seed"},
      {"out", V::Text, "results", {kRun}, "output directory"},
      {"plot", V::Bool, "true", {kRun}, "write an SVG plot"},
      {"operator", V::Text, "commutator", {"norm"}, "identity | hilbert | commutator | paraproduct"},
      {"d", V::Int, "1", {"norm", "kernel-multiplier"}, "commutator degree"},
      {"exponents", V::RealList, "2,inf", {"norm"}, "p_1..p_{d+1}"},
      {"p_out", V::Real, "2", {"norm"}, "output exponent"},
      {"trials", V::Int, "64", norm_growth, "random trials per estimate"},
      {"profile", V::Text, "gaussian-bump", norm_growth, "profile family"},
      {"profile_amplitude", V::Real, "1", norm_growth, "profile amplitude"},
      {"profile_bandwidth", V::Real, "1", norm_growth, "profile bandwidth"},
      {"profile_seed", V::Int, "0", norm_growth, "profile seed"},
      {"profile_degree", V::Int, "2", norm_growth, "degree for polynomial-growth profiles"},
      {"profile_scale", V::Real, "1", norm_growth, "sup norm of A'"},
      {"d_max", V::Int, "6", {"growth-in-d"}, "largest degree"},
      {"p1", V::Real, "2", {"growth-in-d"}, "exponent of the f slot"},
      {"include_linear", V::Bool, "true", {"growth-in-d"}, "also try A(x) = x"},
      {"n_min", V::Int, "8", {"decay"}, "n-axis start"},
      {"n_max", V::Int, "256", {"decay"}, "n-axis end"},
      {"n1_min", V::Int, "8", {"decay"}, "n1-axis start"},
      {"n1_max", V::Int, "128", {"decay"}, "n1-axis end"},
      {"resolution", V::Int, "512", {"decay"}, "quadrature nodes per axis"},
      {"case_extent", V::Int, "12", {"decay"}, "half-width of the two-term model grid"},
      {"fcoef", V::Bool, "true", {"decay"}, "also measure the three-window coefficients"},
      {"fcoef_max", V::Int, "32", {"decay"}, "largest three-window index"},
      {"shift_operator", V::Text, "shifted_maximal", {"shift-log"}, "shifted_maximal | shifted_square | model_form"},
      {"shifts", V::IntList, "0,1,2,4,8,16,32,64,128,256,512,1024", {"shift-log"}, "shift ladder"},
      {"cells_per_unit", V::Int, "1024", {"shift-log"}, "maximal: grid cells per unit length"},
      {"half_length", V::Real, "2048", {"shift-log"}, "maximal: half length of the domain"},
      {"random_inputs", V::Int, "7", {"shift-log"}, "random inputs besides the adversary"},
      {"tolerance", V::Real, "0.001", {"t1-identities", "kernel-multiplier"}, "pass threshold"},
      {"identity", V::Text, "t1_c1", {"convergence"}, "identity tag"},
      {"ladder", V::IntList, "1024,2048,4096", {"convergence"}, "grid sizes"},
      {"terms", V::Int, "6", {"cauchy-series"}, "largest commutator degree D"},
      {"lip", V::Real, "0.3", {"cauchy-series"}, "sup norm of A'"},
  };
  return k;
}

RunConfig::RunConfig() {
  for (const auto& k : known_keys()) values_[k.name] = normalize(k, k.fallback);
}

void RunConfig::set(const std::string& key, const std::string& value, const std::string& section) {
  const KeyInfo* k = find_key(key);
  if (!k) throw ConfigError("unknown key '" + key + "'");
  if (!section.empty() && std::find(k->sections.begin(), k->sections.end(), section) == k->sections.end())
    throw ConfigError("key '" + key + "' does not belong in section [" + section + "]");
  try {
    values_[key] = normalize(*k, value);
  } catch (const std::exception&) {
    throw ConfigError("bad value '" + trim(value) + "' for key '" + key + "'");
  }
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string section = kRun;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      const auto& cat = catalog();
      if (section != kRun && std::none_of(cat.begin(), cat.end(), [&](const auto& e) { return e.id == section; }))
        throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    try {
      c.set(trim(line.substr(0, eq)), line.substr(eq + 1), section);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string RunConfig::dump() const {
  std::ostringstream o;
  std::vector<std::string> sections{kRun};
  for (const auto& e : catalog()) sections.push_back(e.id);
  bool first = true;
  for (const auto& s : sections) {
    std::vector<const KeyInfo*> ks;
    for (const auto& k : known_keys())
      if (k.sections.front() == s) ks.push_back(&k);
    if (ks.empty()) continue;
    o << (first ? "" : "\n") << '[' << s << "]\n";
    first = false;
    for (const auto* k : ks) o << k->name << " = " << values_.at(k->name) << "  # " << k->help << '\n';
  }
  return o.str();
}

const std::string& RunConfig::text(const std::string& key) const { return values_.at(key); }
double RunConfig::real(const std::string& key) const { return to_real(text(key)); }
long RunConfig::integer(const std::string& key) const { return to_int(text(key)); }
bool RunConfig::flag(const std::string& key) const { return text(key) == "true"; }
std::vector<double> RunConfig::reals(const std::string& key) const {
  std::vector<double> v;
  for (const auto& s : split(text(key))) v.push_back(to_real(s));
  return v;
}
std::vector<long> RunConfig::integers(const std::string& key) const {
  std::vector<long> v;
  for (const auto& s : split(text(key))) v.push_back(to_int(s));
  return v;
}

ExperimentRecord execute(const RunConfig& c) {
  const std::string& id = c.text("experiment");
  const auto n = std::size_t(c.integer("n"));
  if (id == "t1-identities") {
    auto opt = default_convergence_options();
    opt.L = c.real("L");
    return identity_study(n, opt, c.real("tolerance"));
  }
  if (id == "convergence") {
    auto opt = default_convergence_options();
    opt.L = c.real("L");
    opt.ladder.clear();
    for (long v : c.integers("ladder")) opt.ladder.push_back(std::size_t(v));
    return convergence_study(c.text("identity"), opt);
  }
  if (id == "kernel-multiplier") return kernel_multiplier_study(int(c.integer("d")), c.real("L"), n, c.real("tolerance"));
  if (id == "norm") {
    NormQuery q;
    q.op = operator_kind_from_string(c.text("operator"));
    q.d = int(c.integer("d"));
    q.profile = profile_of(c);
    q.profile_scale = c.real("profile_scale");
    q.exponents = c.reals("exponents");
    q.p_out = c.real("p_out");
    q.trials = std::size_t(c.integer("trials"));
    q.seed = std::uint64_t(c.integer("seed"));
    q.L = c.real("L");
    q.n = n;
    q.R = c.real("R");
    return estimate_norm(q);
  }
  if (id == "growth-in-d") {
    GrowthOptions o;
    o.p1 = c.real("p1");
    o.profile = profile_of(c);
    o.profile_scale = c.real("profile_scale");
    o.trials = std::size_t(c.integer("trials"));
    o.seed = std::uint64_t(c.integer("seed"));
    o.L = c.real("L");
    o.n = n;
    o.include_linear = c.flag("include_linear");
    return growth_in_d(int(c.integer("d_max")), o);
  }
  if (id == "decay") {
    DecayOptions o;
    o.n_lo = c.integer("n_min");
    o.n_hi = c.integer("n_max");
    o.n1_lo = c.integer("n1_min");
    o.n1_hi = c.integer("n1_max");
    o.resolution = int(c.integer("resolution"));
    o.case_extent = c.integer("case_extent");
    o.fcoef = c.flag("fcoef");
    o.fcoef_hi = c.integer("fcoef_max");
    return decay_study(standard_window_pair(), o);
  }
  if (id == "shift-log") {
    ShiftOptions o;
    o.seed = std::uint64_t(c.integer("seed"));
    o.random_inputs = std::size_t(c.integer("random_inputs"));
    o.cells_per_unit = std::size_t(c.integer("cells_per_unit"));
    o.half_length = c.real("half_length");
    return shift_growth_study(shift_operator_from_string(c.text("shift_operator")), c.integers("shifts"), o);
  }
  if (id == "cauchy-series") return cauchy_series_study(int(c.integer("terms")), c.real("lip"), c.real("L"), n);
  throw ConfigError("unknown experiment '" + id + "'");
}

}  // namespace calderon::cli
