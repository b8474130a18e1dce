#pragma once
// Closed-form test profiles A with exact derivatives up to order 4.
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "calderon/gridcore.hpp"

namespace calderon {

enum class ProfileTag { Linear, GaussianBump, SmoothedSawtooth, RandomTrig, PolynomialGrowth, Custom };

std::string to_string(ProfileTag t);
ProfileTag profile_tag_from_string(const std::string& s);

struct ProfileSeed {
  ProfileTag tag = ProfileTag::GaussianBump;
  double amplitude = 1.0;
  double bandwidth = 1.0;  // frequency-content bound
  std::uint64_t seed = 0;
  int degree = 2;  // only for polynomial-growth

  std::map<std::string, std::string> to_kv() const;
  static ProfileSeed from_kv(const std::map<std::string, std::string>& kv);
  bool operator==(const ProfileSeed&) const = default;
};

// P(x)·exp(-beta (x - center)^2), P given by ascending coefficients in (x - center).
struct GaussPolyTerm {
  std::vector<double> poly;
  double beta = 0;
  double center = 0;
};
// c·cos(2πνx) + s·sin(2πνx)
struct TrigTerm {
  double nu = 0, c = 0, s = 0;
};

class LipschitzProfile {
 public:
  static constexpr int kMaxOrder = 4;
  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

  LipschitzProfile(ProfileTag tag, std::vector<GaussPolyTerm> g, std::vector<TrigTerm> t);

  double eval(double x) const { return derivative(0, x); }
  double derivative(int k, double x) const;
  double lip_norm() const { return lip_; }
  double support_radius() const { return support_; }
  ProfileTag tag() const { return tag_; }
  // Bound on sup |A^(k)|, k ≤ 4 (exact for Gaussian-polynomial terms up to scan resolution).
  double derivative_bound(int k) const;
  LipschitzProfile scaled(double factor) const;

 private:
  ProfileTag tag_;
  std::vector<GaussPolyTerm> gauss_;
  std::vector<std::vector<std::vector<double>>> gauss_derivs_;  // [term][order] -> poly
  std::vector<TrigTerm> trig_;
  double lip_ = 0, support_ = kUnbounded;
  double bounds_[kMaxOrder + 1] = {};
  void certify();
};

LipschitzProfile make_profile(const ProfileSeed& seed);
GridFunction sample(const LipschitzProfile& p, const Domain& d, int order = 0);

}  // namespace calderon
