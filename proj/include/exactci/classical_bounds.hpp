#pragma once

#include <array>
#include <string_view>

#include "exactci/lattice_family.hpp"
#include "exactci/models.hpp"

namespace exactci {

enum class Method { lower, upper, clopper_pearson, sterne };

std::string_view to_string(Method method);

struct ConfidenceInterval {
  Method method = Method::sterne;
  double alpha = 0.05;
  double theta_lo = -kInf;
  double theta_hi = kInf;
  double natural_lo = 0.0;
  double natural_hi = 0.0;
  // The method's own p-value at each endpoint, taken as the limit from
  // outside the interval; 1 at infinite endpoints.
  std::array<double, 2> achieved{1.0, 1.0};

  bool contains(double theta) const { return theta_lo <= theta && theta <= theta_hi; }
};

// Tolerances of the monotone root finder behind the one-sided bounds.
inline constexpr double kThetaTolerance = 1e-10;
inline constexpr double kLevelTolerance = 1e-12;

void require_alpha(double alpha);

// b_alpha(x): root of eta -> F_eta(x) = alpha; +inf at x = max.
double upper_bound(const LatticeFamily& family, Index x, double alpha);
// a_alpha(x): root of eta -> F_eta(x-1) = 1 - alpha; -inf at x = min.
double lower_bound(const LatticeFamily& family, Index x, double alpha);

// F_eta(x)
double pvalue_left(const LatticeFamily& family, Index x, double eta);
// 1 - F_eta(x-1), computed as the upper tail
double pvalue_right(const LatticeFamily& family, Index x, double eta);
// 2 min(left, right), capped at 1
double pvalue_two(const LatticeFamily& family, Index x, double eta);

ConfidenceInterval lower_interval(const Model& model, Index x, double alpha);
ConfidenceInterval upper_interval(const Model& model, Index x, double alpha);
ConfidenceInterval clopper_pearson(const Model& model, Index x, double alpha);

}  // namespace exactci
