#include "exactci/classical_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace exactci {

namespace {

constexpr int kMaxExpansions = 64;
constexpr int kMaxBisections = 400;

struct Bracket {
  double below;  // f(below) <= target
  double above;  // f(above) >= target
};

// Brackets and bisects the root of a continuous strictly monotone f.
// `rising` says whether f increases in theta. The initial guess [lo, hi]
// is widened by doubling steps until it brackets the target.
template <class F>
Bracket solve_monotone(F&& f, double target, double lo, double hi, bool rising) {
  auto sign = [&](double v) { return rising ? v - target : target - v; };
  double step = 1.0;
  for (int i = 0; sign(f(lo)) > 0.0; ++i) {
    if (i > kMaxExpansions) throw Error(ErrorKind::divergent_search, "root bracket expansion diverged");
    lo -= step;
    step *= 2.0;
  }
  step = 1.0;
  for (int i = 0; sign(f(hi)) < 0.0; ++i) {
    if (i > kMaxExpansions) throw Error(ErrorKind::divergent_search, "root bracket expansion diverged");
    hi += step;
    step *= 2.0;
  }
  // sign(f(lo)) <= 0 <= sign(f(hi))
  for (int i = 0; i < kMaxBisections && hi - lo > kThetaTolerance; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = f(mid);
    if (std::abs(v - target) <= kLevelTolerance) return {mid, mid};
    (sign(v) < 0.0 ? lo : hi) = mid;
  }
  return rising ? Bracket{lo, hi} : Bracket{hi, lo};
}

std::pair<double, double> finite_start(const LatticeFamily& family, Index x) {
  auto [lo, hi] = family.plateau(x);
  if (std::isinf(lo) && std::isinf(hi)) return {-1.0, 1.0};
  if (std::isinf(lo)) lo = hi - 1.0;
  if (std::isinf(hi)) hi = lo + 1.0;
  return {lo, hi};
}

void require_nondegenerate(const LatticeFamily& family) {
  if (family.support().degenerate()) {
    throw Error(ErrorKind::degenerate_support, "single-point support carries no information");
  }
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::lower: return "lower";
    case Method::upper: return "upper";
    case Method::clopper_pearson: return "clopper_pearson";
    case Method::sterne: return "sterne";
  }
  return "unknown";
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::bad_alpha, "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

double upper_bound(const LatticeFamily& family, Index x, double alpha) {
  require_alpha(alpha);
  family.require_in_support(x);
  require_nondegenerate(family);
  const LatticeSupport& s = family.support();
  if (s.hi && x == *s.hi) return kInf;
  const auto [lo, hi] = finite_start(family, x);
  auto left = [&](double eta) { return family.at(eta).cdf(x); };
  // F_eta(x) decreases; the conservative end is the one with F <= alpha.
  return solve_monotone(left, alpha, lo, hi, false).below;
}

double lower_bound(const LatticeFamily& family, Index x, double alpha) {
  require_alpha(alpha);
  family.require_in_support(x);
  require_nondegenerate(family);
  const LatticeSupport& s = family.support();
  if (s.lo && x == *s.lo) return -kInf;
  const auto [lo, hi] = finite_start(family, x);
  auto right = [&](double eta) { return family.at(eta).upper_tail(x); };
  return solve_monotone(right, alpha, lo, hi, true).below;
}

double pvalue_left(const LatticeFamily& family, Index x, double eta) {
  family.require_in_support(x);
  return clamp_probability(family.cdf(eta, x));
}

double pvalue_right(const LatticeFamily& family, Index x, double eta) {
  family.require_in_support(x);
  family.require_admissible(eta);
  const LatticeSupport& s = family.support();
  if (s.lo && x <= *s.lo) return 1.0;
  return clamp_probability(family.at(eta).upper_tail(x));
}

double pvalue_two(const LatticeFamily& family, Index x, double eta) {
  family.require_in_support(x);
  family.require_admissible(eta);
  const Distribution d = family.at(eta);
  const LatticeSupport& s = family.support();
  const double left = (s.hi && x >= *s.hi) ? 1.0 : d.cdf(x);
  const double right = (s.lo && x <= *s.lo) ? 1.0 : d.upper_tail(x);
  return std::min(1.0, 2.0 * clamp_probability(std::min(left, right)));
}

namespace {

ConfidenceInterval finish(const Model& model, Method method, double alpha, double lo, double hi,
                          std::array<double, 2> achieved) {
  ConfidenceInterval ci;
  ci.method = method;
  ci.alpha = alpha;
  ci.theta_lo = lo;
  ci.theta_hi = hi;
  ci.natural_lo = model.to_natural(lo);
  ci.natural_hi = model.to_natural(hi);
  ci.achieved = achieved;
  return ci;
}

}  // namespace

ConfidenceInterval lower_interval(const Model& model, Index x, double alpha) {
  const double a = lower_bound(model.family, x, alpha);
  const double pa = std::isinf(a) ? 1.0 : pvalue_right(model.family, x, a);
  return finish(model, Method::lower, alpha, a, kInf, {pa, 1.0});
}

ConfidenceInterval upper_interval(const Model& model, Index x, double alpha) {
  const double b = upper_bound(model.family, x, alpha);
  const double pb = std::isinf(b) ? 1.0 : pvalue_left(model.family, x, b);
  return finish(model, Method::upper, alpha, -kInf, b, {1.0, pb});
}

ConfidenceInterval clopper_pearson(const Model& model, Index x, double alpha) {
  require_alpha(alpha);
  const double a = lower_bound(model.family, x, alpha / 2.0);
  const double b = upper_bound(model.family, x, alpha / 2.0);
  const double pa = std::isinf(a) ? 1.0 : pvalue_two(model.family, x, a);
  const double pb = std::isinf(b) ? 1.0 : pvalue_two(model.family, x, b);
  return finish(model, Method::clopper_pearson, alpha, a, b, {pa, pb});
}

}  // namespace exactci
