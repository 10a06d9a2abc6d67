#pragma once

// Discrete one-parameter exponential families on an interval of integers,
//
//     f_theta(x) = w_x exp(theta x) / sum_y w_y exp(theta y),
//
// with strictly log-concave weights. The canonical parameter theta is an
// extended real; -inf is admissible iff the support has a finite minimum and
// +inf iff it has a finite maximum, in which case f is the point mass there.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "exactci/error.hpp"

namespace exactci {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LatticeSupport {
  std::optional<Index> lo;  // nullopt: unbounded below
  std::optional<Index> hi;  // nullopt: unbounded above

  bool bounded_below() const { return lo.has_value(); }
  bool bounded_above() const { return hi.has_value(); }
  bool bounded() const { return lo && hi; }
  bool contains(Index x) const {
    return (!lo || x >= *lo) && (!hi || x <= *hi);
  }
  // Single-point supports make every confidence statement trivial.
  bool degenerate() const { return bounded() && *lo == *hi; }
};

using LogWeightFn = std::function<double(Index)>;
// Smallest index the truncated summation must reach on an unbounded side,
// as a function of theta.
using TailFloorFn = std::function<Index(double)>;

class Distribution;

class LatticeFamily {
 public:
  // Finite support {lo, ..., lo + log_weights.size() - 1}.
  static LatticeFamily from_log_weights(Index lo, std::vector<double> log_weights);

  // Support {lo, lo+1, ...}. `log_weight` must be total on the support and
  // strictly concave; `tail_floor` bounds where truncation may stop.
  static LatticeFamily unbounded_above(Index lo, LogWeightFn log_weight,
                                       TailFloorFn tail_floor);

  // The family of -X: support {-hi, ..., -lo}, log weight z -> log w_{-z},
  // canonical parameter -theta.
  LatticeFamily reflected() const;

  const LatticeSupport& support() const { return support_; }

  double log_weight(Index x) const;
  bool admissible(double theta) const;
  void require_admissible(double theta) const;

  // Evaluates the whole (truncated) distribution at theta.
  Distribution at(double theta) const;

  double log_pmf(double theta, Index x) const;
  double cdf(double theta, Index x) const;

  // theta_{k,x} = (log w_x - log w_k) / (k - x); k = lo-1 and k = hi+1 are
  // the -inf / +inf sentinels.
  double special_param(Index x, Index k) const;

  // [theta_{x-1,x}, theta_{x+1,x}], the set where x is a mode of f_theta.
  std::pair<double, double> plateau(Index x) const;

  void require_in_support(Index x) const;

 private:
  LatticeFamily() = default;

  std::pair<Index, Index> window(double theta) const;
  Index mode(double theta) const;

  LatticeSupport support_;
  LogWeightFn log_weight_;
  TailFloorFn upper_floor_;  // set when unbounded above
  TailFloorFn lower_floor_;  // set when unbounded below
};

// A family evaluated at one theta. Stores normalized probabilities over a
// window that is the full support for bounded families and a truncation
// (relative tail mass < 1e-18) otherwise, with prefix and suffix sums so
// both tails are accurate.
class Distribution {
 public:
  double theta() const { return theta_; }
  Index first() const { return first_; }
  Index last() const { return first_ + static_cast<Index>(prob_.size()) - 1; }
  double log_normalizer() const { return log_norm_; }

  double pmf(Index x) const;
  // P(X <= x)
  double cdf(Index x) const;
  // P(X >= x)
  double upper_tail(Index x) const;
  // P(a <= X <= b); 0 when a > b.
  double mass(Index a, Index b) const;

  double mean() const;
  double variance() const;

 private:
  friend class LatticeFamily;

  double theta_ = 0.0;
  Index first_ = 0;
  double log_norm_ = 0.0;
  std::vector<double> prob_;
  std::vector<double> lower_;  // lower_[i] = P(X <= first + i)
  std::vector<double> upper_;  // upper_[i] = P(X >= first + i)
};

struct ValidationResult {
  bool ok = true;
  // First interior x with log w_{x+1} - log w_x >= log w_x - log w_{x-1}.
  std::optional<Index> violation;
};

// Checks strict log-concavity of the weights. Unbounded supports are
// checked over `extent` points from their finite end.
ValidationResult validate(const LatticeFamily& family, Index extent = 1000);

// Throws Error{not_log_concave} when validate() fails.
void require_log_concave(const LatticeFamily& family, Index extent = 1000);

// The jump points theta_{k,x} of the Sterne p-value function for one x,
// strictly increasing in k.
class SpecialParamLadder {
 public:
  SpecialParamLadder(const LatticeFamily& family, Index x);

  Index x() const { return x_; }
  // theta_{k,x} including the sentinels at lo-1 and hi+1.
  double operator()(Index k) const;

  // Smallest k > x with theta_{k,x} >= eta (> eta when strict); may be the
  // hi+1 sentinel.
  Index first_at_or_above(double eta, bool strict) const;
  // Largest k < x with theta_{k,x} <= eta (< eta when strict); may be the
  // lo-1 sentinel.
  Index last_at_or_below(double eta, bool strict) const;

  // All (k, theta_{k,x}) for k in the support minus x. Bounded supports only.
  std::vector<std::pair<Index, double>> entries() const;

 private:
  const LatticeFamily* family_;
  Index x_;
};

namespace theory {

// Variance of the distribution on {0, ..., m} with weights proportional to
// exp(delta x). Closed form; strictly increasing in m. Generic in the real
// type so the increments, which fall like exp(-|delta| m), can be resolved
// in extended precision.
template <class Real = double>
Real truncated_geometric_variance(Real delta, Index m) {
  using std::sinh;
  if (m < 0) throw Error(ErrorKind::precondition, "m must be nonnegative");
  const Real m1 = static_cast<Real>(m + 1);
  if (delta == 0) return static_cast<Real>(m) * static_cast<Real>(m + 2) / 12;
  // B^2 - B = 1 / (4 sinh^2(delta/2)) and 2 cosh(y) - 2 = 4 sinh^2(y/2).
  const Real s1 = sinh(delta / 2);
  const Real sm = sinh(m1 * delta / 2);
  return 1 / (4 * s1 * s1) - (m1 * m1) / (4 * sm * sm);
}

}  // namespace theory

}  // namespace exactci
