#include "exactci/lattice_family.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace exactci {

namespace {

// Terms more than this many log units below the running maximum are dropped
// when summing over an unbounded side.
constexpr double kTailDrop = 45.0;
// Largest truncation window we are willing to materialize.
constexpr Index kMaxWindow = 50'000'000;
constexpr int kMaxDoublings = 62;

std::string point(Index x) { return std::to_string(x); }

}  // namespace

LatticeFamily LatticeFamily::from_log_weights(Index lo, std::vector<double> log_weights) {
  if (log_weights.empty()) {
    throw Error(ErrorKind::empty_support, "no support points");
  }
  for (double lw : log_weights) {
    if (!std::isfinite(lw)) {
      throw Error(ErrorKind::precondition, "log weights must be finite");
    }
  }
  LatticeFamily f;
  f.support_.lo = lo;
  f.support_.hi = lo + static_cast<Index>(log_weights.size()) - 1;
  auto table = std::make_shared<const std::vector<double>>(std::move(log_weights));
  f.log_weight_ = [table, lo](Index x) { return (*table)[static_cast<std::size_t>(x - lo)]; };
  return f;
}

LatticeFamily LatticeFamily::unbounded_above(Index lo, LogWeightFn log_weight,
                                             TailFloorFn tail_floor) {
  LatticeFamily f;
  f.support_.lo = lo;
  f.log_weight_ = std::move(log_weight);
  f.upper_floor_ = std::move(tail_floor);
  return f;
}

LatticeFamily LatticeFamily::reflected() const {
  LatticeFamily f;
  if (support_.hi) f.support_.lo = -*support_.hi;
  if (support_.lo) f.support_.hi = -*support_.lo;
  f.log_weight_ = [lw = log_weight_](Index z) { return lw(-z); };
  if (upper_floor_) {
    f.lower_floor_ = [floor = upper_floor_](double theta) { return -floor(-theta); };
  }
  if (lower_floor_) {
    f.upper_floor_ = [floor = lower_floor_](double theta) { return -floor(-theta); };
  }
  return f;
}

void LatticeFamily::require_in_support(Index x) const {
  if (!support_.contains(x)) {
    throw Error(ErrorKind::out_of_support, "x = " + point(x) + " is not in the support", x);
  }
}

double LatticeFamily::log_weight(Index x) const {
  require_in_support(x);
  return log_weight_(x);
}

bool LatticeFamily::admissible(double theta) const {
  if (std::isnan(theta)) return false;
  if (theta == kInf) return support_.bounded_above();
  if (theta == -kInf) return support_.bounded_below();
  return true;
}

void LatticeFamily::require_admissible(double theta) const {
  if (!admissible(theta)) {
    throw Error(ErrorKind::inadmissible_infinite_theta,
                "theta = " + std::to_string(theta) + " is outside the parameter space");
  }
}

Index LatticeFamily::mode(double theta) const {
  auto term = [&](Index x) { return log_weight_(x) + theta * static_cast<double>(x); };
  if (support_.lo && !support_.hi) {
    // Smallest x with term(x+1) <= term(x); the increments decrease strictly.
    auto rising = [&](Index x) { return term(x + 1) > term(x); };
    Index a = *support_.lo;
    if (!rising(a)) return a;
    Index span = 1;
    Index b = a + 1;
    for (int i = 0; rising(b); ++i) {
      if (i > kMaxDoublings) throw Error(ErrorKind::divergent_search, "mode search diverged");
      a = b;
      span *= 2;
      b = a + span;
    }
    while (b - a > 1) {
      const Index mid = a + (b - a) / 2;
      (rising(mid) ? a : b) = mid;
    }
    return b;
  }
  if (support_.hi && !support_.lo) {
    // Largest x with term(x-1) <= term(x).
    auto falling = [&](Index x) { return term(x - 1) > term(x); };
    Index b = *support_.hi;
    if (!falling(b)) return b;
    Index span = 1;
    Index a = b - 1;
    for (int i = 0; falling(a); ++i) {
      if (i > kMaxDoublings) throw Error(ErrorKind::divergent_search, "mode search diverged");
      b = a;
      span *= 2;
      a = b - span;
    }
    while (b - a > 1) {
      const Index mid = a + (b - a) / 2;
      (falling(mid) ? b : a) = mid;
    }
    return a;
  }
  throw Error(ErrorKind::precondition, "supports unbounded on both sides are not supported");
}

std::pair<Index, Index> LatticeFamily::window(double theta) const {
  if (support_.bounded()) return {*support_.lo, *support_.hi};

  auto term = [&](Index x) { return log_weight_(x) + theta * static_cast<double>(x); };
  const Index m = mode(theta);
  if ((upper_floor_ && upper_floor_(theta) - m > kMaxWindow) ||
      (lower_floor_ && m - lower_floor_(theta) > kMaxWindow)) {
    throw Error(ErrorKind::unbounded_enumeration,
                "truncation window too large at theta = " + std::to_string(theta));
  }
  const double cutoff = term(m) - kTailDrop;

  Index first = m;
  while ((!support_.lo || first > *support_.lo) && term(first - 1) > cutoff) {
    if (m - --first > kMaxWindow) break;
  }
  if (!support_.lo && lower_floor_) first = std::min(first, lower_floor_(theta));

  Index last = m;
  while ((!support_.hi || last < *support_.hi) && term(last + 1) > cutoff) {
    if (++last - m > kMaxWindow) break;
  }
  if (!support_.hi && upper_floor_) last = std::max(last, upper_floor_(theta));

  if (last - first > kMaxWindow) {
    throw Error(ErrorKind::unbounded_enumeration,
                "truncation window too large at theta = " + std::to_string(theta));
  }
  return {first, last};
}

Distribution LatticeFamily::at(double theta) const {
  require_admissible(theta);
  Distribution d;
  d.theta_ = theta;
  if (std::isinf(theta)) {
    d.first_ = theta > 0 ? *support_.hi : *support_.lo;
    d.log_norm_ = std::nan("");
    d.prob_ = {1.0};
    d.lower_ = {1.0};
    d.upper_ = {1.0};
    return d;
  }

  const auto [first, last] = window(theta);
  const auto n = static_cast<std::size_t>(last - first + 1);
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Index x = first + static_cast<Index>(i);
    terms[i] = log_weight_(x) + theta * static_cast<double>(x);
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  double total = 0.0;
  for (double& t : terms) {
    t = std::exp(t - top);
    total += t;
  }

  d.first_ = first;
  d.log_norm_ = top + std::log(total);
  d.prob_ = std::move(terms);
  for (double& p : d.prob_) p /= total;

  d.lower_.resize(n);
  d.upper_.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += d.prob_[i];
    d.lower_[i] = acc;
  }
  acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += d.prob_[i];
    d.upper_[i] = acc;
  }
  return d;
}

double LatticeFamily::log_pmf(double theta, Index x) const {
  require_in_support(x);
  require_admissible(theta);
  if (theta == kInf) return x == *support_.hi ? 0.0 : -kInf;
  if (theta == -kInf) return x == *support_.lo ? 0.0 : -kInf;
  const Distribution d = at(theta);
  return std::min(0.0, log_weight_(x) + theta * static_cast<double>(x) - d.log_normalizer());
}

double LatticeFamily::cdf(double theta, Index x) const {
  require_admissible(theta);
  if (support_.lo && x < *support_.lo) return 0.0;
  if (support_.hi && x >= *support_.hi) return 1.0;
  return at(theta).cdf(x);
}

double LatticeFamily::special_param(Index x, Index k) const {
  require_in_support(x);
  if (k == x) throw Error(ErrorKind::k_equals_x, "theta_{k,x} needs k != x", x);
  if (support_.lo && k == *support_.lo - 1) return -kInf;
  if (support_.hi && k == *support_.hi + 1) return kInf;
  require_in_support(k);
  return (log_weight_(x) - log_weight_(k)) / static_cast<double>(k - x);
}

std::pair<double, double> LatticeFamily::plateau(Index x) const {
  return {special_param(x, x - 1), special_param(x, x + 1)};
}

double Distribution::pmf(Index x) const {
  if (x < first_ || x > last()) return 0.0;
  return prob_[static_cast<std::size_t>(x - first_)];
}

double Distribution::cdf(Index x) const {
  if (x < first_) return 0.0;
  if (x >= last()) return 1.0;
  return lower_[static_cast<std::size_t>(x - first_)];
}

double Distribution::upper_tail(Index x) const {
  if (x <= first_) return 1.0;
  if (x > last()) return 0.0;
  return upper_[static_cast<std::size_t>(x - first_)];
}

double Distribution::mass(Index a, Index b) const {
  a = std::max(a, first_);
  b = std::min(b, last());
  double total = 0.0;
  for (Index x = a; x <= b; ++x) total += prob_[static_cast<std::size_t>(x - first_)];
  return total;
}

double Distribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < prob_.size(); ++i) m += prob_[i] * static_cast<double>(i);
  return m + static_cast<double>(first_);
}

double Distribution::variance() const {
  const double m = mean() - static_cast<double>(first_);
  double v = 0.0;
  for (std::size_t i = 0; i < prob_.size(); ++i) {
    const double dev = static_cast<double>(i) - m;
    v += prob_[i] * dev * dev;
  }
  return v;
}

ValidationResult validate(const LatticeFamily& family, Index extent) {
  const LatticeSupport& s = family.support();
  Index from = 0;
  Index to = 0;
  if (s.bounded()) {
    from = *s.lo + 1;
    to = *s.hi - 1;
  } else if (s.lo) {
    from = *s.lo + 1;
    to = *s.lo + extent;
  } else if (s.hi) {
    from = *s.hi - extent;
    to = *s.hi - 1;
  } else {
    throw Error(ErrorKind::precondition, "supports unbounded on both sides are not supported");
  }
  for (Index x = from; x <= to; ++x) {
    const double below = family.log_weight(x) - family.log_weight(x - 1);
    const double above = family.log_weight(x + 1) - family.log_weight(x);
    if (above >= below) return {false, x};
  }
  return {};
}

void require_log_concave(const LatticeFamily& family, Index extent) {
  const ValidationResult r = validate(family, extent);
  if (!r.ok) {
    throw Error(ErrorKind::not_log_concave,
                "weight ratios are not strictly decreasing at x = " + point(*r.violation),
                r.violation);
  }
}

SpecialParamLadder::SpecialParamLadder(const LatticeFamily& family, Index x)
    : family_(&family), x_(x) {
  family.require_in_support(x);
}

double SpecialParamLadder::operator()(Index k) const { return family_->special_param(x_, k); }

Index SpecialParamLadder::first_at_or_above(double eta, bool strict) const {
  const LatticeSupport& s = family_->support();
  auto hit = [&](Index k) {
    const double t = (*this)(k);
    return strict ? t > eta : t >= eta;
  };
  Index a = x_ + 1;
  if (s.hi && a > *s.hi) return a;  // x = max: only the sentinel remains
  if (hit(a)) return a;
  Index b = 0;
  if (s.hi) {
    b = *s.hi + 1;
  } else {
    Index span = 1;
    b = a + 1;
    for (int i = 0; !hit(b); ++i) {
      if (i > kMaxDoublings) throw Error(ErrorKind::divergent_search, "ladder search diverged");
      a = b;
      span *= 2;
      b = a + span;
    }
  }
  // hit(a) is false, hit(b) is true (sentinel counts as true)
  while (b - a > 1) {
    const Index mid = a + (b - a) / 2;
    (hit(mid) ? b : a) = mid;
  }
  return b;
}

Index SpecialParamLadder::last_at_or_below(double eta, bool strict) const {
  const LatticeSupport& s = family_->support();
  auto hit = [&](Index k) {
    const double t = (*this)(k);
    return strict ? t < eta : t <= eta;
  };
  Index b = x_ - 1;
  if (s.lo && b < *s.lo) return b;
  if (hit(b)) return b;
  Index a = 0;
  if (s.lo) {
    a = *s.lo - 1;
  } else {
    Index span = 1;
    a = b - 1;
    for (int i = 0; !hit(a); ++i) {
      if (i > kMaxDoublings) throw Error(ErrorKind::divergent_search, "ladder search diverged");
      b = a;
      span *= 2;
      a = b - span;
    }
  }
  while (b - a > 1) {
    const Index mid = a + (b - a) / 2;
    (hit(mid) ? a : b) = mid;
  }
  return a;
}

std::vector<std::pair<Index, double>> SpecialParamLadder::entries() const {
  const LatticeSupport& s = family_->support();
  if (!s.bounded()) {
    throw Error(ErrorKind::unbounded_enumeration, "ladder entries need a bounded support");
  }
  std::vector<std::pair<Index, double>> out;
  for (Index k = *s.lo; k <= *s.hi; ++k) {
    if (k != x_) out.emplace_back(k, (*this)(k));
  }
  return out;
}

}  // namespace exactci
