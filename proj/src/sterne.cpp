#include "exactci/sterne.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace exactci {

namespace {

constexpr int kMaxStageTwoSteps = 10'000;

void require_delta(double delta) {
  if (!(delta > 0.0) || std::isinf(delta)) {
    throw Error(ErrorKind::bad_delta, "delta must be positive and finite");
  }
}

void require_nondegenerate(const LatticeFamily& family) {
  if (family.support().degenerate()) {
    throw Error(ErrorKind::degenerate_support, "single-point support carries no information");
  }
}

// pi on the piece left of theta_{k+1,x} for k >= x+1:
// P(X <= x) + P(X >= k+1) = 1 - F_eta(k) + F_eta(x).
double upper_piece(const LatticeFamily& family, Index x, Index k, double eta) {
  const Distribution d = family.at(eta);
  return std::clamp(d.cdf(x) + d.upper_tail(k + 1), 0.0, 1.0);
}

}  // namespace

PValueEvaluation sterne_pvalue(const LatticeFamily& family, Index x, double eta, Side side) {
  family.require_in_support(x);
  family.require_admissible(eta);
  if ((side == Side::right && eta == kInf) || (side == Side::left && eta == -kInf)) {
    side = Side::at;
  }

  const SpecialParamLadder ladder(family, x);
  const auto [flat_lo, flat_hi] = family.plateau(x);

  PValueEvaluation out;
  const bool past_lo = side == Side::left ? eta > flat_lo : eta >= flat_lo;
  const bool before_hi = side == Side::right ? eta < flat_hi : eta <= flat_hi;
  if (past_lo && before_hi) {
    out.value = 1.0;
    out.segment = x;
    out.on_plateau = true;
    out.on_jump = (eta == flat_lo && std::isfinite(flat_lo)) ||
                  (eta == flat_hi && std::isfinite(flat_hi));
    return out;
  }

  const Distribution d = family.at(eta);
  if (!before_hi) {
    // Upper pieces (theta_{k-1,x}, theta_{k,x}], k >= x+2.
    const Index k = ladder.first_at_or_above(eta, side == Side::right);
    out.segment = k;
    out.value = std::clamp(d.cdf(x) + d.upper_tail(k), 0.0, 1.0);
    const Index hit = ladder.first_at_or_above(eta, false);
    out.on_jump = std::isfinite(eta) && ladder(hit) == eta;
  } else {
    // Lower pieces [theta_{k,x}, theta_{k+1,x}), k <= x-2.
    const Index k = ladder.last_at_or_below(eta, side == Side::left);
    out.segment = k;
    out.value = std::clamp(d.cdf(k) + d.upper_tail(x), 0.0, 1.0);
    const Index hit = ladder.last_at_or_below(eta, false);
    out.on_jump = std::isfinite(eta) && ladder(hit) == eta;
  }
  return out;
}

Index stage_one(const LatticeFamily& family, Index x, double alpha, const SearchOptions& options) {
  require_alpha(alpha);
  family.require_in_support(x);
  require_nondegenerate(family);
  const LatticeSupport& s = family.support();
  if (s.hi && x == *s.hi) {
    throw Error(ErrorKind::precondition, "stage one needs x < max(X)", x);
  }
  const SpecialParamLadder ladder(family, x);
  auto pi_at_jump = [&](Index k) { return sterne_pvalue(family, x, ladder(k)).value; };

  Index k = x + 1;  // pi(x, theta_{x+1,x}) = 1
  Index k_hi = 0;   // first probe with pi < alpha
  if (s.hi) {
    k_hi = *s.hi;
    if (pi_at_jump(k_hi) >= alpha) return k_hi;
  } else {
    bool found = false;
    for (int j = 1; j <= options.max_doublings; ++j) {
      const Index probe = x + (Index{1} << j);
      if (pi_at_jump(probe) < alpha) {
        k_hi = probe;
        found = true;
        break;
      }
      k = probe;
    }
    if (!found) {
      throw Error(ErrorKind::divergent_search,
                  "no jump point with p-value below alpha within 2^" +
                      std::to_string(options.max_doublings) + " of x",
                  x);
    }
  }
  while (k_hi > k + 1) {
    const Index mid = k + (k_hi - k) / 2;
    if (pi_at_jump(mid) >= alpha) {
      k = mid;
    } else {
      k_hi = mid;
    }
  }
  return k;
}

SterneResult stage_two(const LatticeFamily& family, Index x, Index k, double alpha, double delta) {
  require_alpha(alpha);
  require_delta(delta);
  family.require_in_support(x);
  const LatticeSupport& s = family.support();
  if (k <= x || (s.hi && k >= *s.hi)) {
    throw Error(ErrorKind::precondition, "stage two needs x < k < max(X)", k);
  }
  const SpecialParamLadder ladder(family, x);

  SterneResult r;
  r.k_star = k;
  r.delta = delta;

  double b_lo = ladder(k);
  double p_lo = upper_piece(family, x, k, b_lo);
  if (p_lo <= alpha) {
    r.bound = r.bracket_lo = r.bracket_hi = b_lo;
    r.pvalue_lo = r.pvalue_hi = p_lo;
    r.branch = SterneBranch::jump_point;
    return r;
  }

  double b_hi = ladder(k + 1);
  double p_hi = std::isinf(b_hi) ? 0.0 : upper_piece(family, x, k, b_hi);
  for (int i = 0; i < kMaxStageTwoSteps && (b_hi - b_lo > delta || p_lo - p_hi > delta); ++i) {
    const double b_mid = std::isfinite(b_hi) ? 0.5 * (b_lo + b_hi) : b_lo + 1.0;
    if (b_mid <= b_lo || b_mid >= b_hi) break;
    const double p_mid = upper_piece(family, x, k, b_mid);
    if (p_mid > alpha) {
      b_lo = b_mid;
      p_lo = p_mid;
    } else {
      b_hi = b_mid;
      p_hi = p_mid;
    }
  }
  r.bound = b_hi;
  r.bracket_lo = b_lo;
  r.bracket_hi = b_hi;
  r.pvalue_lo = p_lo;
  r.pvalue_hi = p_hi;
  r.branch = SterneBranch::root;
  return r;
}

SterneResult sterne_upper_detail(const LatticeFamily& family, Index x, double alpha, double delta,
                                 const SearchOptions& options) {
  require_alpha(alpha);
  require_delta(delta);
  family.require_in_support(x);
  require_nondegenerate(family);
  const LatticeSupport& s = family.support();

  SterneResult r;
  r.delta = delta;
  if (s.hi && x == *s.hi) {
    r.k_star = x;
    r.branch = SterneBranch::x_is_max;
    return r;
  }

  const Index k = stage_one(family, x, alpha, options);
  if (s.hi && k == *s.hi) {
    // pi(x, eta) = F_eta(x) for eta > theta_{max,x}.
    const double t = family.special_param(x, k);
    const double f = family.at(t).cdf(x);
    r.k_star = k;
    if (f <= alpha) {
      r.bound = r.bracket_lo = r.bracket_hi = t;
      r.pvalue_lo = r.pvalue_hi = f;
      r.branch = SterneBranch::jump_point;
    } else {
      r.bound = r.bracket_lo = r.bracket_hi = upper_bound(family, x, alpha);
      r.pvalue_lo = r.pvalue_hi = family.at(r.bound).cdf(x);
      r.branch = SterneBranch::one_sided;
    }
    return r;
  }
  return stage_two(family, x, k, alpha, delta);
}

double sterne_upper(const LatticeFamily& family, Index x, double alpha, double delta,
                    const SearchOptions& options) {
  return sterne_upper_detail(family, x, alpha, delta, options).bound;
}

double sterne_lower(const LatticeFamily& family, Index x, double alpha, double delta,
                    const SearchOptions& options) {
  family.require_in_support(x);
  return -sterne_upper(family.reflected(), -x, alpha, delta, options);
}

ConfidenceInterval sterne_interval(const Model& model, Index x, double alpha, double delta,
                                   const SearchOptions& options) {
  ConfidenceInterval ci;
  ci.method = Method::sterne;
  ci.alpha = alpha;
  ci.theta_lo = sterne_lower(model.family, x, alpha, delta, options);
  ci.theta_hi = sterne_upper(model.family, x, alpha, delta, options);
  ci.natural_lo = model.to_natural(ci.theta_lo);
  ci.natural_hi = model.to_natural(ci.theta_hi);
  ci.achieved[0] = std::isinf(ci.theta_lo)
                       ? 1.0
                       : sterne_pvalue(model.family, x, ci.theta_lo, Side::left).value;
  ci.achieved[1] = std::isinf(ci.theta_hi)
                       ? 1.0
                       : sterne_pvalue(model.family, x, ci.theta_hi, Side::right).value;
  return ci;
}

ConfidenceInterval confidence_interval(const Model& model, Method method, Index x, double alpha,
                                       double delta) {
  switch (method) {
    case Method::lower: return lower_interval(model, x, alpha);
    case Method::upper: return upper_interval(model, x, alpha);
    case Method::clopper_pearson: return clopper_pearson(model, x, alpha);
    case Method::sterne: return sterne_interval(model, x, alpha, delta);
  }
  throw Error(ErrorKind::precondition, "unknown method");
}

}  // namespace exactci
