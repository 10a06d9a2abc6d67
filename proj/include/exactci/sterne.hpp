#pragma once

// Sterne's p-value
//
//     pi(x, eta) = sum_y 1[f_eta(y) <= f_eta(x)] f_eta(y)
//
// and the bounds of its level set {eta : pi(x, eta) > alpha}. pi(x, .) is
// piecewise smooth with jumps at the special parameters theta_{k,x}; it is
// not unimodal in general, so the bounds are found by an integer binary
// search over jump points (stage one) followed by bisection inside a single
// continuity piece (stage two).

#include "exactci/classical_bounds.hpp"
#include "exactci/lattice_family.hpp"
#include "exactci/models.hpp"

namespace exactci {

inline constexpr double kDefaultDelta = 1e-8;

// Which value of pi(x, .) to return at eta: the value itself or a one-sided
// limit. They differ only at jump points.
enum class Side { at, left, right };

struct PValueEvaluation {
  double value = 1.0;
  // Index k of the piece containing eta: x on the plateau, k > x for the
  // piece (theta_{k-1,x}, theta_{k,x}], k < x for [theta_{k,x}, theta_{k+1,x}).
  // Sentinels hi+1 / lo-1 mark the outermost pieces.
  Index segment = 0;
  bool on_plateau = false;
  // eta equals some theta_{k,x}, k != x.
  bool on_jump = false;
};

PValueEvaluation sterne_pvalue(const LatticeFamily& family, Index x, double eta,
                               Side side = Side::at);

struct SearchOptions {
  // Unbounded supports: stage one probes k = x + 2^j for j <= max_doublings.
  int max_doublings = 40;
};

// k_alpha(x): the largest k > x with pi(x, theta_{k,x}) >= alpha.
Index stage_one(const LatticeFamily& family, Index x, double alpha,
                const SearchOptions& options = {});

enum class SterneBranch {
  x_is_max,     // x = max(X), bound is +inf
  jump_point,   // bound is a special parameter theta_{k,x}
  root,         // bound solves pi(x, b) = alpha inside a piece
  one_sided,    // k_alpha(x) = max(X) and the bound is b_alpha(x)
};

struct SterneResult {
  Index k_star = 0;
  double bound = kInf;
  // Final bracket [b', b] and the piece values there.
  double bracket_lo = kInf;
  double bracket_hi = kInf;
  double pvalue_lo = 1.0;
  double pvalue_hi = 1.0;
  double delta = kDefaultDelta;
  SterneBranch branch = SterneBranch::x_is_max;
};

// Bisection for b^St_alpha(x) within (theta_{k,x}, theta_{k+1,x}]. Returns
// b in [b^St, b^St + delta] with pi(x, b) in [alpha - delta, alpha].
SterneResult stage_two(const LatticeFamily& family, Index x, Index k, double alpha,
                       double delta = kDefaultDelta);

SterneResult sterne_upper_detail(const LatticeFamily& family, Index x, double alpha,
                                 double delta = kDefaultDelta,
                                 const SearchOptions& options = {});

double sterne_upper(const LatticeFamily& family, Index x, double alpha,
                    double delta = kDefaultDelta, const SearchOptions& options = {});
// Computed on the reflected family: a^St(x) = -b^St_reflected(-x).
double sterne_lower(const LatticeFamily& family, Index x, double alpha,
                    double delta = kDefaultDelta, const SearchOptions& options = {});

ConfidenceInterval sterne_interval(const Model& model, Index x, double alpha,
                                   double delta = kDefaultDelta,
                                   const SearchOptions& options = {});

// Dispatch over all four methods; delta only affects Sterne.
ConfidenceInterval confidence_interval(const Model& model, Method method, Index x, double alpha,
                                       double delta = kDefaultDelta);

}  // namespace exactci
