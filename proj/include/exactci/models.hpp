#pragma once

#include <string>

#include "exactci/lattice_family.hpp"

namespace exactci {

enum class ModelKind { binomial, poisson, odds_ratio, custom };

struct ModelSpec {
  ModelKind kind = ModelKind::custom;
  Index n = 0;   // binomial
  Index n1 = 0;  // odds ratio
  Index n2 = 0;
  Index s = 0;
};

// A family together with the map from the canonical parameter to the
// parameter users report (p = logistic(theta), lambda = rho = exp(theta)).
struct Model {
  ModelSpec spec;
  LatticeFamily family;

  double to_natural(double theta) const;
  double to_theta(double natural) const;
  std::string name() const;
  // Natural-scale point estimate for observation x.
  double point_estimate(Index x) const;
};

struct TwoByTwoTable {
  Index y1 = 0;
  Index n1 = 0;
  Index y2 = 0;
  Index n2 = 0;

  Index s() const { return y1 + y2; }
  Index x() const { return y1; }
  // Throws Error{precondition} when counts are inconsistent.
  void validate() const;
};

double log_factorial(Index n);
double logit(double p);
double logistic(double theta);

Model make_binomial(Index n);
Model make_poisson();
Model make_odds_ratio(Index n1, Index n2, Index s);
Model make_odds_ratio(const TwoByTwoTable& table);
// Wraps a user family after checking log-concavity; natural scale equals theta.
Model make_custom(LatticeFamily family);

}  // namespace exactci
