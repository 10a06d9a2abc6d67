#include "exactci/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace exactci {

double log_factorial(Index n) {
  if (n < 0) throw Error(ErrorKind::precondition, "factorial of a negative number");
  if (n < 2) return 0.0;
  int sign = 0;
  return ::lgamma_r(static_cast<double>(n) + 1.0, &sign);
}

double logit(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return std::log(p) - std::log1p(-p);
}

double logistic(double theta) {
  if (theta == kInf) return 1.0;
  if (theta == -kInf) return 0.0;
  if (theta >= 0.0) return 1.0 / (1.0 + std::exp(-theta));
  const double e = std::exp(theta);
  return e / (1.0 + e);
}

double Model::to_natural(double theta) const {
  switch (spec.kind) {
    case ModelKind::binomial: return logistic(theta);
    case ModelKind::poisson:
    case ModelKind::odds_ratio: return std::exp(theta);
    case ModelKind::custom: return theta;
  }
  return theta;
}

double Model::to_theta(double natural) const {
  switch (spec.kind) {
    case ModelKind::binomial: return logit(natural);
    case ModelKind::poisson:
    case ModelKind::odds_ratio: return natural <= 0.0 ? -kInf : std::log(natural);
    case ModelKind::custom: return natural;
  }
  return natural;
}

std::string Model::name() const {
  switch (spec.kind) {
    case ModelKind::binomial: return "binomial";
    case ModelKind::poisson: return "poisson";
    case ModelKind::odds_ratio: return "oddsratio";
    case ModelKind::custom: return "custom";
  }
  return "custom";
}

double Model::point_estimate(Index x) const {
  family.require_in_support(x);
  const auto xd = static_cast<double>(x);
  switch (spec.kind) {
    case ModelKind::binomial: return xd / static_cast<double>(spec.n);
    case ModelKind::poisson: return xd;
    case ModelKind::odds_ratio: {
      const auto n1 = static_cast<double>(spec.n1);
      const auto n2 = static_cast<double>(spec.n2);
      const auto s = static_cast<double>(spec.s);
      // Counts of the four cells, each shifted by 1/2.
      return ((xd + 0.5) * (n2 - s + xd + 0.5)) / ((n1 - xd + 0.5) * (s - xd + 0.5));
    }
    case ModelKind::custom: break;
  }
  throw Error(ErrorKind::precondition, "custom families have no point estimator");
}

void TwoByTwoTable::validate() const {
  if (n1 < 0 || n2 < 0 || y1 < 0 || y2 < 0 || y1 > n1 || y2 > n2) {
    throw Error(ErrorKind::precondition, "table counts need 0 <= y1 <= n1 and 0 <= y2 <= n2");
  }
}

Model make_binomial(Index n) {
  if (n < 1) throw Error(ErrorKind::bad_n, "binomial needs n >= 1");
  std::vector<double> lw(static_cast<std::size_t>(n + 1));
  const double top = log_factorial(n);
  for (Index x = 0; x <= n; ++x) {
    // Same operand order for x and n - x keeps the weights exactly symmetric.
    const Index a = std::min(x, n - x);
    lw[static_cast<std::size_t>(x)] = top - log_factorial(a) - log_factorial(n - a);
  }
  return {{ModelKind::binomial, n, 0, 0, 0}, LatticeFamily::from_log_weights(0, std::move(lw))};
}

Model make_poisson() {
  auto floor = [](double theta) -> Index {
    const double lambda = std::exp(theta);
    return static_cast<Index>(std::ceil(lambda + 40.0 * std::sqrt(lambda) + 50.0));
  };
  auto family = LatticeFamily::unbounded_above(
      0, [](Index x) { return -log_factorial(x); }, floor);
  return {{ModelKind::poisson, 0, 0, 0, 0}, std::move(family)};
}

Model make_odds_ratio(Index n1, Index n2, Index s) {
  if (n1 < 0 || n2 < 0) throw Error(ErrorKind::bad_n, "group sizes must be nonnegative");
  const Index lo = std::max<Index>(0, s - n2);
  const Index hi = std::min(n1, s);
  if (s < 0 || s > n1 + n2 || lo > hi) {
    throw Error(ErrorKind::empty_support, "no table has these margins");
  }
  std::vector<double> lw;
  lw.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (Index x = lo; x <= hi; ++x) {
    lw.push_back(-(log_factorial(x) + log_factorial(n1 - x) + log_factorial(s - x) +
                   log_factorial(n2 - s + x)));
  }
  return {{ModelKind::odds_ratio, 0, n1, n2, s},
          LatticeFamily::from_log_weights(lo, std::move(lw))};
}

Model make_odds_ratio(const TwoByTwoTable& table) {
  table.validate();
  return make_odds_ratio(table.n1, table.n2, table.s());
}

Model make_custom(LatticeFamily family) {
  require_log_concave(family);
  return {{}, std::move(family)};
}

}  // namespace exactci
