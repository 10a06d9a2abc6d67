#include <doctest.h>

#include <cmath>

#include "exactci/sterne.hpp"
#include "golden.hpp"
#include "oracles.hpp"

using namespace exactci;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no exception");
  return ErrorKind::precondition;
}

double pi(const LatticeFamily& f, Index x, double eta, Side side = Side::at) {
  return sterne_pvalue(f, x, eta, side).value;
}

Model table6() { return make_odds_ratio(golden::kN1, golden::kN2, golden::kY1 + golden::kY2); }

}  // namespace

TEST_CASE("plateau value") {
  for (const Model& m : {make_binomial(20), make_poisson(), table6()}) {
    for (Index x : {1, 3, 7}) {
      const auto [lo, hi] = m.family.plateau(x);
      for (double t : {0.0, 0.3, 0.7, 1.0}) {
        const PValueEvaluation e = sterne_pvalue(m.family, x, lo + t * (hi - lo));
        CHECK(e.value == 1.0);
        CHECK(e.on_plateau);
        CHECK(e.segment == x);
      }
    }
  }
}

TEST_CASE("binomial n=20 x=5 crossings") {
  const LatticeFamily f = make_binomial(20).family;
  CHECK(pi(f, 5, logit(0.4745)) >= 0.05);
  CHECK(pi(f, 5, logit(0.4755)) < 0.05);
  CHECK(pi(f, 5, logit(0.1035)) < 0.05);
  CHECK(pi(f, 5, logit(0.1045)) >= 0.05);
  const double eta = f.special_param(5, 20) + 0.5;
  CHECK(std::abs(pi(f, 5, eta) - f.cdf(eta, 5)) < 1e-15);
}

TEST_CASE("p-value at infinite parameters") {
  const LatticeFamily f = make_binomial(6).family;
  CHECK(pi(f, 6, kInf) == 1.0);
  CHECK(pi(f, 2, kInf) == 0.0);
  CHECK(pi(f, 0, -kInf) == 1.0);
  CHECK(pi(f, 3, -kInf) == 0.0);
  CHECK(pi(make_poisson().family, 0, -kInf) == 1.0);
  CHECK(kind_of([] { pi(make_poisson().family, 0, kInf); }) ==
        ErrorKind::inadmissible_infinite_theta);
}

TEST_CASE("oracle equivalence on small grids") {
  const auto grid = oracle::linspace(-5.0, 5.0, 101);
  const Model b = make_binomial(12);
  for (Index x = 0; x <= 12; ++x) {
    for (double eta : grid) {
      CHECK(std::abs(pi(b.family, x, eta) - oracle::sterne_pvalue(b, x, eta)) <= 1e-12);
    }
  }
  const Model o = table6();
  for (Index x : {0, 10, 42, 49}) {
    for (double eta : oracle::linspace(-3.0, 5.0, 100)) {
      CHECK(std::abs(pi(o.family, x, eta) - oracle::sterne_pvalue(o, x, eta)) <= 1e-12);
    }
  }
  const Model p = make_poisson();
  for (Index x = 0; x <= 10; ++x) {
    for (double eta : oracle::linspace(-2.0, 3.5, 60)) {
      CHECK(std::abs(pi(p.family, x, eta) - oracle::sterne_pvalue(p, x, eta)) <= 1e-9);
    }
  }
}

TEST_CASE("one-sided limits at jumps") {
  const Model b = make_binomial(12);
  for (Index x = 0; x <= 12; ++x) {
    for (Index k = 0; k <= 12; ++k) {
      if (k == x) continue;
      const double t = b.family.special_param(x, k);
      const double left = pi(b.family, x, t, Side::left);
      const double right = pi(b.family, x, t, Side::right);
      CHECK(std::abs(left - pi(b.family, x, std::nextafter(t, -kInf))) < 1e-12);
      CHECK(std::abs(right - pi(b.family, x, std::nextafter(t, kInf))) < 1e-12);
      CHECK(std::abs(pi(b.family, x, t) - oracle::sterne_pvalue(b, x, t, 1e-9)) < 1e-12);
      CHECK(sterne_pvalue(b.family, x, t).on_jump);
    }
  }
}

TEST_CASE("jump monotonicity and direction") {
  for (const Model& m : {make_binomial(20), table6()}) {
    const Index lo = *m.family.support().lo;
    const Index hi = *m.family.support().hi;
    for (Index x = lo; x <= hi; ++x) {
      double prev = 2.0;
      for (Index k = x + 1; k <= hi; ++k) {
        const double t = m.family.special_param(x, k);
        const double v = pi(m.family, x, t);
        CHECK(v < prev);
        prev = v;
        CHECK(v > pi(m.family, x, t + 1e-9));
      }
      prev = 2.0;
      for (Index k = x - 1; k >= lo; --k) {
        const double t = m.family.special_param(x, k);
        const double v = pi(m.family, x, t);
        CHECK(v < prev);
        prev = v;
        CHECK(v > pi(m.family, x, t - 1e-9));
      }
    }
  }
}

TEST_CASE("piecewise concavity of log(1 - pi)") {
  for (const Model& m : {make_binomial(20), table6()}) {
    const Index lo = *m.family.support().lo;
    const Index hi = *m.family.support().hi;
    for (Index x = lo; x <= hi; x += (hi - lo > 30 ? 3 : 1)) {
      for (Index k = lo - 1; k <= hi + 1; ++k) {
        if (k >= x - 1 && k <= x + 1) continue;
        double a = 0.0;
        double b = 0.0;
        if (k > x) {
          a = m.family.special_param(x, k - 1);
          b = m.family.special_param(x, k);
        } else {
          a = m.family.special_param(x, k);
          b = m.family.special_param(x, k + 1);
        }
        if (std::isinf(a)) a = b - 2.0;
        if (std::isinf(b)) b = a + 2.0;
        const double h = (b - a) / 4.0;
        const auto g = [&](double eta) { return std::log1p(-pi(m.family, x, eta)); };
        CHECK(g(a + 2 * h) > 0.5 * (g(a + h) + g(a + 3 * h)));
      }
    }
  }
}

TEST_CASE("stage one") {
  const LatticeFamily p = make_poisson().family;
  CHECK(stage_one(p, 3, 0.05) == 15);
  CHECK(oracle::stage_one_linear(make_poisson(), 3, 0.05, 40) == 15);
  CHECK(std::abs(std::exp(p.special_param(3, 15)) - 8.8077) < 5e-4);

  const Model b = make_binomial(20);
  CHECK(stage_one(b.family, 19, 0.05) == 20);
  for (Index x = 0; x < 20; ++x) {
    for (double alpha : {0.01, 0.05, 0.2}) {
      CHECK(stage_one(b.family, x, alpha) == oracle::stage_one_linear(b, x, alpha, 20));
    }
  }
  CHECK(kind_of([&] { stage_one(b.family, 20, 0.05); }) == ErrorKind::precondition);
  CHECK(kind_of([&] { stage_one(b.family, 3, 1.0); }) == ErrorKind::bad_alpha);
  SearchOptions tight;
  tight.max_doublings = 2;
  CHECK(kind_of([&] { stage_one(p, 3, 0.05, tight); }) == ErrorKind::divergent_search);
}

TEST_CASE("stage two") {
  const LatticeFamily p = make_poisson().family;
  const SterneResult r = stage_two(p, 3, 15, 0.05);
  CHECK(r.branch == SterneBranch::jump_point);
  CHECK(r.bound == p.special_param(3, 15));

  const LatticeFamily b = make_binomial(20).family;
  const SterneResult at5 = stage_two(b, 5, stage_one(b, 5, 0.05), 0.05);
  CHECK(at5.branch == SterneBranch::jump_point);
  CHECK(std::abs(logistic(at5.bound) - 0.475) < 5e-4);

  const Index k = stage_one(b, 10, 0.05);
  const SterneResult fine = stage_two(b, 10, k, 0.05, 1e-10);
  const SterneResult coarse = stage_two(b, 10, k, 0.05, 1e-4);
  CHECK(fine.branch == SterneBranch::root);
  CHECK(coarse.branch == SterneBranch::root);
  CHECK(std::abs(fine.bound - coarse.bound) <= 1e-4);
  CHECK(fine.bound > b.special_param(10, k));
  CHECK(fine.bound <= b.special_param(10, k + 1));
  CHECK(fine.bracket_hi - fine.bracket_lo <= 1e-10);
  CHECK(fine.pvalue_hi <= 0.05);
  CHECK(fine.pvalue_hi >= 0.05 - 1e-10);
  CHECK(coarse.pvalue_hi <= 0.05);
  CHECK(coarse.pvalue_hi >= 0.05 - 1e-4);

  CHECK(kind_of([&] { stage_two(b, 5, k, 0.05, 0.0); }) == ErrorKind::bad_delta);
  CHECK(kind_of([&] { stage_two(b, 5, k, 0.05, -1.0); }) == ErrorKind::bad_delta);
  CHECK(kind_of([&] { stage_two(b, 5, 20, 0.05); }) == ErrorKind::precondition);
}

TEST_CASE("upper and lower bounds") {
  const Model b = make_binomial(20);
  CHECK(sterne_upper(b.family, 20, 0.05) == kInf);
  CHECK(sterne_lower(b.family, 0, 0.05) == -kInf);
  CHECK(std::abs(std::exp(sterne_upper(make_poisson().family, 0, 0.05)) - 3.7644) < 5e-4);
  CHECK(std::abs(std::exp(sterne_lower(make_poisson().family, 3, 0.05)) - 0.8176) < 5e-4);
  CHECK(std::abs(logistic(sterne_lower(b.family, 5, 0.05)) - 0.104) < 5e-4);
  const double root = sterne_upper(b.family, 10, 0.05);
  CHECK(std::abs(oracle::sterne_pvalue(b, 10, root) - 0.05) <= 1e-8);

  const ConfidenceInterval b0 = sterne_interval(b, 0, 0.05);
  CHECK(b0.natural_lo == 0.0);
  CHECK(b0.natural_hi < 1.0);

  const ConfidenceInterval p7 = sterne_interval(make_poisson(), 7, 0.05);
  CHECK(std::abs(p7.natural_lo - 3.2853) < 5e-4);
  CHECK(std::abs(p7.natural_hi - 14.3403) < 5e-4);

  const ConfidenceInterval o = sterne_interval(table6(), 42, 0.05);
  CHECK(std::abs(o.natural_lo - 1.4427) < 1e-3);
  CHECK(std::abs(o.natural_hi - 8.0213) < 1e-3);
  CHECK(o.achieved[0] <= 0.05);
  CHECK(o.achieved[1] <= 0.05);

  CHECK(kind_of([] { sterne_upper(make_odds_ratio(3, 3, 0).family, 0, 0.05); }) ==
        ErrorKind::degenerate_support);
}

TEST_CASE("k equals max branch") {
  const Model b = make_binomial(3);
  const SterneResult r = sterne_upper_detail(b.family, 2, 0.4);
  CHECK(r.k_star == 3);
  CHECK((r.branch == SterneBranch::jump_point || r.branch == SterneBranch::one_sided));
  const SterneResult loose = sterne_upper_detail(b.family, 2, 0.01);
  CHECK(loose.k_star == 3);
  CHECK(loose.branch == SterneBranch::one_sided);
  CHECK(std::abs(b.family.cdf(loose.bound, 2) - 0.01) < 1e-9);
}

TEST_CASE("mirror self-consistency") {
  for (Index n : {7, 20}) {
    const LatticeFamily f = make_binomial(n).family;
    for (Index x = 0; x <= n; ++x) {
      const double a = sterne_lower(f, x, 0.05);
      const double b = sterne_upper(f, n - x, 0.05);
      if (std::isinf(a)) {
        CHECK(b == -a);
      } else {
        CHECK(std::abs(a + b) <= kDefaultDelta);
      }
    }
  }
}

TEST_CASE("bounds enclose the level set") {
  for (const Model& m : {make_binomial(20), table6()}) {
    for (Index x : {0, 5, 13, 20}) {
      const ConfidenceInterval ci = sterne_interval(m, x, 0.05);
      const double from = std::isfinite(ci.theta_lo) ? ci.theta_lo - 1 : ci.theta_hi - 8;
      const double to = std::isfinite(ci.theta_hi) ? ci.theta_hi + 1 : ci.theta_lo + 8;
      for (double eta : oracle::linspace(from, to, 2001)) {
        if (pi(m.family, x, eta) > 0.05) {
          CHECK(eta >= ci.theta_lo - kDefaultDelta);
          CHECK(eta <= ci.theta_hi + kDefaultDelta);
        }
      }
    }
  }
}

TEST_CASE("poisson right-limit branch") {
  const LatticeFamily p = make_poisson().family;
  for (Index x = 0; x <= 15; ++x) {
    for (double alpha : {0.1, 0.05, 0.01}) {
      const SterneResult r = sterne_upper_detail(p, x, alpha);
      CHECK(r.branch == SterneBranch::jump_point);
      CHECK(r.bound == p.special_param(x, r.k_star));
    }
  }
}

TEST_CASE("dispatcher") {
  const Model b = make_binomial(10);
  CHECK(confidence_interval(b, Method::sterne, 4, 0.05).method == Method::sterne);
  CHECK(confidence_interval(b, Method::clopper_pearson, 4, 0.05).method ==
        Method::clopper_pearson);
  CHECK(confidence_interval(b, Method::lower, 4, 0.05).theta_hi == kInf);
  CHECK(confidence_interval(b, Method::upper, 4, 0.05).theta_lo == -kInf);
}
