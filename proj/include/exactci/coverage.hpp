#pragma once

// Exact finite-sample audit of interval methods:
//
//     coverage(eta) = sum_x f_eta(x) 1[eta in C(x)].
//
// Per-x interval construction and per-eta summation are independent, so
// both are OpenMP-parallel. The *_serial variants are the plain loops and
// serve as the reference the parallel kernels are tested against.

#include <iosfwd>
#include <vector>

#include "exactci/classical_bounds.hpp"
#include "exactci/sterne.hpp"

namespace exactci {

struct IntervalTable {
  Method method = Method::sterne;
  double alpha = 0.05;
  Index first = 0;  // intervals[i] belongs to x = first + i
  std::vector<ConfidenceInterval> intervals;

  Index last() const { return first + static_cast<Index>(intervals.size()) - 1; }
  const ConfidenceInterval& operator[](Index x) const {
    return intervals[static_cast<std::size_t>(x - first)];
  }
};

IntervalTable interval_table(const Model& model, Method method, double alpha, Index first,
                             Index last, double delta = kDefaultDelta);
IntervalTable interval_table_serial(const Model& model, Method method, double alpha, Index first,
                                    Index last, double delta = kDefaultDelta);

struct CoverageReport {
  Method method = Method::sterne;
  double alpha = 0.05;
  std::vector<double> grid;  // theta scale, sorted
  std::vector<double> natural;
  std::vector<double> coverage;
  // Mean natural-scale length; +inf when an infinite interval has mass.
  std::vector<double> expected_length;
  double min_coverage = 1.0;
};

// Poisson-type families: outcomes above the 1 - 1e-14 quantile are dropped.
inline constexpr double kOutcomeTailMass = 1e-14;

// Sorted union of `grid` and every finite interval endpoint lying within
// [grid.front(), grid.back()]. Coverage is piecewise constant between
// endpoints, so this makes a grid audit exact up to endpoint membership.
std::vector<double> audit_grid(std::vector<double> grid, const IntervalTable& table);

// `grid` is on the theta scale. Endpoints are merged in via audit_grid().
CoverageReport exact_coverage(const Model& model, Method method, double alpha,
                              std::vector<double> grid, double delta = kDefaultDelta);
CoverageReport exact_coverage_serial(const Model& model, Method method, double alpha,
                                     std::vector<double> grid, double delta = kDefaultDelta);

// Evenly spaced natural-scale values mapped to theta.
std::vector<double> natural_grid(const Model& model, double from, double to, std::size_t points);

struct LengthRow {
  Index x = 0;
  Method method = Method::sterne;
  double natural_lo = 0.0;
  double natural_hi = 0.0;
  double length = 0.0;  // +inf for unbounded intervals
};

std::vector<LengthRow> length_table(const Model& model, const std::vector<Method>& methods,
                                    double alpha, const std::vector<Index>& xs,
                                    double delta = kDefaultDelta);

// CSV with header eta,natural_param,coverage,expected_length.
void write_coverage_csv(std::ostream& out, const CoverageReport& report);
void write_length_csv(std::ostream& out, const std::vector<LengthRow>& rows);

}  // namespace exactci
