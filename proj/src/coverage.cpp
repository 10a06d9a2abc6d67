#include "exactci/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>

namespace exactci {

namespace {

// Runs body(i) for i in [0, n) across OpenMP threads. The first exception
// thrown by any iteration is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(exactci_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

Index upper_outcome(const Model& model, double eta_max) {
  const LatticeSupport& s = model.family.support();
  if (s.hi) return *s.hi;
  if (!std::isfinite(eta_max)) {
    throw Error(ErrorKind::unbounded_enumeration, "grid must be finite for unbounded supports");
  }
  const Distribution d = model.family.at(eta_max);
  for (Index q = d.first(); q <= d.last(); ++q) {
    if (d.upper_tail(q + 1) <= kOutcomeTailMass) return q;
  }
  return d.last();
}

struct CoveragePoint {
  double coverage = 0.0;
  double expected_length = 0.0;
};

CoveragePoint coverage_at(const Model& model, const IntervalTable& table, double eta) {
  const Distribution d = model.family.at(eta);
  CoveragePoint out;
  const Index from = std::max(table.first, d.first());
  const Index to = std::min(table.last(), d.last());
  for (Index x = from; x <= to; ++x) {
    const double p = d.pmf(x);
    if (p == 0.0) continue;
    const ConfidenceInterval& ci = table[x];
    if (ci.contains(eta)) out.coverage += p;
    out.expected_length += p * (ci.natural_hi - ci.natural_lo);
  }
  out.coverage = std::min(out.coverage, 1.0);
  return out;
}

struct AuditSetup {
  std::vector<double> grid;
  IntervalTable table;
};

AuditSetup prepare(const Model& model, Method method, double alpha, std::vector<double> grid,
                   double delta, bool parallel) {
  require_alpha(alpha);
  if (grid.empty()) throw Error(ErrorKind::precondition, "empty eta grid");
  for (double eta : grid) model.family.require_admissible(eta);
  std::sort(grid.begin(), grid.end());
  const LatticeSupport& s = model.family.support();
  if (!s.lo) {
    throw Error(ErrorKind::unbounded_enumeration, "outcomes unbounded below cannot be enumerated");
  }
  const Index first = *s.lo;
  const Index last = upper_outcome(model, grid.back());
  IntervalTable table = parallel ? interval_table(model, method, alpha, first, last, delta)
                                 : interval_table_serial(model, method, alpha, first, last, delta);
  grid = audit_grid(std::move(grid), table);
  return {std::move(grid), std::move(table)};
}

CoverageReport empty_report(const Model& model, Method method, double alpha,
                            std::vector<double> grid) {
  CoverageReport r;
  r.method = method;
  r.alpha = alpha;
  r.grid = std::move(grid);
  r.natural.resize(r.grid.size());
  std::transform(r.grid.begin(), r.grid.end(), r.natural.begin(),
                 [&](double eta) { return model.to_natural(eta); });
  r.coverage.resize(r.grid.size());
  r.expected_length.resize(r.grid.size());
  return r;
}

void summarize(CoverageReport& r) {
  r.min_coverage = r.coverage.empty() ? 1.0 : *std::min_element(r.coverage.begin(), r.coverage.end());
}

void require_range(const Model& model, Index first, Index last) {
  if (first > last) throw Error(ErrorKind::precondition, "empty outcome range");
  model.family.require_in_support(first);
  model.family.require_in_support(last);
}

}  // namespace

IntervalTable interval_table(const Model& model, Method method, double alpha, Index first,
                             Index last, double delta) {
  require_range(model, first, last);
  IntervalTable t{method, alpha, first, {}};
  t.intervals.resize(static_cast<std::size_t>(last - first + 1));
  parallel_for(t.intervals.size(), [&](std::size_t i) {
    t.intervals[i] =
        confidence_interval(model, method, first + static_cast<Index>(i), alpha, delta);
  });
  return t;
}

IntervalTable interval_table_serial(const Model& model, Method method, double alpha, Index first,
                                    Index last, double delta) {
  require_range(model, first, last);
  IntervalTable t{method, alpha, first, {}};
  for (Index x = first; x <= last; ++x) {
    t.intervals.push_back(confidence_interval(model, method, x, alpha, delta));
  }
  return t;
}

std::vector<double> audit_grid(std::vector<double> grid, const IntervalTable& table) {
  if (grid.empty()) return grid;
  std::sort(grid.begin(), grid.end());
  const double lo = grid.front();
  const double hi = grid.back();
  for (const ConfidenceInterval& ci : table.intervals) {
    for (double e : {ci.theta_lo, ci.theta_hi}) {
      if (std::isfinite(e) && e >= lo && e <= hi) grid.push_back(e);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

CoverageReport exact_coverage(const Model& model, Method method, double alpha,
                              std::vector<double> grid, double delta) {
  AuditSetup setup = prepare(model, method, alpha, std::move(grid), delta, true);
  CoverageReport r = empty_report(model, method, alpha, std::move(setup.grid));
  parallel_for(r.grid.size(), [&](std::size_t i) {
    const CoveragePoint c = coverage_at(model, setup.table, r.grid[i]);
    r.coverage[i] = c.coverage;
    r.expected_length[i] = c.expected_length;
  });
  summarize(r);
  return r;
}

CoverageReport exact_coverage_serial(const Model& model, Method method, double alpha,
                                     std::vector<double> grid, double delta) {
  AuditSetup setup = prepare(model, method, alpha, std::move(grid), delta, false);
  CoverageReport r = empty_report(model, method, alpha, std::move(setup.grid));
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const CoveragePoint c = coverage_at(model, setup.table, r.grid[i]);
    r.coverage[i] = c.coverage;
    r.expected_length[i] = c.expected_length;
  }
  summarize(r);
  return r;
}

std::vector<double> natural_grid(const Model& model, double from, double to, std::size_t points) {
  if (points < 2 || !(from < to)) {
    throw Error(ErrorKind::precondition, "grid needs at least two points and from < to");
  }
  std::vector<double> grid(points);
  const double step = (to - from) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double v = i + 1 == points ? to : from + step * static_cast<double>(i);
    grid[i] = model.to_theta(v);
  }
  return grid;
}

std::vector<LengthRow> length_table(const Model& model, const std::vector<Method>& methods,
                                    double alpha, const std::vector<Index>& xs, double delta) {
  std::vector<LengthRow> rows;
  rows.reserve(xs.size() * methods.size());
  for (Index x : xs) {
    for (Method m : methods) {
      const ConfidenceInterval ci = confidence_interval(model, m, x, alpha, delta);
      rows.push_back({x, m, ci.natural_lo, ci.natural_hi, ci.natural_hi - ci.natural_lo});
    }
  }
  return rows;
}

namespace {

void put(std::ostream& out, double v) {
  if (std::isinf(v)) {
    out << (v > 0 ? "inf" : "-inf");
  } else {
    out << v;
  }
}

}  // namespace

void write_coverage_csv(std::ostream& out, const CoverageReport& report) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "eta,natural_param,coverage,expected_length\n";
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    put(out, report.grid[i]);
    out << ',';
    put(out, report.natural[i]);
    out << ',';
    put(out, report.coverage[i]);
    out << ',';
    put(out, report.expected_length[i]);
    out << '\n';
  }
  out.precision(old);
}

void write_length_csv(std::ostream& out, const std::vector<LengthRow>& rows) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "x,method,natural_lo,natural_hi,length\n";
  for (const LengthRow& r : rows) {
    out << r.x << ',' << to_string(r.method) << ',';
    put(out, r.natural_lo);
    out << ',';
    put(out, r.natural_hi);
    out << ',';
    put(out, r.length);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace exactci
