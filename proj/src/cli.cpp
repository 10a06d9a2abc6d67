#include "exactci/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "exactci/coverage.hpp"
#include "exactci/sterne.hpp"

namespace exactci::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string model;
  std::optional<Index> n, x, y1, n1, y2, n2, s;
  double alpha = 0.05;
  std::string method;
  double delta = kDefaultDelta;
  std::string format = "text";
  bool curve = false;
  std::optional<double> from, to;
  std::size_t points = 0;
  bool lengths = false;
  std::optional<Index> x_min, x_max;
};

std::vector<Method> parse_methods(const std::string& name) {
  if (name == "all") {
    return {Method::sterne, Method::clopper_pearson, Method::lower, Method::upper};
  }
  if (name == "sterne") return {Method::sterne};
  if (name == "cp" || name == "clopper_pearson") return {Method::clopper_pearson};
  if (name == "lower") return {Method::lower};
  if (name == "upper") return {Method::upper};
  throw UsageError("unknown method '" + name + "'");
}

Index need(const std::optional<Index>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing ") + flag);
  return *v;
}

void check_common(const Options& o) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  if (!(o.delta > 0.0) || std::isinf(o.delta)) throw UsageError("--delta must be positive");
}

struct Problem {
  Model model;
  std::optional<Index> x;
};

// Builds the model named `kind` from the flags. Observed-data commands use
// the 2x2 table flags for odds ratios; audits use the margins.
Problem build(const std::string& kind, const Options& o, bool observed) {
  if (kind == "binomial") {
    const Index n = need(o.n, "--n");
    if (n < 1) throw UsageError("--n must be at least 1");
    Problem p{make_binomial(n), std::nullopt};
    if (observed) {
      const Index x = need(o.x, "--x");
      if (x < 0 || x > n) throw UsageError("--x must lie in 0..n");
      p.x = x;
    }
    return p;
  }
  if (kind == "poisson") {
    Problem p{make_poisson(), std::nullopt};
    if (observed) {
      const Index x = need(o.x, "--x");
      if (x < 0) throw UsageError("--x must be nonnegative");
      p.x = x;
    }
    return p;
  }
  if (kind == "oddsratio") {
    if (observed) {
      TwoByTwoTable t{need(o.y1, "--y1"), need(o.n1, "--n1"), need(o.y2, "--y2"),
                      need(o.n2, "--n2")};
      if (t.n1 < 0 || t.n2 < 0 || t.y1 < 0 || t.y2 < 0 || t.y1 > t.n1 || t.y2 > t.n2) {
        throw UsageError("table counts need 0 <= y1 <= n1 and 0 <= y2 <= n2");
      }
      Problem p{make_odds_ratio(t), t.x()};
      if (p.model.family.support().degenerate()) {
        throw UsageError("the table margins admit a single table; no interval exists");
      }
      return p;
    }
    const Index n1 = need(o.n1, "--n1");
    const Index n2 = need(o.n2, "--n2");
    const Index s = o.s ? *o.s : need(o.y1, "--s") + need(o.y2, "--s");
    if (n1 < 0 || n2 < 0 || s < 0 || s > n1 + n2) throw UsageError("need 0 <= s <= n1 + n2");
    Problem p{make_odds_ratio(n1, n2, s), std::nullopt};
    if (p.model.family.support().degenerate()) {
      throw UsageError("the margins admit a single table; no interval exists");
    }
    return p;
  }
  throw UsageError("unknown model '" + kind + "'");
}

enum class Rounding { nearest, down, up };

// Four-decimal display. Interval endpoints are rounded outward so the
// displayed interval contains the computed one.
std::string fixed4(double v, Rounding r = Rounding::nearest) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (r == Rounding::down) v = std::floor(v * 1e4) / 1e4;
  if (r == Rounding::up) v = std::ceil(v * 1e4) / 1e4;
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << (v == 0.0 ? 0.0 : v);
  return os.str();
}

nlohmann::json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json model_json(const Model& m) {
  nlohmann::json j{{"kind", m.name()}};
  switch (m.spec.kind) {
    case ModelKind::binomial: j["n"] = m.spec.n; break;
    case ModelKind::odds_ratio:
      j["n1"] = m.spec.n1;
      j["n2"] = m.spec.n2;
      j["s"] = m.spec.s;
      break;
    default: break;
  }
  return j;
}

std::string method_label(Method m) {
  return m == Method::clopper_pearson ? "clopper-pearson" : std::string(to_string(m));
}

void emit_intervals(const Problem& p, const Options& o, std::ostream& out) {
  const Index x = *p.x;
  std::vector<ConfidenceInterval> cis;
  for (Method m : parse_methods(o.method)) {
    cis.push_back(confidence_interval(p.model, m, x, o.alpha, o.delta));
  }

  if (o.format == "json") {
    nlohmann::json all = nlohmann::json::array();
    for (const ConfidenceInterval& ci : cis) {
      all.push_back({{"model", model_json(p.model)},
                     {"x", x},
                     {"alpha", o.alpha},
                     {"method", std::string(to_string(ci.method))},
                     {"theta", {number(ci.theta_lo), number(ci.theta_hi)}},
                     {"natural", {number(ci.natural_lo), number(ci.natural_hi)}},
                     {"endpoint_pvalues", {ci.achieved[0], ci.achieved[1]}},
                     {"delta", o.delta}});
    }
    out << (all.size() == 1 ? all[0] : all).dump(2) << '\n';
    return;
  }

  if (o.format == "csv") {
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "method,x,alpha,theta_lo,theta_hi,natural_lo,natural_hi,pvalue_lo,pvalue_hi\n";
    auto put = [&](double v) -> std::ostream& {
      if (std::isinf(v)) return out << (v > 0 ? "inf" : "-inf");
      return out << v;
    };
    for (const ConfidenceInterval& ci : cis) {
      out << to_string(ci.method) << ',' << x << ',' << o.alpha << ',';
      put(ci.theta_lo) << ',';
      put(ci.theta_hi) << ',';
      put(ci.natural_lo) << ',';
      put(ci.natural_hi) << ',';
      put(ci.achieved[0]) << ',';
      put(ci.achieved[1]) << '\n';
    }
    return;
  }

  out << "model " << p.model.name();
  if (p.model.spec.kind == ModelKind::binomial) out << " n=" << p.model.spec.n;
  if (p.model.spec.kind == ModelKind::odds_ratio) {
    out << " n1=" << p.model.spec.n1 << " n2=" << p.model.spec.n2 << " s=" << p.model.spec.s;
  }
  out << "  x=" << x << "  alpha=" << o.alpha << '\n';
  out << "estimate " << fixed4(p.model.point_estimate(x)) << '\n';
  for (const ConfidenceInterval& ci : cis) {
    out << std::left << std::setw(16) << method_label(ci.method) << " natural ["
        << fixed4(ci.natural_lo, Rounding::down) << ", " << fixed4(ci.natural_hi, Rounding::up)
        << "]  theta [" << fixed4(ci.theta_lo, Rounding::down) << ", "
        << fixed4(ci.theta_hi, Rounding::up) << "]  endpoint p-values ["
        << fixed4(ci.achieved[0]) << ", " << fixed4(ci.achieved[1]) << "]\n";
  }
}

struct CurveRow {
  double natural;
  double pvalue;
  int order;  // sample 1, left limit 0, right limit 2 at equal abscissae
};

std::pair<double, double> default_range(const Model& m, std::optional<Index> x) {
  switch (m.spec.kind) {
    case ModelKind::binomial: return {0.001, 0.999};
    case ModelKind::poisson: {
      const double c = x ? static_cast<double>(*x) : 10.0;
      return {0.001, c + 6.0 * std::sqrt(c + 1.0) + 5.0};
    }
    default: {
      if (!x) return {0.01, 100.0};
      const double est = m.point_estimate(*x);
      return {est / 20.0, est * 20.0};
    }
  }
}

void emit_curve(const Problem& p, const Options& o, std::ostream& out) {
  const Index x = *p.x;
  const LatticeFamily& f = p.model.family;
  auto [from, to] = default_range(p.model, x);
  if (o.from) from = *o.from;
  if (o.to) to = *o.to;
  const std::size_t points = o.points ? o.points : 200;
  if (!(from < to)) throw UsageError("--from must be below --to");
  if (points < 2) throw UsageError("--points must be at least 2");
  if (from < 0.0 || (p.model.spec.kind == ModelKind::binomial && to > 1.0)) {
    throw UsageError("curve range outside the parameter space");
  }

  std::vector<CurveRow> rows;
  const double step = (to - from) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double v = i + 1 == points ? to : from + step * static_cast<double>(i);
    const double theta = p.model.to_theta(v);
    rows.push_back({v, sterne_pvalue(f, x, theta).value, 1});
  }

  auto add_jump = [&](Index k) {
    const double theta = f.special_param(x, k);
    const double v = p.model.to_natural(theta);
    if (v < from || v > to) return false;
    rows.push_back({v, sterne_pvalue(f, x, theta, Side::left).value, 0});
    rows.push_back({v, sterne_pvalue(f, x, theta, Side::right).value, 2});
    return true;
  };
  const LatticeSupport& s = f.support();
  for (Index k = x + 1; !s.hi || k <= *s.hi; ++k) {
    if (p.model.to_natural(f.special_param(x, k)) > to) break;
    add_jump(k);
  }
  for (Index k = x - 1; !s.lo || k >= *s.lo; --k) {
    if (p.model.to_natural(f.special_param(x, k)) < from) break;
    add_jump(k);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
    return a.natural != b.natural ? a.natural < b.natural : a.order < b.order;
  });

  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "natural_param,pvalue,side\n";
  for (const CurveRow& r : rows) {
    const char* side = r.order == 0 ? "left" : r.order == 2 ? "right" : "point";
    out << r.natural << ',' << r.pvalue << ',' << side << '\n';
  }
}

void emit_audit(const Options& o, std::ostream& out) {
  if (o.model.empty()) throw UsageError("audit needs --model");
  const Problem p = build(o.model, o, false);
  const std::string method = o.method.empty() ? (o.lengths ? "all" : "sterne") : o.method;
  const std::vector<Method> methods = parse_methods(method);

  if (o.lengths) {
    const LatticeSupport& s = p.model.family.support();
    const Index lo = o.x_min.value_or(*s.lo);
    const Index hi = o.x_max.value_or(s.hi ? *s.hi : 15);
    if (lo > hi || !s.contains(lo) || !s.contains(hi)) throw UsageError("bad --x-min/--x-max");
    std::vector<Index> xs;
    for (Index x = lo; x <= hi; ++x) xs.push_back(x);
    write_length_csv(out, length_table(p.model, methods, o.alpha, xs, o.delta));
    return;
  }

  if (methods.size() != 1) throw UsageError("coverage audits take a single --method");
  auto [from, to] = default_range(p.model, std::nullopt);
  if (o.from) from = *o.from;
  if (o.to) to = *o.to;
  const std::size_t points = o.points ? o.points : 501;
  if (!(from < to) || points < 2) throw UsageError("bad grid range");
  const CoverageReport r = exact_coverage(p.model, methods.front(), o.alpha,
                                          natural_grid(p.model, from, to, points), o.delta);
  if (o.format == "text") {
    out << "method " << to_string(r.method) << "  alpha=" << o.alpha
        << "  grid points=" << r.grid.size() << "  min coverage=" << std::setprecision(10)
        << r.min_coverage << '\n';
    return;
  }
  write_coverage_csv(out, r);
}

void add_model_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.n, "Binomial number of trials");
  cmd->add_option("--x", o.x, "Observed count");
  cmd->add_option("--y1", o.y1, "Odds ratio: successes in group 1");
  cmd->add_option("--n1", o.n1, "Odds ratio: size of group 1");
  cmd->add_option("--y2", o.y2, "Odds ratio: successes in group 2");
  cmd->add_option("--n2", o.n2, "Odds ratio: size of group 2");
}

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--alpha", o.alpha, "Error level in (0, 1)")->capture_default_str();
  cmd->add_option("--method", o.method, "sterne, cp, lower, upper or all");
  cmd->add_option("--delta", o.delta, "Precision of the Sterne bisection")->capture_default_str();
}

void add_curve_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--from", o.from, "Curve range start (natural scale)");
  cmd->add_option("--to", o.to, "Curve range end (natural scale)");
  cmd->add_option("--points", o.points, "Number of evenly spaced samples");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact confidence bounds in discrete exponential families", "exactci"};
  app.require_subcommand(1);
  Options o;

  const std::vector<std::string> formats{"text", "json", "csv"};
  std::vector<CLI::App*> interval_cmds;
  for (const char* name : {"binomial", "poisson", "oddsratio"}) {
    CLI::App* cmd = app.add_subcommand(name, std::string("Confidence intervals, ") + name + " model");
    add_model_flags(cmd, o);
    add_common_flags(cmd, o);
    add_curve_flags(cmd, o);
    cmd->add_option("--format", o.format, "text, json or csv")
        ->check(CLI::IsMember(formats))
        ->capture_default_str();
    cmd->add_flag("--curve", o.curve, "Emit the Sterne p-value curve as CSV instead");
    interval_cmds.push_back(cmd);
  }

  CLI::App* curve = app.add_subcommand("curve", "Sterne p-value curve as CSV");
  curve->add_option("--model", o.model, "binomial, poisson or oddsratio")->required();
  add_model_flags(curve, o);
  add_curve_flags(curve, o);

  CLI::App* audit = app.add_subcommand("audit", "Exact coverage or interval lengths as CSV");
  audit->add_option("--model", o.model, "binomial, poisson or oddsratio")->required();
  add_model_flags(audit, o);
  audit->add_option("--s", o.s, "Odds ratio: total successes y1 + y2");
  add_common_flags(audit, o);
  add_curve_flags(audit, o);
  audit->add_option("--format", o.format, "csv or text (summary line)")
      ->check(CLI::IsMember(std::vector<std::string>{"text", "csv"}));
  audit->add_flag("--lengths", o.lengths, "Per-x interval lengths instead of coverage");
  audit->add_option("--x-min", o.x_min, "First x for --lengths");
  audit->add_option("--x-max", o.x_max, "Last x for --lengths");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    check_common(o);
    if (audit->parsed()) {
      if (!audit->count("--format")) o.format = "csv";
      emit_audit(o, out);
      return kExitOk;
    }
    if (curve->parsed()) {
      emit_curve(build(o.model, o, true), o, out);
      return kExitOk;
    }
    for (CLI::App* cmd : interval_cmds) {
      if (!cmd->parsed()) continue;
      const Problem p = build(cmd->get_name(), o, true);
      if (o.curve) {
        emit_curve(p, o, out);
      } else {
        if (o.method.empty()) o.method = "all";
        parse_methods(o.method);
        emit_intervals(p, o, out);
      }
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
}

}  // namespace exactci::cli
