#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>

#include "exactci/cli.hpp"
#include "exactci/sterne.hpp"

using namespace exactci;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double as_double(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>() == "inf" ? kInf : -kInf;
  return j.get<double>();
}

}  // namespace

TEST_CASE("odds ratio text output") {
  const Run r = run({"oddsratio", "--y1", "42", "--n1", "49", "--y2", "203", "--n2", "317",
                     "--alpha", "0.05", "--method", "all"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("estimate 3.1884") != std::string::npos);
  CHECK(r.out.find("[1.4427, 8.0213]") != std::string::npos);
  CHECK(r.out.find("[1.4332, 9.159") != std::string::npos);
  CHECK(r.out.find("sterne") != std::string::npos);
  CHECK(r.out.find("clopper-pearson") != std::string::npos);
}

TEST_CASE("poisson text output") {
  const Run r = run({"poisson", "--x", "3", "--alpha", "0.05", "--method", "sterne"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("[0.8176, 8.8077]") != std::string::npos);
}

TEST_CASE("json round trip") {
  const Run r = run({"binomial", "--n", "20", "--x", "5", "--format", "json"});
  REQUIRE(r.code == 0);
  const nlohmann::json all = nlohmann::json::parse(r.out);
  REQUIRE(all.is_array());
  CHECK(all.size() == 4);
  const Model m = make_binomial(20);
  for (const auto& j : all) {
    for (const char* key :
         {"model", "x", "alpha", "method", "theta", "natural", "endpoint_pvalues", "delta"}) {
      CHECK(j.contains(key));
    }
    CHECK(j["model"]["kind"] == "binomial");
    CHECK(j["model"]["n"] == 20);
    const std::string name = j["method"];
    Method method = Method::sterne;
    if (name == "lower") method = Method::lower;
    if (name == "upper") method = Method::upper;
    if (name == "clopper_pearson") method = Method::clopper_pearson;
    const ConfidenceInterval ci = confidence_interval(m, method, j["x"].get<Index>(),
                                                      j["alpha"].get<double>(),
                                                      j["delta"].get<double>());
    const double delta = j["delta"];
    const double lo = as_double(j["theta"][0]);
    const double hi = as_double(j["theta"][1]);
    if (std::isinf(lo)) CHECK(lo == ci.theta_lo); else CHECK(std::abs(lo - ci.theta_lo) <= delta);
    if (std::isinf(hi)) CHECK(hi == ci.theta_hi); else CHECK(std::abs(hi - ci.theta_hi) <= delta);
    CHECK(std::abs(j["natural"][0].get<double>() - ci.natural_lo) <= delta);
  }
}

TEST_CASE("single method json is an object with string infinities") {
  const Run r = run({"poisson", "--x", "0", "--method", "cp", "--format", "json"});
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j.is_object());
  CHECK(j["theta"][0] == "-inf");
  CHECK(j["natural"][0] == 0.0);
  CHECK(std::abs(j["natural"][1].get<double>() - 3.6889) < 5e-4);
}

TEST_CASE("interval csv") {
  const Run r = run({"binomial", "--n", "10", "--x", "0", "--format", "csv", "--method", "all"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  CHECK(rows[0].size() == 9);
  CHECK(rows[0][0] == "method");
  CHECK(rows.size() == 5);
  CHECK(r.out.find("-inf") != std::string::npos);
}

TEST_CASE("binomial curve crossings") {
  const Run r = run({"binomial", "--n", "20", "--x", "5", "--curve", "--from", "0.01", "--to",
                     "0.7", "--points", "500"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows[0] == std::vector<std::string>{"natural_param", "pvalue", "side"});
  std::vector<double> up;
  std::vector<double> down;
  double prev_p = 0.0;
  double prev_v = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double v = std::stod(rows[i][0]);
    const double p = std::stod(rows[i][1]);
    CHECK(v >= prev_v);
    if (i > 1 && prev_p <= 0.05 && p > 0.05) up.push_back(v);
    if (i > 1 && prev_p > 0.05 && p <= 0.05) down.push_back(prev_v);
    prev_p = p;
    prev_v = v;
  }
  REQUIRE(up.size() == 1);
  REQUIRE(down.size() == 1);
  CHECK(std::abs(up[0] - 0.104) < 2e-3);
  CHECK(std::abs(down[0] - 0.475) < 2e-3);
}

TEST_CASE("curve lists every jump with both limits") {
  const Run r = run({"curve", "--model", "binomial", "--n", "12", "--x", "4", "--from", "0.001",
                     "--to", "0.999", "--points", "50"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  const LatticeFamily f = make_binomial(12).family;
  for (Index k = 0; k <= 12; ++k) {
    if (k == 4) continue;
    const double v = logistic(f.special_param(4, k));
    if (v < 0.001 || v > 0.999) continue;
    int left = 0;
    int right = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (std::abs(std::stod(rows[i][0]) - v) > 1e-15) continue;
      if (rows[i][2] == "left") {
        ++left;
        CHECK(std::abs(std::stod(rows[i][1]) - sterne_pvalue(f, 4, f.special_param(4, k), Side::left).value) < 1e-15);
      }
      if (rows[i][2] == "right") ++right;
    }
    CHECK(left == 1);
    CHECK(right == 1);
  }
}

TEST_CASE("audit output") {
  const Run r = run({"audit", "--model", "binomial", "--n", "20", "--method", "cp", "--points",
                     "51"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  CHECK(rows[0] == std::vector<std::string>{"eta", "natural_param", "coverage", "expected_length"});
  CHECK(rows.size() > 52);

  const Run t = run({"audit", "--model", "oddsratio", "--n1", "49", "--n2", "317", "--s", "245",
                     "--format", "text"});
  REQUIRE(t.code == 0);
  CHECK(t.out.find("min coverage=0.95") != std::string::npos);

  const Run l = run({"audit", "--model", "poisson", "--lengths", "--x-max", "3"});
  REQUIRE(l.code == 0);
  CHECK(csv(l.out).size() == 1 + 4 * 4);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code != 1);
  CHECK(run({"binomial", "--x", "3"}).code == 2);
  CHECK(run({"binomial", "--n", "5", "--x", "9"}).code == 2);
  CHECK(run({"binomial", "--n", "5", "--x", "2", "--alpha", "1.5"}).code == 2);
  CHECK(run({"binomial", "--n", "5", "--x", "2", "--method", "wald"}).code == 2);
  CHECK(run({"binomial", "--n", "5", "--x", "2", "--format", "xml"}).code == 2);
  CHECK(run({"binomial", "--n", "5", "--x", "2", "--delta", "0"}).code == 2);
  CHECK(run({"poisson", "--x", "-1"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"curve", "--n", "5", "--x", "1"}).code == 2);
  CHECK(run({"binomial", "--n", "5", "--x", "1", "--curve", "--from", "0.5", "--to", "0.1"}).code ==
        2);
  CHECK(run({"oddsratio", "--y1", "0", "--n1", "3", "--y2", "0", "--n2", "3"}).code == 2);
  const Run r = run({"binomial", "--n", "0", "--x", "0"});
  CHECK(r.code == 2);
  CHECK(r.err.find("usage") != std::string::npos);
}

TEST_CASE("computation errors exit 1") {
  const Run big = run({"poisson", "--x", "1000000000000000"});
  CHECK(big.code == 1);
  CHECK(big.err.find("UnboundedEnumeration") != std::string::npos);
}

TEST_CASE("help exits 0") {
  const Run r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("binomial") != std::string::npos);
}
