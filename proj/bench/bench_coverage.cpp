// Times the OpenMP coverage audit against the serial reference on the
// workloads used by the acceptance suite.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "exactci/coverage.hpp"

using namespace exactci;

namespace {

double seconds(const std::function<void()>& body, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) body();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void compare(const std::string& label, const Model& model, Method method,
             const std::vector<double>& grid, int reps) {
  double serial_min = 0.0;
  double parallel_min = 0.0;
  const double ts = seconds(
      [&] { serial_min = exact_coverage_serial(model, method, 0.05, grid).min_coverage; }, reps);
  const double tp = seconds(
      [&] { parallel_min = exact_coverage(model, method, 0.05, grid).min_coverage; }, reps);
  std::printf("%-28s %-16s serial %9.4f ms  openmp %9.4f ms  speedup %5.2fx  %s\n",
              label.c_str(), std::string(to_string(method)).c_str(), ts * 1e3, tp * 1e3, ts / tp,
              serial_min == parallel_min ? "same" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::stoi(argv[1]) : 3;
  std::printf("threads: %d\n", omp_get_max_threads());
  for (Index n : {20, 50, 200}) {
    const Model m = make_binomial(n);
    const auto grid = natural_grid(m, 0.0005, 0.9995, 501);
    for (Method method : {Method::clopper_pearson, Method::sterne}) {
      compare("binomial n=" + std::to_string(n), m, method, grid, reps);
    }
  }
  const Model table6 = make_odds_ratio(49, 317, 245);
  std::vector<double> grid(501);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = -6.0 + 12.0 * i / 500.0;
  for (Method method : {Method::clopper_pearson, Method::sterne}) {
    compare("odds ratio 49/317/245", table6, method, grid, reps);
  }
  const Model poisson = make_poisson();
  const auto pgrid = natural_grid(poisson, 0.01, 30.0, 501);
  compare("poisson", poisson, Method::sterne, pgrid, reps);
  return 0;
}
