// Compares the serial reference kernels against the OpenMP variants:
// dense complex multiply, operator assembly, and a slice of the
// fundamental-identity suite.

#include <chrono>
#include <cstdio>
#include <string>

#include "jbstar/isometry.hpp"
#include "jbstar/rng.hpp"
#include "jbstar/suites.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace jbstar;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

CMatrix random_matrix(int n, std::uint64_t seed) {
  Rng rng(seed);
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.complex_normal();
  return m;
}

double bench_gemm(int n, int reps, bool parallel) {
  CMatrix a = random_matrix(n, 1), b = random_matrix(n, 2);
  auto t0 = clock_type::now();
  double sink = 0.0;
  for (int r = 0; r < reps; ++r) {
    CMatrix c = parallel ? kernels::gemm_parallel(a, b) : kernels::gemm_serial(a, b);
    sink += c(0, 0).real();
  }
  const double dt = seconds_since(t0);
  std::printf("  gemm %dx%d x%d (%s): %.3f s  (checksum %.3g)\n", n, n, reps,
              parallel ? "parallel" : "serial  ", dt, sink);
  return dt;
}

double bench_operator_assembly(const ModelPtr& m, int reps, bool parallel) {
  kernels::set_parallel_enabled(parallel);
  Element a = random_unitary(m, 3);
  auto t0 = clock_type::now();
  double sink = 0.0;
  for (int r = 0; r < reps; ++r) sink += u_operator(a).op_norm();
  const double dt = seconds_since(t0);
  std::printf("  u-operator on %s x%d (%s): %.3f s  (checksum %.3g)\n", m->name().c_str(), reps,
              parallel ? "parallel" : "serial  ", dt, sink);
  return dt;
}

double bench_suite(bool parallel) {
  kernels::set_parallel_enabled(parallel);
  JobConfig cfg;
  cfg.suites = {"fundamental-identity"};
  cfg.models = {"matrix:6"};
  cfg.trials = 100;
  cfg.seed = 11;
  auto t0 = clock_type::now();
  SuiteReport rep = cmd_verify(cfg);
  const double dt = seconds_since(t0);
  std::printf("  fundamental-identity suite, matrix:6 x100 (%s): %.3f s [%s]\n",
              parallel ? "parallel" : "serial  ", dt, rep.aggregate.c_str());
  return dt;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel variants run serially\n");
#endif
  std::printf("dense multiply:\n");
  for (int n : {48, 64, 96}) {
    const double s = bench_gemm(n, 200, false);
    const double p = bench_gemm(n, 200, true);
    std::printf("    speedup %.2fx\n", s / p);
  }
  std::printf("operator assembly:\n");
  ModelPtr m6 = AlgebraModel::matrix(6);
  ModelPtr al = AlgebraModel::albert();
  for (const ModelPtr& m : {m6, al}) {
    const double s = bench_operator_assembly(m, 50, false);
    const double p = bench_operator_assembly(m, 50, true);
    std::printf("    speedup %.2fx\n", s / p);
  }
  std::printf("suite slice:\n");
  const double s = bench_suite(false);
  const double p = bench_suite(true);
  std::printf("    speedup %.2fx\n", s / p);
  kernels::set_parallel_enabled(true);
  return 0;
}
