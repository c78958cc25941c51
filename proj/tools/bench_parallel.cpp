#include <chainz2/fock.hpp>
#include <chainz2/par.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <vector>

using namespace chainz2;

namespace {

double time_best(int reps, const std::function<void()>& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int L = 12;
  if (argc > 1) L = std::atoi(argv[1]);

  const FockOperator h = assemble(L, kst_terms(L, 1.0, 0.5, 1.0, true));
  const int dim = static_cast<int>(h.op.rows());
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec x(dim);
  for (int i = 0; i < dim; ++i) x(i) = cplx(gauss(rng), gauss(rng));
  x /= x.norm();

  const CVec ref = par::spmv_serial(h.op, x);
  const CVec par_y = par::spmv(h.op, x);
  const double diff = (ref - par_y).norm();

  double sink = 0.0;
  const double t_serial = time_best(20, [&] {
    sink += par::spmv_serial(h.op, x)(0).real();
  });
  const double t_par = time_best(20, [&] {
    sink += par::spmv(h.op, x)(0).real();
  });
  std::printf("spmv L=%d dim=%d nnz=%ld threads=%d\n", L, dim,
              static_cast<long>(h.op.nonZeros()), par::threads());
  std::printf("  serial   %10.3f us\n", 1e6 * t_serial);
  std::printf("  parallel %10.3f us  speedup %.2fx  max_diff %.2e\n",
              1e6 * t_par, t_serial / std::max(t_par, 1e-12), diff);

  std::vector<double> alphas;
  const double pi = std::acos(-1.0);
  for (int i = 0; i < 9; ++i) alphas.push_back(pi * i / 8.0);
  par::set_threads(1);
  const double t_one = time_best(3, [&] {
    sink += flux_sweep(8, 1.0, 0.5, 1.0, alphas).front().E0;
  });
  par::set_threads(0);
  const double t_all = time_best(3, [&] {
    sink += flux_sweep(8, 1.0, 0.5, 1.0, alphas).front().E0;
  });
  std::printf("flux_sweep L=8 (9 points)\n");
  std::printf("  1 thread %10.3f ms\n", 1e3 * t_one);
  std::printf("  default  %10.3f ms  speedup %.2fx\n", 1e3 * t_all,
              t_one / std::max(t_all, 1e-12));
  if (sink == 12345.6789) std::printf("#\n");
  return diff < 1e-10 ? 0 : 1;
}
