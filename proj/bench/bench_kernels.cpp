// Timing comparison of the serial reference kernels against their OpenMP
// counterparts, plus an agreement check: the parallel path must reproduce the
// serial sums to within the parallel_sum tolerance (and is bitwise stable
// across thread counts by construction).
//
// Usage: bench_kernels [reps]   (default 5; best-of-reps is reported)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <span>
#include <string>
#include <vector>

#include "disclosure/equilibrium.hpp"
#include "disclosure/game.hpp"
#include "disclosure/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace disclosure;
using Clock = std::chrono::steady_clock;

namespace {

template <typename Fn>
double best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    fn();
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs < best) best = secs;
  }
  return best;
}

void bench_outcome_sums(int reps) {
  // the block path wins even on one thread: it builds the outcome
  // probabilities via shared prefix tables (O(2^m) work) where the flat
  // reference recomputes the m-factor product per outcome (O(m 2^m))
  std::printf("outcome enumeration kernel (2^m weighted sums)\n");
  std::printf("%4s %14s %14s %9s %12s\n", "m", "flat ref (s)", "block+omp (s)", "speedup",
              "|diff|");
  for (std::size_t m : {16, 18, 20, 22, 24}) {
    Rng rng(100 + m);
    std::vector<double> probs(m);
    for (auto& p : probs) p = rng.uniform();
    const auto w1 = detail::reward_table(2.0, 0.71, m + 1);
    const auto w0 = detail::reward_table(2.0, 0.71, m);

    std::pair<double, double> rs, rp;
    const double ts = best_of(reps, [&] {
      rs = detail::outcome_sums_serial(probs, std::span(w1).subspan(1), w0, 0);
    });
    const double tp = best_of(reps, [&] {
      rp = detail::outcome_sums_parallel(probs, std::span(w1).subspan(1), w0, 0);
    });
    const double diff =
        std::max(std::abs(rs.first - rp.first), std::abs(rs.second - rp.second));
    std::printf("%4zu %14.6f %14.6f %8.2fx %12.3e\n", m, ts, tp, ts / tp, diff);
  }
}

void bench_brute_force(int reps) {
  std::printf("\npure-equilibrium brute force (2^n profiles, n deviation checks each)\n");
  std::printf("%4s %14s %14s %9s %7s\n", "n", "serial (s)", "parallel (s)", "speedup", "count");
  for (std::size_t n : {14, 16, 18, 20}) {
    Rng rng(200 + n);
    std::vector<double> beta(n);
    for (auto& b : beta) b = rng.uniform(0.0, 4.0);
    GameSpec g(rng.uniform(1.0, 6.0), rng.uniform(0.3, 1.2), beta);

    std::vector<DisclosureOutcome> out_s, out_p;
    BruteForceOptions opts;
    const double ts = best_of(reps, [&] {
      opts.exec = Exec::serial;
      out_s = brute_force_pure_equilibria(g, opts);
    });
    const double tp = best_of(reps, [&] {
      opts.exec = Exec::parallel;
      out_p = brute_force_pure_equilibria(g, opts);
    });
    const bool agree = out_s.size() == out_p.size();
    std::printf("%4zu %14.6f %14.6f %8.2fx %6zu%s\n", n, ts, tp, ts / tp, out_s.size(),
                agree ? "" : "  MISMATCH");
  }
}

void bench_solver(int reps) {
  std::printf("\nsupport-enumeration solver (3^n patterns)\n");
  std::printf("%4s %14s %7s\n", "n", "solve (s)", "eq");
  for (std::size_t n : {6, 8, 10}) {
    Rng rng(300 + n);
    const GameSpec g = [&] {
      std::vector<double> beta(n);
      for (auto& b : beta) b = rng.uniform(0.0, 6.0);
      return GameSpec(rng.uniform(0.5, 8.0), rng.uniform(0.3, 1.4), beta);
    }();
    EquilibriumReport report;
    const double t = best_of(reps, [&] { report = solve_equilibria(g); });
    std::printf("%4zu %14.6f %6zu\n", n, t, report.certificates.size());
  }
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d; best of %d reps\n\n", omp_get_max_threads(),
              reps);
#else
  std::printf("OpenMP not available, parallel paths fall back to serial; best of %d reps\n\n",
              reps);
#endif
  bench_outcome_sums(reps);
  bench_brute_force(reps);
  bench_solver(reps);
  return 0;
}
