#include "disclosure/game.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace disclosure {

namespace detail {

std::vector<double> reward_table(double a, double gamma, std::size_t max_count) {
  std::vector<double> w(max_count + 1);
  w[0] = 0.0;  // 0^gamma = 0 for gamma > 0
  for (std::size_t s = 1; s <= max_count; ++s) w[s] = a * std::pow(double(s), gamma);
  return w;
}

namespace {

// Parallel path switches on once the free-coordinate count is large enough
// that one block per outer index amortizes the thread start-up.
constexpr std::size_t kParallelMinBits = 14;
constexpr std::size_t kBlockBits = 10;

// Probability of each sub-outcome of the block coords [first, first+bits):
// table[mask] = prod over the block of (bit set ? p : 1-p).
void block_products(std::span<const double> probs, std::size_t first, std::size_t bits,
                    std::vector<double>& table) {
  table.assign(std::size_t{1} << bits, 1.0);
  for (std::size_t k = 0; k < bits; ++k) {
    const double p = probs[first + k];
    const std::size_t half = std::size_t{1} << k;
    for (std::size_t m = 0; m < half; ++m) {
      table[m | half] = table[m] * p;
      table[m] *= (1.0 - p);
    }
  }
}

}  // namespace

std::pair<double, double> outcome_sums_serial(std::span<const double> probs,
                                              std::span<const double> weight_a,
                                              std::span<const double> weight_b, std::size_t s0) {
  const std::size_t m = probs.size();
  const bool two = !weight_b.empty();
  KahanSum acc_a, acc_b;
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double p = 1.0;
    for (std::size_t k = 0; k < m; ++k) p *= ((mask >> k) & 1u) ? probs[k] : 1.0 - probs[k];
    const std::size_t s = s0 + std::size_t(std::popcount(mask));
    acc_a.add(weight_a[s] * p);
    if (two) acc_b.add(weight_b[s] * p);
  }
  return {acc_a.value(), acc_b.value()};
}

std::pair<double, double> outcome_sums_parallel(std::span<const double> probs,
                                                std::span<const double> weight_a,
                                                std::span<const double> weight_b, std::size_t s0) {
  const std::size_t m = probs.size();
  if (m <= kBlockBits) return outcome_sums_serial(probs, weight_a, weight_b, s0);

  const bool two = !weight_b.empty();
  const std::size_t lo_bits = kBlockBits;
  const std::size_t hi_bits = m - lo_bits;
  const std::size_t n_blocks = std::size_t{1} << hi_bits;

  std::vector<double> lo_prob;
  block_products(probs, 0, lo_bits, lo_prob);
  std::vector<double> hi_prob;
  block_products(probs, lo_bits, hi_bits, hi_prob);

  // One partial sum per hi-block; combined serially afterwards so the result
  // is identical for any thread count.
  std::vector<double> part_a(n_blocks), part_b(two ? n_blocks : 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t h = 0; h < std::int64_t(n_blocks); ++h) {
    const double ph = hi_prob[std::size_t(h)];
    const std::size_t sh = s0 + std::size_t(std::popcount(std::uint64_t(h)));
    KahanSum a, b;
    for (std::size_t l = 0; l < lo_prob.size(); ++l) {
      const double p = ph * lo_prob[l];
      const std::size_t s = sh + std::size_t(std::popcount(std::uint64_t(l)));
      a.add(weight_a[s] * p);
      if (two) b.add(weight_b[s] * p);
    }
    part_a[std::size_t(h)] = a.value();
    if (two) part_b[std::size_t(h)] = b.value();
  }

  KahanSum acc_a, acc_b;
  for (std::size_t h = 0; h < n_blocks; ++h) {
    acc_a.add(part_a[h]);
    if (two) acc_b.add(part_b[h]);
  }
  return {acc_a.value(), acc_b.value()};
}

std::pair<double, double> outcome_sums(std::span<const double> probs,
                                       std::span<const double> weight_a,
                                       std::span<const double> weight_b, std::size_t s0,
                                       Exec exec) {
  switch (exec) {
    case Exec::serial:
      return outcome_sums_serial(probs, weight_a, weight_b, s0);
    case Exec::parallel:
      return outcome_sums_parallel(probs, weight_a, weight_b, s0);
    case Exec::automatic:
    default:
      if (probs.size() >= kParallelMinBits)
        return outcome_sums_parallel(probs, weight_a, weight_b, s0);
      return outcome_sums_serial(probs, weight_a, weight_b, s0);
  }
}

namespace {

void check_cap(std::size_t n, const EvalOptions& opts, const char* op) {
  if (n > opts.enum_cap)
    throw EnumerationCapError(std::string(op) + ": n=" + std::to_string(n) +
                              " exceeds enumeration cap " + std::to_string(opts.enum_cap));
}

// Splits coordinates into free (strictly mixed) probabilities and the count
// of coordinates pinned at 1. Pinned-at-0 coordinates drop out entirely.
struct SplitProfile {
  std::vector<double> free_probs;
  std::size_t fixed_ones = 0;
};

SplitProfile split_pure(std::span<const double> probs) {
  SplitProfile out;
  out.free_probs.reserve(probs.size());
  for (double p : probs) {
    if (p == 1.0)
      ++out.fixed_ones;
    else if (p != 0.0)
      out.free_probs.push_back(p);
  }
  return out;
}

}  // namespace

}  // namespace detail

double pure_payoff(const GameSpec& g, const DisclosureOutcome& outcome, std::size_t j) {
  if (outcome.size() != g.n())
    throw std::invalid_argument("pure_payoff: outcome size does not match game");
  if (j >= g.n()) throw std::out_of_range("pure_payoff: player index out of range");
  const std::size_t s = outcome.count();
  const double reward = s == 0 ? 0.0 : g.a() * std::pow(double(s), g.gamma());
  return reward - g.beta(j) * double(outcome[j]);
}

double expected_utility(const GameSpec& g, const StrategyProfile& x, std::size_t j,
                        const EvalOptions& opts) {
  if (x.size() != g.n())
    throw std::invalid_argument("expected_utility: profile size does not match game");
  if (j >= g.n()) throw std::out_of_range("expected_utility: player index out of range");
  detail::check_cap(g.n(), opts, "expected_utility");

  auto split = detail::split_pure(x.values());
  const auto weights = detail::reward_table(g.a(), g.gamma(), g.n());
  auto [expected_reward, unused] = detail::outcome_sums(
      split.free_probs, weights, {}, split.fixed_ones, opts.exec);
  (void)unused;
  return expected_reward - g.beta(j) * x[j];
}

ContractionCoefficients contraction_coefficients(const GameSpec& g,
                                                 std::span<const double> x_others, std::size_t j,
                                                 const EvalOptions& opts) {
  if (j >= g.n()) throw std::out_of_range("contraction_coefficients: player index out of range");
  if (x_others.size() + 1 != g.n())
    throw std::invalid_argument("contraction_coefficients: expected n-1 opponent probabilities");
  for (double p : x_others)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("contraction_coefficients: probabilities must lie in [0,1]");
  detail::check_cap(g.n(), opts, "contraction_coefficients");

  auto split = detail::split_pure(x_others);
  // weight tables over opponent counts s = 0..n-1: shifted (1+s) and plain s.
  const auto plain = detail::reward_table(g.a(), g.gamma(), g.n());
  std::vector<double> shifted(g.n());
  for (std::size_t s = 0; s + 1 <= g.n(); ++s) shifted[s] = plain[s + 1];

  auto [e1, e0] = detail::outcome_sums(split.free_probs, shifted, plain, split.fixed_ones,
                                       opts.exec);
  return {e1 - g.beta(j), e0};
}

double marginal_utility(const GameSpec& g, const StrategyProfile& x, std::size_t j,
                        const EvalOptions& opts) {
  if (x.size() != g.n())
    throw std::invalid_argument("marginal_utility: profile size does not match game");
  if (j >= g.n()) throw std::out_of_range("marginal_utility: player index out of range");
  std::vector<double> others;
  others.reserve(g.n() - 1);
  for (std::size_t k = 0; k < g.n(); ++k)
    if (k != j) others.push_back(x[k]);
  auto c = contraction_coefficients(g, others, j, opts);
  return c.c1 - c.c0;
}

}  // namespace disclosure
