#pragma once

// Exact evaluation of the disclosure game: pure payoffs, expected utilities
// by outcome enumeration, and the C1/C0 contraction coefficients.
//
// Every function here is a pure function of its arguments and safe to call
// concurrently. The enumeration kernels have a serial reference path and an
// OpenMP path; the two agree to within Tolerances::parallel_sum.

#include <cstddef>
#include <span>
#include <utility>

#include "disclosure/types.hpp"

namespace disclosure {

// Payoff to player j under a realized pure outcome:
//   A * (sum_k delta_k)^gamma - beta_j * delta_j,  with 0^gamma = 0.
double pure_payoff(const GameSpec& g, const DisclosureOutcome& outcome, std::size_t j);

// Expected utility of player j under mixed profile x, by enumeration of all
// 2^n outcomes (pure coordinates collapse to their single possible branch).
// Throws EnumerationCapError when n exceeds opts.enum_cap.
double expected_utility(const GameSpec& g, const StrategyProfile& x, std::size_t j,
                        const EvalOptions& opts = {});

// Player j's expected payoff when disclosing (c1) and when withholding (c0),
// given the other players' probabilities x_others (players 0..n-1, j skipped):
//   c1 = E[A (1 + S)^gamma] - beta_j,   c0 = E[A S^gamma],
// where S is the number of disclosing opponents. Enumerates 2^(n-1) branches.
struct ContractionCoefficients {
  double c1 = 0.0;
  double c0 = 0.0;
};
ContractionCoefficients contraction_coefficients(const GameSpec& g,
                                                 std::span<const double> x_others, std::size_t j,
                                                 const EvalOptions& opts = {});

// d u_j / d x_j = c1 - c0. Independent of x_j itself (the game is multilinear).
double marginal_utility(const GameSpec& g, const StrategyProfile& x, std::size_t j,
                        const EvalOptions& opts = {});

namespace detail {

// Sum over delta in {0,1}^m of weight[s0 + popcount(delta)] * prod_k p-factor,
// where the k-th factor is probs[k] when the bit is set and 1-probs[k]
// otherwise. Both weight spans are accumulated in one pass; pass an empty
// second span when only one sum is needed.
//
// The serial version is the reference: flat binary counting over the mask with
// compensated accumulation. The parallel version partitions the mask space
// into fixed blocks (independent of thread count) so its result does not
// depend on how many workers ran.
std::pair<double, double> outcome_sums_serial(std::span<const double> probs,
                                              std::span<const double> weight_a,
                                              std::span<const double> weight_b, std::size_t s0);
std::pair<double, double> outcome_sums_parallel(std::span<const double> probs,
                                                std::span<const double> weight_a,
                                                std::span<const double> weight_b, std::size_t s0);
std::pair<double, double> outcome_sums(std::span<const double> probs,
                                       std::span<const double> weight_a,
                                       std::span<const double> weight_b, std::size_t s0,
                                       Exec exec);

// A * s^gamma for s = 0..max_count, with 0^gamma = 0.
std::vector<double> reward_table(double a, double gamma, std::size_t max_count);

}  // namespace detail

}  // namespace disclosure
