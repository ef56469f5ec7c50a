#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "disclosure/game.hpp"
#include "disclosure/rng.hpp"
#include "disclosure/types.hpp"
#include "oracles.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace disclosure;

TEST_CASE("game parameters are validated on construction") {
  CHECK_THROWS_AS(GameSpec(0.0, 0.5, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec(-1.0, 0.5, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec(1.0, 0.0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec(1.0, 0.5, {}), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec(1.0, 0.5, {1.0, -0.1}), std::invalid_argument);
  CHECK_NOTHROW(GameSpec(1.0, 0.5, {0.0, 2.0}));
}

TEST_CASE("strategy profile validates the unit box") {
  CHECK_THROWS_AS(StrategyProfile({0.5, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(StrategyProfile({-0.01}), std::invalid_argument);
  CHECK_THROWS_AS(StrategyProfile(std::vector<double>{}), std::invalid_argument);
  CHECK(StrategyProfile({0.0, 1.0}).is_pure());
  CHECK_FALSE(StrategyProfile({0.0, 0.5}).is_pure());
}

TEST_CASE("outcome masks put player 0 in the low bit") {
  auto out = DisclosureOutcome::from_mask(0b101, 3);
  CHECK(out[0] == 1);
  CHECK(out[1] == 0);
  CHECK(out[2] == 1);
  CHECK(out.count() == 2);
}

TEST_CASE("pure payoff follows A s^gamma - beta delta") {
  GameSpec g(2.0, 0.5, {1.0, 1.0});
  // both disclose: 2 * sqrt(2) - 1
  CHECK(pure_payoff(g, DisclosureOutcome::from_mask(0b11, 2), 0) ==
        doctest::Approx(1.8284271247461903).epsilon(1e-15));
  // nobody disclosing pays and earns nothing
  CHECK(pure_payoff(g, DisclosureOutcome::from_mask(0b00, 2), 0) == 0.0);
  // free riding on the other player's disclosure
  CHECK(pure_payoff(g, DisclosureOutcome::from_mask(0b10, 2), 0) == doctest::Approx(2.0));
  CHECK(pure_payoff(g, DisclosureOutcome::from_mask(0b10, 2), 1) == doctest::Approx(1.0));
}

TEST_CASE("expected utility reduces to the pure payoff at vertices") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = oracle::random_game(rng, 4);
    const auto mask = std::uint32_t(rng.index(16));
    auto outcome = DisclosureOutcome::from_mask(mask, 4);
    auto x = outcome.as_profile();
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(expected_utility(g, x, j) ==
            doctest::Approx(pure_payoff(g, outcome, j)).epsilon(1e-12));
  }
}

TEST_CASE("expected utility matches a direct enumeration oracle") {
  Rng rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng.index(7);
    auto g = oracle::random_game(rng, n);
    auto xv = oracle::random_profile(rng, n);
    StrategyProfile x(xv);
    for (std::size_t j = 0; j < n; ++j)
      CHECK(expected_utility(g, x, j) ==
            doctest::Approx(oracle::expected_utility_direct(g, xv, j)).epsilon(1e-10));
  }
}

TEST_CASE("contraction coefficients split the payoff by own action") {
  GameSpec g(3.0, 1.0, {0.5, 2.0});
  // against a single opponent disclosing with probability 0.25:
  // c1 = 3(0.75*1 + 0.25*2) - 0.5, c0 = 3(0.25*1)
  auto c = contraction_coefficients(g, std::vector<double>{0.25}, 0);
  CHECK(c.c1 == doctest::Approx(3.0 * 1.25 - 0.5).epsilon(1e-14));
  CHECK(c.c0 == doctest::Approx(0.75).epsilon(1e-14));

  // no opponents at all: disclosing earns A minus the cost, withholding zero
  GameSpec solo(4.0, 0.7, {1.5});
  auto cs = contraction_coefficients(solo, std::span<const double>{}, 0);
  CHECK(cs.c1 == doctest::Approx(4.0 - 1.5).epsilon(1e-14));
  CHECK(cs.c0 == 0.0);
}

TEST_CASE("utility decomposes as (c1 - c0) x_j + c0") {
  Rng rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.index(8);
    auto g = oracle::random_game(rng, n);
    auto xv = oracle::random_profile(rng, n);
    StrategyProfile x(xv);
    const std::size_t j = rng.index(n);
    std::vector<double> others;
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) others.push_back(xv[k]);
    auto c = contraction_coefficients(g, others, j);
    const double u = expected_utility(g, x, j);
    CHECK(std::abs(u - ((c.c1 - c.c0) * xv[j] + c.c0)) < 1e-10);
  }
}

TEST_CASE("marginal utility equals a finite difference of the oracle") {
  Rng rng(31);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 1 + rng.index(6);
    auto g = oracle::random_game(rng, n);
    auto xv = oracle::random_profile(rng, n);
    StrategyProfile x(xv);
    const std::size_t j = rng.index(n);
    CHECK(std::abs(marginal_utility(g, x, j) - oracle::marginal_fd(g, xv, j)) < 1e-6);
  }
}

TEST_CASE("marginal utility does not depend on the player's own probability") {
  GameSpec g(2.5, 0.8, {1.0, 2.0, 0.5});
  StrategyProfile a({0.1, 0.4, 0.9});
  StrategyProfile b({0.8, 0.4, 0.9});
  CHECK(marginal_utility(g, a, 0) == doctest::Approx(marginal_utility(g, b, 0)).epsilon(1e-14));
}

TEST_CASE("monte carlo simulation brackets the enumerated expectation") {
  Rng rng(41);
  auto g = oracle::random_game(rng, 5);
  auto xv = oracle::random_profile(rng, 5);
  const double exact = expected_utility(g, StrategyProfile(xv), 2);
  const auto mc = oracle::expected_utility_mc(g, xv, 2, 200000, 99);
  CHECK(std::abs(mc.mean - exact) < 4.0 * mc.std_err);
}

TEST_CASE("serial and parallel kernels agree") {
  Rng rng(47);
  const std::size_t n = 16;
  std::vector<double> probs(n), wa(n + 1), wb(n + 1);
  for (auto& p : probs) p = rng.uniform();
  for (auto& w : wa) w = rng.uniform(-3.0, 3.0);
  for (auto& w : wb) w = rng.uniform(-3.0, 3.0);

  const auto serial = detail::outcome_sums_serial(probs, wa, wb, 0);
  const auto parallel = detail::outcome_sums_parallel(probs, wa, wb, 0);
  CHECK(std::abs(serial.first - parallel.first) < 1e-12);
  CHECK(std::abs(serial.second - parallel.second) < 1e-12);
}

#ifdef _OPENMP
TEST_CASE("parallel kernel result is independent of the thread count") {
  Rng rng(53);
  const std::size_t n = 15;
  std::vector<double> probs(n), wa(n + 1), wb(n + 1);
  for (auto& p : probs) p = rng.uniform();
  for (auto& w : wa) w = rng.uniform(-2.0, 2.0);
  for (auto& w : wb) w = rng.uniform(-2.0, 2.0);

  const int before = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = detail::outcome_sums_parallel(probs, wa, wb, 1);
  omp_set_num_threads(3);
  const auto three = detail::outcome_sums_parallel(probs, wa, wb, 1);
  omp_set_num_threads(before);
  CHECK(one.first == three.first);
  CHECK(one.second == three.second);
}
#endif

TEST_CASE("enumeration refuses to run past the cap") {
  std::vector<double> beta(30, 1.0);
  GameSpec g(2.0, 0.6, beta);
  std::vector<double> dense(30, 0.5);
  CHECK_THROWS_AS(expected_utility(g, StrategyProfile(dense), 0), EnumerationCapError);

  EvalOptions tight;
  tight.enum_cap = 3;
  GameSpec small(2.0, 0.6, {1.0, 1.0, 1.0, 1.0});
  StrategyProfile xs({0.5, 0.5, 0.5, 0.5});
  CHECK_THROWS_AS(expected_utility(small, xs, 0, tight), EnumerationCapError);
}

TEST_CASE("pure coordinates collapse to their only branch") {
  // 20 players, 14 of them pure: the library walks 2^6 branches while the
  // oracle grinds through all 2^20, and both agree
  Rng rng(59);
  auto g = oracle::random_game(rng, 20);
  std::vector<double> xv(20);
  for (std::size_t k = 0; k < 20; ++k)
    xv[k] = k % 3 == 0 ? rng.uniform() : (k % 3 == 1 ? 1.0 : 0.0);
  StrategyProfile x(xv);
  CHECK(expected_utility(g, x, 0) ==
        doctest::Approx(oracle::expected_utility_direct(g, xv, 0)).epsilon(1e-10));
  CHECK(expected_utility(g, x, 2) ==
        doctest::Approx(oracle::expected_utility_direct(g, xv, 2)).epsilon(1e-10));
}

TEST_CASE("out of range player index throws") {
  GameSpec g(1.0, 1.0, {1.0, 1.0});
  StrategyProfile x({0.5, 0.5});
  CHECK_THROWS_AS(expected_utility(g, x, 2), std::out_of_range);
  CHECK_THROWS_AS(marginal_utility(g, x, 5), std::out_of_range);
}

TEST_CASE("profile size must match the game") {
  GameSpec g(1.0, 1.0, {1.0, 1.0, 1.0});
  StrategyProfile x({0.5, 0.5});
  CHECK_THROWS_AS(expected_utility(g, x, 0), std::invalid_argument);
}

TEST_CASE("single player closed forms") {
  GameSpec g(3.0, 0.7, {1.0});
  CHECK(expected_utility(g, StrategyProfile({0.5}), 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(marginal_utility(g, StrategyProfile({0.3}), 0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("linear reward makes the expectation additive") {
  GameSpec g(1.0, 1.0, {0.0, 0.0});
  CHECK(expected_utility(g, StrategyProfile({0.5, 0.5}), 0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  // beta = 0.5 each: marginal is A - beta = 0.5 regardless of own coordinate
  GameSpec h(1.0, 1.0, {0.5, 0.5});
  for (double t : {0.0, 0.3, 1.0})
    CHECK(marginal_utility(h, StrategyProfile({t, 0.5}), 0) ==
          doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("expected utility increases with A when someone may disclose") {
  Rng rng(61);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 1 + rng.index(5);
    auto g = oracle::random_game(rng, n);
    auto xv = oracle::random_profile(rng, n);
    xv[rng.index(n)] = std::max(xv[0], 0.1);  // guarantee a positive coordinate
    StrategyProfile x(xv);
    GameSpec bigger(g.a() * 1.5, g.gamma(), g.beta());
    const std::size_t j = rng.index(n);
    CHECK(expected_utility(bigger, x, j) > expected_utility(g, x, j));
  }
}

TEST_CASE("relabeling players permutes utilities") {
  Rng rng(67);
  GameSpec g(2.2, 0.9, {0.5, 1.5, 2.5, 3.5});
  auto xv = oracle::random_profile(rng, 4);
  // rotate all players by one position
  std::vector<double> beta_rot{3.5, 0.5, 1.5, 2.5};
  std::vector<double> x_rot{xv[3], xv[0], xv[1], xv[2]};
  GameSpec g_rot(2.2, 0.9, beta_rot);
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(expected_utility(g, StrategyProfile(xv), j) ==
          doctest::Approx(expected_utility(g_rot, StrategyProfile(x_rot), (j + 1) % 4))
              .epsilon(1e-12));
}

TEST_CASE("reward table starts at zero and scales with A") {
  auto w = detail::reward_table(2.5, 0.71, 4);
  REQUIRE(w.size() == 5);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == doctest::Approx(2.5));
  CHECK(w[3] == doctest::Approx(2.5 * std::pow(3.0, 0.71)).epsilon(1e-15));
}
