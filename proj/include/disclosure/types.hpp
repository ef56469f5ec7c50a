#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace disclosure {

// Default seed used by every randomized entry point that does not get an
// explicit one. Documented in the CLI --help output.
inline constexpr std::uint64_t kDefaultSeed = 20150301;

// Raised when an operation would enumerate more outcomes than its cap allows.
class EnumerationCapError : public std::runtime_error {
 public:
  explicit EnumerationCapError(const std::string& what) : std::runtime_error(what) {}
};

// All tolerance constants live here so tests and solvers agree on them.
struct Tolerances {
  double kkt = 1e-8;            // verify_kkt default
  double stationarity = 1e-10;  // interior stationarity solve target
  double degeneracy = 1e-9;     // |marginal| below this at a boundary player flags degeneracy
  double deviation_tie = 1e-12; // unilateral-deviation ties count as equilibrium-preserving
  double decomposition = 1e-10; // u_j == (C1-C0) x_j + C0 identity slack
  double parallel_sum = 1e-12;  // serial vs parallel reduction agreement
  double dedupe = 1e-6;         // infinity-norm distance treating two profiles as one
};

// Backend for the outcome-enumeration kernels. `automatic` picks the parallel
// path once the free-coordinate count makes threading worthwhile.
enum class Exec { automatic, serial, parallel };

struct EvalOptions {
  std::size_t enum_cap = 25;  // 2^n enumeration refuses to run past this
  Exec exec = Exec::automatic;
};

// Compensated (Kahan) accumulator. Both the serial reference kernel and the
// parallel kernel use it so their results differ only by block grouping.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double value) {
    double y = value - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

struct SortedGame;

// The (A, gamma, beta_1..beta_n) parameterization of an n-player disclosure
// game: common reward A * (#disclosers)^gamma, per-player disclosure cost
// beta_j.
class GameSpec {
 public:
  GameSpec(double a, double gamma, std::vector<double> beta)
      : a_(a), gamma_(gamma), beta_(std::move(beta)) {
    if (beta_.empty()) throw std::invalid_argument("GameSpec: beta must have at least one entry");
    if (!(a_ > 0.0)) throw std::invalid_argument("GameSpec: A must be positive");
    if (!(gamma_ > 0.0)) throw std::invalid_argument("GameSpec: gamma must be positive");
    for (double b : beta_)
      if (!(b >= 0.0)) throw std::invalid_argument("GameSpec: all beta_j must be nonnegative");
  }

  std::size_t n() const { return beta_.size(); }
  double a() const { return a_; }
  double gamma() const { return gamma_; }
  const std::vector<double>& beta() const { return beta_; }
  double beta(std::size_t j) const { return beta_.at(j); }

  // View with beta ascending plus the permutation back to original indices:
  // sorted.game.beta()[k] == original.beta()[perm[k]].
  SortedGame sorted() const;

 private:
  double a_;
  double gamma_;
  std::vector<double> beta_;
};

struct SortedGame {
  GameSpec game;
  std::vector<std::size_t> perm;
};

inline SortedGame GameSpec::sorted() const {
  std::vector<std::size_t> perm(n());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t i, std::size_t j) { return beta_[i] < beta_[j]; });
  std::vector<double> sorted_beta(n());
  for (std::size_t k = 0; k < n(); ++k) sorted_beta[k] = beta_[perm[k]];
  return SortedGame{GameSpec(a_, gamma_, std::move(sorted_beta)), std::move(perm)};
}

// Vector of disclosure probabilities, one per player, each in [0,1].
class StrategyProfile {
 public:
  explicit StrategyProfile(std::vector<double> x) : x_(std::move(x)) {
    if (x_.empty()) throw std::invalid_argument("StrategyProfile: empty profile");
    for (double v : x_)
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("StrategyProfile: entries must lie in [0,1]");
  }

  std::size_t size() const { return x_.size(); }
  double operator[](std::size_t j) const { return x_[j]; }
  double at(std::size_t j) const { return x_.at(j); }
  const std::vector<double>& values() const { return x_; }

  bool is_pure() const {
    for (double v : x_)
      if (v != 0.0 && v != 1.0) return false;
    return true;
  }

 private:
  std::vector<double> x_;
};

// Realized pure outcome: delta_j = 1 iff player j disclosed.
class DisclosureOutcome {
 public:
  explicit DisclosureOutcome(std::vector<std::uint8_t> delta) : delta_(std::move(delta)) {
    if (delta_.empty()) throw std::invalid_argument("DisclosureOutcome: empty outcome");
    for (auto d : delta_)
      if (d > 1) throw std::invalid_argument("DisclosureOutcome: entries must be 0 or 1");
  }

  // Low bit of `mask` is player 0.
  static DisclosureOutcome from_mask(std::uint32_t mask, std::size_t n) {
    std::vector<std::uint8_t> delta(n);
    for (std::size_t j = 0; j < n; ++j) delta[j] = (mask >> j) & 1u;
    return DisclosureOutcome(std::move(delta));
  }

  std::size_t size() const { return delta_.size(); }
  std::uint8_t operator[](std::size_t j) const { return delta_[j]; }
  const std::vector<std::uint8_t>& values() const { return delta_; }

  std::size_t count() const {
    std::size_t s = 0;
    for (auto d : delta_) s += d;
    return s;
  }

  StrategyProfile as_profile() const {
    std::vector<double> x(delta_.begin(), delta_.end());
    return StrategyProfile(std::move(x));
  }

 private:
  std::vector<std::uint8_t> delta_;
};

}  // namespace disclosure
