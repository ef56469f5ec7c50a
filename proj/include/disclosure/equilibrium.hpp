#pragma once

// Nash-equilibrium machinery for the disclosure game: the KKT certificate
// checker, pure-strategy constructors and predicates, a brute-force pure
// oracle, a support-enumeration solver, and best-response dynamics.
//
// Every equilibrium any routine reports is re-verified through verify_kkt
// before it is returned.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "disclosure/game.hpp"
#include "disclosure/types.hpp"

namespace disclosure {

// An (x, lambda, mu) triple claimed to witness an equilibrium. lambda_j is
// the multiplier of x_j >= 0, mu_j of x_j <= 1.
struct KktCertificate {
  StrategyProfile x;
  std::vector<double> lambda;
  std::vector<double> mu;
};

enum class KktCondition {
  primal_feasibility,
  dual_feasibility,
  stationarity,
  complementary_slackness,
};
const char* to_string(KktCondition c);

struct KktViolation {
  KktCondition condition;
  std::size_t player;
  double magnitude;
};

// Largest violation observed per condition group.
struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;

  double max() const;
  void merge(const KktResiduals& other);
};

struct KktVerdict {
  bool valid = false;
  std::optional<KktViolation> violation;  // first failing condition when invalid
  KktResiduals residuals;
};

// Checks primal feasibility, dual feasibility, stationarity
// (du_j/dx_j + lambda_j - mu_j = 0) and complementary slackness, all within
// tol. Throws std::invalid_argument on dimension mismatch.
KktVerdict verify_kkt(const GameSpec& g, const KktCertificate& cert, double tol = 1e-8,
                      const EvalOptions& eval = {});

// Objective of the equivalent zero-objective program:
// sum_j lambda_j x_j + mu_j (1 - x_j). Zero exactly at equilibrium
// certificates, strictly positive otherwise (for feasible triples).
double nlp_objective(const GameSpec& g, const KktCertificate& cert);

// Threshold profile: the m cheapest players disclose, the rest withhold,
// where m is the largest count satisfying
//   beta_(m)   <= A (m^gamma - (m-1)^gamma)    (skipped when m = 0)
//   beta_(m+1) >= A ((m+1)^gamma - m^gamma)    (skipped when m = n)
// over the cost-sorted game. Empty when no m qualifies.
std::optional<StrategyProfile> construct_threshold_equilibrium(const GameSpec& g);

// x = 0 is an equilibrium iff A <= min_j beta_j.
bool check_all_withhold(const GameSpec& g);

// x = 1 is an equilibrium iff A >= max_j beta_j (the literal predicate; the
// unilateral-deviation test can disagree for gamma != 1, which callers and
// tests cross-check and log rather than assert).
bool check_all_disclose(const GameSpec& g);

struct BruteForceOptions {
  std::size_t cap = 20;          // refuse 2^n scans past this
  double tie_tol = 1e-12;        // deviation gain <= tie_tol keeps the profile
  Exec exec = Exec::automatic;
};

// All pure profiles where no player gains more than tie_tol by a unilateral
// flip, in ascending binary-counting order.
std::vector<DisclosureOutcome> brute_force_pure_equilibria(const GameSpec& g,
                                                           const BruteForceOptions& opts = {});

enum class SolveMethod {
  support_enumeration,
  best_response,
  nlp_penalty,
  brute_force_pure,
};
const char* to_string(SolveMethod m);

struct CertificateEntry {
  KktCertificate cert;
  SolveMethod method;
  KktResiduals residuals;
};

struct EquilibriumReport {
  std::vector<CertificateEntry> certificates;  // sorted canonically by x
  SolveMethod method = SolveMethod::support_enumeration;
  KktResiduals max_residuals;      // worst residual over reported certificates
  bool degenerate = false;         // some boundary player has |C1-C0| below tolerance
  bool odd_count_warning = false;  // non-degenerate game reported an even count
  std::size_t failed_patterns = 0; // support patterns whose interior solve did not converge
  std::vector<std::string> notes;
};

struct SolveOptions {
  std::size_t support_cap = 12;    // 3^n support patterns; refuse past this
  double damping = 0.5;            // interior fixed-point damping
  std::size_t max_iterations = 500;
  std::size_t extra_starts = 3;    // multi-start fallback attempts
  std::uint64_t seed = kDefaultSeed;
  Tolerances tol{};
  EvalOptions eval{};
};

// Support-enumeration search over all 3^n assignments of players to
// {at-0, at-1, interior}. Interior stationarity is solved by damped
// fixed-point iteration with bisection and multi-start fallbacks; boundary
// multipliers are recovered as lambda = max(0, -(C1-C0)), mu = max(0, C1-C0).
// Only candidates passing verify_kkt are reported.
EquilibriumReport solve_equilibria(const GameSpec& g, const SolveOptions& opts = {});

struct BestResponseResult {
  StrategyProfile x;
  bool converged = false;
  std::size_t sweeps = 0;
};

// Round-robin discrete best response: each player jumps to 1 when its
// marginal exceeds tol, to 0 below -tol, and stays put otherwise.
BestResponseResult best_response_dynamics(const GameSpec& g, const StrategyProfile& x0,
                                          std::size_t max_sweeps = 1000, double tol = 1e-8,
                                          const EvalOptions& eval = {});

}  // namespace disclosure
