#include "disclosure/equilibrium.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "disclosure/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace disclosure {

const char* to_string(KktCondition c) {
  switch (c) {
    case KktCondition::primal_feasibility: return "primal-feasibility";
    case KktCondition::dual_feasibility: return "dual-feasibility";
    case KktCondition::stationarity: return "stationarity";
    case KktCondition::complementary_slackness: return "complementary-slackness";
  }
  return "?";
}

const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::support_enumeration: return "support-enumeration";
    case SolveMethod::best_response: return "best-response";
    case SolveMethod::nlp_penalty: return "nlp-penalty";
    case SolveMethod::brute_force_pure: return "brute-force-pure";
  }
  return "?";
}

double KktResiduals::max() const {
  return std::max(std::max(primal, dual), std::max(stationarity, complementarity));
}

void KktResiduals::merge(const KktResiduals& other) {
  primal = std::max(primal, other.primal);
  dual = std::max(dual, other.dual);
  stationarity = std::max(stationarity, other.stationarity);
  complementarity = std::max(complementarity, other.complementarity);
}

namespace {

double marginal_at(const GameSpec& g, const std::vector<double>& x, std::size_t j,
                   const EvalOptions& eval) {
  std::vector<double> others;
  others.reserve(g.n() - 1);
  for (std::size_t k = 0; k < g.n(); ++k)
    if (k != j) others.push_back(x[k]);
  auto c = contraction_coefficients(g, others, j, eval);
  return c.c1 - c.c0;
}

// A ((1+s)^gamma - s^gamma) for s = 0..n-1: the gross marginal reward from
// one extra discloser given s others.
std::vector<double> gain_table(const GameSpec& g) {
  auto w = detail::reward_table(g.a(), g.gamma(), g.n());
  std::vector<double> gain(g.n());
  for (std::size_t s = 0; s + 1 <= g.n(); ++s) gain[s] = w[s + 1] - w[s];
  return gain;
}

}  // namespace

KktVerdict verify_kkt(const GameSpec& g, const KktCertificate& cert, double tol,
                      const EvalOptions& eval) {
  const std::size_t n = g.n();
  if (cert.x.size() != n || cert.lambda.size() != n || cert.mu.size() != n)
    throw std::invalid_argument("verify_kkt: certificate dimensions do not match game");

  KktVerdict out;
  auto fail = [&](KktCondition c, std::size_t j, double mag) {
    if (!out.violation) out.violation = KktViolation{c, j, mag};
  };

  for (std::size_t j = 0; j < n; ++j) {
    const double xj = cert.x[j];
    const double pf = std::max(-xj, xj - 1.0);  // positive when outside [0,1]
    out.residuals.primal = std::max(out.residuals.primal, pf);
    if (pf > tol) fail(KktCondition::primal_feasibility, j, pf);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double df = std::max(-cert.lambda[j], -cert.mu[j]);  // positive when negative multiplier
    out.residuals.dual = std::max(out.residuals.dual, df);
    if (df > tol) fail(KktCondition::dual_feasibility, j, df);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double m = marginal_at(g, cert.x.values(), j, eval);
    const double st = std::abs(m + cert.lambda[j] - cert.mu[j]);
    out.residuals.stationarity = std::max(out.residuals.stationarity, st);
    if (st > tol) fail(KktCondition::stationarity, j, st);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double cs =
        std::max(std::abs(cert.lambda[j] * cert.x[j]), std::abs(cert.mu[j] * (cert.x[j] - 1.0)));
    out.residuals.complementarity = std::max(out.residuals.complementarity, cs);
    if (cs > tol) fail(KktCondition::complementary_slackness, j, cs);
  }

  out.valid = !out.violation.has_value();
  return out;
}

double nlp_objective(const GameSpec& g, const KktCertificate& cert) {
  const std::size_t n = g.n();
  if (cert.x.size() != n || cert.lambda.size() != n || cert.mu.size() != n)
    throw std::invalid_argument("nlp_objective: certificate dimensions do not match game");
  KahanSum acc;
  for (std::size_t j = 0; j < n; ++j)
    acc.add(cert.lambda[j] * cert.x[j] + cert.mu[j] * (1.0 - cert.x[j]));
  return acc.value();
}

std::optional<StrategyProfile> construct_threshold_equilibrium(const GameSpec& g) {
  const std::size_t n = g.n();
  auto sorted = g.sorted();
  const auto& beta = sorted.game.beta();
  auto w = detail::reward_table(g.a(), g.gamma(), n + 1);

  for (std::size_t m = n + 1; m-- > 0;) {  // largest m first
    const bool low_ok = m == 0 || beta[m - 1] <= w[m] - w[m - 1];
    const bool high_ok = m == n || beta[m] >= w[m + 1] - w[m];
    if (low_ok && high_ok) {
      std::vector<double> x(n, 0.0);
      for (std::size_t k = 0; k < m; ++k) x[sorted.perm[k]] = 1.0;
      return StrategyProfile(std::move(x));
    }
  }
  return std::nullopt;
}

bool check_all_withhold(const GameSpec& g) {
  return g.a() <= *std::min_element(g.beta().begin(), g.beta().end());
}

bool check_all_disclose(const GameSpec& g) {
  return g.a() >= *std::max_element(g.beta().begin(), g.beta().end());
}

std::vector<DisclosureOutcome> brute_force_pure_equilibria(const GameSpec& g,
                                                           const BruteForceOptions& opts) {
  const std::size_t n = g.n();
  if (n > opts.cap)
    throw EnumerationCapError("brute_force_pure_equilibria: n=" + std::to_string(n) +
                              " exceeds cap " + std::to_string(opts.cap));

  const auto gain = gain_table(g);
  const std::uint64_t total = std::uint64_t{1} << n;

  auto is_equilibrium = [&](std::uint64_t mask) {
    const std::size_t s = std::size_t(std::popcount(mask));
    for (std::size_t j = 0; j < n; ++j) {
      // deviation gain from unilaterally flipping player j
      const double dev = ((mask >> j) & 1u) ? g.beta(j) - gain[s - 1] : gain[s] - g.beta(j);
      if (dev > opts.tie_tol) return false;
    }
    return true;
  };

  std::vector<DisclosureOutcome> out;
  const bool parallel = opts.exec == Exec::parallel || (opts.exec == Exec::automatic && n >= 16);
  if (!parallel) {
    for (std::uint64_t mask = 0; mask < total; ++mask)
      if (is_equilibrium(mask)) out.push_back(DisclosureOutcome::from_mask(std::uint32_t(mask), n));
    return out;
  }

  std::vector<std::uint64_t> hits;
#ifdef _OPENMP
#pragma omp parallel
  {
    std::vector<std::uint64_t> local;
#pragma omp for schedule(static)
    for (std::int64_t mask = 0; mask < std::int64_t(total); ++mask)
      if (is_equilibrium(std::uint64_t(mask))) local.push_back(std::uint64_t(mask));
#pragma omp critical
    hits.insert(hits.end(), local.begin(), local.end());
  }
#else
  for (std::uint64_t mask = 0; mask < total; ++mask)
    if (is_equilibrium(mask)) hits.push_back(mask);
#endif
  std::sort(hits.begin(), hits.end());
  out.reserve(hits.size());
  for (auto mask : hits) out.push_back(DisclosureOutcome::from_mask(std::uint32_t(mask), n));
  return out;
}

// ---------------------------------------------------------------------------
// Support-enumeration solver
// ---------------------------------------------------------------------------

namespace {

enum class Role : std::uint8_t { at_zero = 0, at_one = 1, interior = 2 };

struct Candidate {
  std::vector<double> x;
  std::vector<double> lambda;
  std::vector<double> mu;
  KktResiduals residuals;
  std::size_t interior_count = 0;
};

struct PatternContext {
  const GameSpec& g;
  const SolveOptions& opts;
  const std::vector<double>& gain;  // gross marginal table
};

// Quick infeasibility screen: for each player, the gross marginal lies between
// the extremes of gain[] over the disclose-counts its opponents can reach.
// A pattern is dropped when some player's required sign is unreachable.
bool pattern_plausible(const PatternContext& ctx, const std::vector<Role>& role) {
  const std::size_t n = ctx.g.n();
  std::size_t ones = 0, interiors = 0;
  for (auto r : role) {
    ones += r == Role::at_one;
    interiors += r == Role::interior;
  }
  const double slack = ctx.opts.tol.kkt;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t o = ones - (role[j] == Role::at_one);
    const std::size_t i = interiors - (role[j] == Role::interior);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t s = o; s <= o + i; ++s) {
      lo = std::min(lo, ctx.gain[s]);
      hi = std::max(hi, ctx.gain[s]);
    }
    const double m_lo = lo - ctx.g.beta(j);
    const double m_hi = hi - ctx.g.beta(j);
    switch (role[j]) {
      case Role::at_zero:
        if (m_lo > slack) return false;  // always wants to disclose
        break;
      case Role::at_one:
        if (m_hi < -slack) return false;  // always wants to withhold
        break;
      case Role::interior:
        if (m_lo > slack || m_hi < -slack) return false;
        break;
    }
  }
  return true;
}

double interior_residual(const PatternContext& ctx, const std::vector<Role>& role,
                         const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < ctx.g.n(); ++j)
    if (role[j] == Role::interior)
      worst = std::max(worst, std::abs(marginal_at(ctx.g, x, j, ctx.opts.eval)));
  return worst;
}

// Damped pseudo-gradient iteration: every interior player moves along its own
// marginal, clamped to the box. Fixed points are interior stationary points.
// The step shrinks whenever the residual grows (oscillation around an
// unstable point) and the loop gives up once progress stalls.
bool damped_fixed_point(const PatternContext& ctx, const std::vector<Role>& role,
                        std::vector<double>& x) {
  const std::size_t n = ctx.g.n();
  double damping = ctx.opts.damping;
  double prev_worst = std::numeric_limits<double>::infinity();
  double best_worst = prev_worst;
  std::size_t since_best = 0;
  for (std::size_t it = 0; it < ctx.opts.max_iterations; ++it) {
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (role[j] != Role::interior) continue;
      const double m = marginal_at(ctx.g, x, j, ctx.opts.eval);
      worst = std::max(worst, std::abs(m));
      x[j] = std::clamp(x[j] + damping * m, 0.0, 1.0);
    }
    if (worst <= ctx.opts.tol.stationarity) return true;
    if (worst > prev_worst) damping = std::max(damping * 0.5, 1.0 / 1024.0);
    if (worst < best_worst * (1.0 - 1e-3)) {
      best_worst = worst;
      since_best = 0;
    } else if (++since_best > 80) {
      break;
    }
    prev_worst = worst;
  }
  return interior_residual(ctx, role, x) <= ctx.opts.tol.stationarity;
}

// For two interior players the stationarity system decouples: each equation
// involves only the other player's probability, so each unknown is found by
// a univariate bisection.
bool bisect_pair(const PatternContext& ctx, const std::vector<Role>& role, std::size_t ja,
                 std::size_t jb, std::vector<double>& x) {
  auto solve_one = [&](std::size_t eq_player, std::size_t unknown) -> std::optional<double> {
    auto f = [&](double v) {
      std::vector<double> probe = x;
      probe[unknown] = v;
      return marginal_at(ctx.g, probe, eq_player, ctx.opts.eval);
    };
    double f0 = f(0.0), f1 = f(1.0);
    const double tol = ctx.opts.tol.stationarity;
    if (std::abs(f0) <= tol) return 0.0;
    if (std::abs(f1) <= tol) return 1.0;
    if ((f0 > 0) == (f1 > 0)) return std::nullopt;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (std::abs(fm) <= tol || hi - lo < 1e-15) return mid;
      if ((fm > 0) == (f0 > 0))
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  // marginal of ja depends on x[jb] and vice versa
  auto vb = solve_one(ja, jb);
  if (!vb) return false;
  x[jb] = *vb;
  auto va = solve_one(jb, ja);
  if (!va) return false;
  x[ja] = *va;
  return interior_residual(ctx, role, x) <= ctx.opts.tol.stationarity;
}

// Solve the interior subsystem for one support pattern. Returns whether a
// stationary interior assignment was found (x is updated in place), and sets
// `attempted` when a genuine solve was tried and failed.
bool solve_interior(const PatternContext& ctx, const std::vector<Role>& role,
                    std::vector<double>& x, std::uint64_t pattern_index, bool& attempted) {
  const std::size_t n = ctx.g.n();
  std::vector<std::size_t> interior;
  for (std::size_t j = 0; j < n; ++j)
    if (role[j] == Role::interior) interior.push_back(j);

  if (interior.empty()) return true;
  attempted = true;

  if (interior.size() == 1) {
    // The marginal of a lone interior player depends only on the fixed
    // boundary opponents, so stationarity either holds for every x_j
    // (a degenerate continuum; report the midpoint) or for none.
    const std::size_t j = interior[0];
    x[j] = 0.5;
    return std::abs(marginal_at(ctx.g, x, j, ctx.opts.eval)) <= ctx.opts.tol.stationarity;
  }

  std::vector<double> start = x;
  for (auto j : interior) start[j] = 0.5;

  std::vector<double> attempt = start;
  if (damped_fixed_point(ctx, role, attempt)) {
    x = attempt;
    return true;
  }

  if (interior.size() == 2) {
    attempt = start;
    if (bisect_pair(ctx, role, interior[0], interior[1], attempt)) {
      x = attempt;
      return true;
    }
    return false;
  }

  Rng rng(mix64(ctx.opts.seed ^ (0x5eedull + pattern_index)));
  for (std::size_t k = 0; k < ctx.opts.extra_starts; ++k) {
    attempt = start;
    for (auto j : interior) attempt[j] = rng.uniform();
    if (damped_fixed_point(ctx, role, attempt)) {
      x = attempt;
      return true;
    }
  }
  return false;
}

std::optional<Candidate> try_pattern(const PatternContext& ctx, std::uint64_t pattern_index) {
  const std::size_t n = ctx.g.n();
  std::vector<Role> role(n);
  {
    std::uint64_t p = pattern_index;
    for (std::size_t j = 0; j < n; ++j) {
      role[j] = Role(p % 3);
      p /= 3;
    }
  }

  if (!pattern_plausible(ctx, role)) return std::nullopt;

  std::vector<double> x(n, 0.0);
  std::size_t interior_count = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (role[j] == Role::at_one) x[j] = 1.0;
    if (role[j] == Role::interior) ++interior_count;
  }

  bool attempted = false;
  if (!solve_interior(ctx, role, x, pattern_index, attempted)) {
    if (attempted) {
      Candidate failure;  // sentinel: empty x marks a non-converged pattern
      failure.interior_count = interior_count;
      return failure;
    }
    return std::nullopt;
  }

  Candidate cand;
  cand.x = x;
  cand.lambda.assign(n, 0.0);
  cand.mu.assign(n, 0.0);
  cand.interior_count = interior_count;
  for (std::size_t j = 0; j < n; ++j) {
    const double m = marginal_at(ctx.g, x, j, ctx.opts.eval);
    if (role[j] == Role::at_zero) cand.lambda[j] = std::max(0.0, -m);
    if (role[j] == Role::at_one) cand.mu[j] = std::max(0.0, m);
  }

  auto verdict = verify_kkt(ctx.g, KktCertificate{StrategyProfile(cand.x), cand.lambda, cand.mu},
                            ctx.opts.tol.kkt, ctx.opts.eval);
  if (!verdict.valid) return std::nullopt;
  cand.residuals = verdict.residuals;
  return cand;
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double inf_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

}  // namespace

EquilibriumReport solve_equilibria(const GameSpec& g, const SolveOptions& opts) {
  const std::size_t n = g.n();
  if (n > opts.support_cap)
    throw EnumerationCapError("solve_equilibria: n=" + std::to_string(n) +
                              " exceeds support-enumeration cap " +
                              std::to_string(opts.support_cap));

  const auto gain = gain_table(g);
  PatternContext ctx{g, opts, gain};

  std::uint64_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= 3;

  std::vector<Candidate> candidates;
  std::size_t failed = 0;

#ifdef _OPENMP
#pragma omp parallel
  {
    std::vector<Candidate> local;
    std::size_t local_failed = 0;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t p = 0; p < std::int64_t(total); ++p) {
      auto cand = try_pattern(ctx, std::uint64_t(p));
      if (!cand) continue;
      if (cand->x.empty())
        ++local_failed;
      else
        local.push_back(std::move(*cand));
    }
#pragma omp critical
    {
      candidates.insert(candidates.end(), std::make_move_iterator(local.begin()),
                        std::make_move_iterator(local.end()));
      failed += local_failed;
    }
  }
#else
  for (std::uint64_t p = 0; p < total; ++p) {
    auto cand = try_pattern(ctx, p);
    if (!cand) continue;
    if (cand->x.empty())
      ++failed;
    else
      candidates.push_back(std::move(*cand));
  }
#endif

  // Collapse duplicates found through different support patterns. Preference
  // order keeps the representative with the fewest interior labels, so an
  // exact vertex beats an interior twin that converged next to it; ties go
  // to the smaller residual.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.interior_count != b.interior_count) return a.interior_count < b.interior_count;
    const double ra = a.residuals.max(), rb = b.residuals.max();
    if (ra != rb) return ra < rb;
    return lex_less(a.x, b.x);
  });

  std::vector<Candidate> kept;
  for (auto& cand : candidates) {
    bool duplicate = false;
    for (const auto& prev : kept)
      if (inf_dist(cand.x, prev.x) <= opts.tol.dedupe) {
        duplicate = true;
        break;
      }
    if (!duplicate) kept.push_back(std::move(cand));
  }
  std::sort(kept.begin(), kept.end(),
            [](const Candidate& a, const Candidate& b) { return lex_less(a.x, b.x); });

  EquilibriumReport report;
  report.method = SolveMethod::support_enumeration;
  report.failed_patterns = failed;
  for (auto& cand : kept) {
    CertificateEntry entry{
        KktCertificate{StrategyProfile(cand.x), std::move(cand.lambda), std::move(cand.mu)},
        SolveMethod::support_enumeration, cand.residuals};
    report.max_residuals.merge(cand.residuals);
    report.certificates.push_back(std::move(entry));
  }

  // Degeneracy: a boundary player indifferent to its own probability.
  for (const auto& entry : report.certificates) {
    for (std::size_t j = 0; j < n; ++j) {
      const double xj = entry.cert.x[j];
      if (xj > opts.tol.degeneracy && xj < 1.0 - opts.tol.degeneracy) continue;
      const double m = marginal_at(g, entry.cert.x.values(), j, opts.eval);
      if (std::abs(m) < opts.tol.degeneracy) {
        report.degenerate = true;
        break;
      }
    }
    if (report.degenerate) break;
  }

  if (failed > 0)
    report.notes.push_back("interior solve did not converge for " + std::to_string(failed) +
                           " support pattern(s)");
  if (!report.degenerate && report.certificates.size() % 2 == 0) {
    report.odd_count_warning = true;
    report.notes.push_back("non-degenerate game reported an even equilibrium count; "
                           "an interior solution may have been missed");
  }
  return report;
}

BestResponseResult best_response_dynamics(const GameSpec& g, const StrategyProfile& x0,
                                          std::size_t max_sweeps, double tol,
                                          const EvalOptions& eval) {
  if (x0.size() != g.n())
    throw std::invalid_argument("best_response_dynamics: profile size does not match game");
  std::vector<double> x = x0.values();
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (std::size_t j = 0; j < g.n(); ++j) {
      const double m = marginal_at(g, x, j, eval);
      double target = x[j];
      if (m > tol) target = 1.0;
      else if (m < -tol) target = 0.0;
      if (target != x[j]) {
        x[j] = target;
        moved = true;
      }
    }
    if (!moved) return {StrategyProfile(std::move(x)), true, sweep + 1};
  }
  return {StrategyProfile(std::move(x)), false, max_sweeps};
}

}  // namespace disclosure
