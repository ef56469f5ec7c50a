#include "disclosure/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "disclosure/game.hpp"

namespace disclosure {

namespace {

struct FilteredSeries {
  std::vector<double> s;
  std::vector<double> r;
};

FilteredSeries filter_series(std::span<const double> s, std::span<const double> r,
                             bool drop_zero_s) {
  if (s.size() != r.size())
    throw std::invalid_argument("fit: s and r must have the same length");
  FilteredSeries out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(r[i] > 0.0)) continue;  // articles with no comments carry no signal
    if (drop_zero_s && !(s[i] > 0.0)) continue;
    out.s.push_back(s[i]);
    out.r.push_back(r[i]);
  }
  return out;
}

}  // namespace

PowerLawFit fit_power_law(std::span<const double> s, std::span<const double> r) {
  auto series = filter_series(s, r, /*drop_zero_s=*/true);
  if (series.s.size() < 3)
    throw std::invalid_argument("fit_power_law: fewer than 3 usable articles");
  std::vector<double> ls(series.s.size()), lr(series.r.size());
  for (std::size_t i = 0; i < series.s.size(); ++i) {
    ls[i] = std::log(series.s[i]);
    lr[i] = std::log(series.r[i]);
  }
  const auto lin = fit_linear(ls, lr);

  PowerLawFit fit;
  fit.log_a = lin.intercept;
  fit.gamma = lin.slope;
  fit.std_err_log_a = lin.intercept_se;
  fit.std_err_gamma = lin.slope_se;
  fit.p_log_a = lin.intercept_p;
  fit.p_gamma = lin.slope_p;
  fit.r2_adjusted = lin.r_squared_adj;
  fit.rss = lin.rss;
  fit.n_articles = lin.n;
  fit.aic = aic_gaussian(lin.rss, lin.n, 3);
  fit.residuals = lin.residuals;
  return fit;
}

PowerLawFit fit_power_law(const std::vector<ArticleAggregate>& aggregates) {
  std::vector<double> s, r;
  s.reserve(aggregates.size());
  r.reserve(aggregates.size());
  for (const auto& agg : aggregates) {
    s.push_back(double(agg.s));
    r.push_back(double(agg.r));
  }
  return fit_power_law(s, r);
}

NullLinearFit fit_null_linear(std::span<const double> s, std::span<const double> r) {
  auto series = filter_series(s, r, /*drop_zero_s=*/false);
  if (series.s.size() < 3)
    throw std::invalid_argument("fit_null_linear: fewer than 3 usable articles");
  const auto lin = fit_linear(series.s, series.r);

  NullLinearFit fit;
  fit.beta0 = lin.intercept;
  fit.beta1 = lin.slope;
  fit.std_err_beta0 = lin.intercept_se;
  fit.std_err_beta1 = lin.slope_se;
  fit.p_beta0 = lin.intercept_p;
  fit.p_beta1 = lin.slope_p;
  fit.r2_adjusted = lin.r_squared_adj;
  fit.rss = lin.rss;
  fit.n_articles = lin.n;
  fit.aic = aic_gaussian(lin.rss, lin.n, 3);
  fit.residuals = lin.residuals;
  return fit;
}

NullLinearFit fit_null_linear(const std::vector<ArticleAggregate>& aggregates) {
  std::vector<double> s, r;
  s.reserve(aggregates.size());
  r.reserve(aggregates.size());
  for (const auto& agg : aggregates) {
    s.push_back(double(agg.s));
    r.push_back(double(agg.r));
  }
  return fit_null_linear(s, r);
}

ResidualDiagnostics residual_diagnostics(std::span<const double> residuals) {
  if (residuals.size() < 8)
    throw std::invalid_argument("residual_diagnostics: need at least 8 residuals");
  const auto m = moment_summary(residuals);
  if (!(m.variance > 0.0))
    throw std::invalid_argument("residual_diagnostics: residuals have zero variance");
  const auto jb = jarque_bera(residuals);

  ResidualDiagnostics diag;
  diag.mean = m.mean;
  diag.skewness = m.skewness;
  diag.excess_kurtosis = m.kurtosis - 3.0;
  diag.jarque_bera_stat = jb.statistic;
  diag.jarque_bera_p = jb.p_value;

  std::vector<double> sorted(residuals.begin(), residuals.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = double(sorted.size());
  diag.qq_points.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    diag.qq_points.emplace_back(normal_quantile((double(i) + 0.5) / n), sorted[i]);
  return diag;
}

std::vector<StrategyEstimate> estimate_strategies(const std::vector<CommentRecord>& records,
                                                  std::size_t min_posts) {
  struct Acc {
    std::size_t posts = 0;
    std::size_t disclosing = 0;
    std::set<std::string> articles;
  };
  std::map<std::string, Acc> by_user;
  for (const auto& rec : records) {
    auto& acc = by_user[rec.user_id];
    ++acc.posts;
    if (rec.disclosed) ++acc.disclosing;
    acc.articles.insert(rec.article_id);
  }
  std::vector<StrategyEstimate> out;
  for (const auto& [uid, acc] : by_user) {
    if (acc.articles.size() < min_posts) continue;
    StrategyEstimate est;
    est.user_id = uid;
    est.n_posts = acc.posts;
    est.n_disclosing = acc.disclosing;
    est.n_articles = acc.articles.size();
    est.x_hat = double(acc.disclosing) / double(acc.posts);
    out.push_back(std::move(est));
  }
  return out;
}

double beta_contribution(const std::vector<CoUser>& co_users, double a, double gamma,
                         double x_bar, std::size_t cap) {
  std::vector<double> probs;
  probs.reserve(co_users.size());
  std::size_t substituted = 0;
  for (const auto& cu : co_users)
    if (cu.x_hat) probs.push_back(*cu.x_hat);
  for (const auto& cu : co_users) {
    if (cu.x_hat) continue;
    if (probs.size() >= cap) break;  // estimated users fill the budget first
    probs.push_back(x_bar);
    ++substituted;
  }
  (void)substituted;

  // expected marginal reward = C1 - C0 of a zero-cost player facing these
  // co-users, which reuses the exact enumeration kernel
  GameSpec g(a, gamma, std::vector<double>(probs.size() + 1, 0.0));
  auto c = contraction_coefficients(g, probs, 0);
  return c.c1 - c.c0;
}

EstimateResult run_estimate_pipeline(const std::vector<CommentRecord>& records,
                                     const EstimateOptions& opts) {
  EstimateResult result;
  result.strategies = estimate_strategies(records, opts.min_posts);
  if (result.strategies.empty()) return result;

  KahanSum xsum;
  std::map<std::string, double> x_of;
  for (const auto& est : result.strategies) {
    xsum.add(est.x_hat);
    x_of[est.user_id] = est.x_hat;
  }
  result.x_bar = xsum.value() / double(result.strategies.size());

  std::map<std::string, std::vector<double>> contributions;
  std::set<std::string> pure_users;

  for (const auto& agg : aggregate_articles(records)) {
    std::size_t with_estimate = 0;
    for (const auto& uid : agg.user_ids) with_estimate += x_of.count(uid);
    if (with_estimate < opts.min_estimated_users) continue;

    for (const auto& uid : agg.user_ids) {
      auto it = x_of.find(uid);
      if (it == x_of.end()) continue;
      if (it->second == 0.0 || it->second == 1.0) {
        pure_users.insert(uid);
        continue;
      }
      std::vector<CoUser> co;
      co.reserve(agg.user_ids.size() - 1);
      for (const auto& other : agg.user_ids) {
        if (other == uid) continue;
        auto ot = x_of.find(other);
        co.push_back({other, ot == x_of.end() ? std::nullopt
                                              : std::optional<double>(ot->second)});
      }
      contributions[uid].push_back(
          beta_contribution(co, opts.a, opts.gamma, result.x_bar, opts.cap));
    }
  }

  for (auto& [uid, values] : contributions) {
    BetaEstimate est;
    est.user_id = uid;
    est.n_articles_used = values.size();
    KahanSum sum;
    for (double v : values) sum.add(v);
    est.beta_hat = sum.value() / double(values.size());
    est.per_article = std::move(values);
    result.betas.push_back(std::move(est));
  }

  for (const auto& uid : pure_users)
    result.exclusions.push_back({uid, "strategy estimate is pure (x_hat is 0 or 1)"});
  for (const auto& est : result.strategies) {
    if (contributions.count(est.user_id) || pure_users.count(est.user_id)) continue;
    result.exclusions.push_back(
        {est.user_id, "no article with enough co-users holding strategy estimates"});
  }
  return result;
}

LinearFit correlate_x_beta(std::span<const double> beta_hat, std::span<const double> x_hat) {
  return fit_linear(beta_hat, x_hat);
}

ConstrainedLsqResult fit_beta_constrained_lsq(const StrategyProfile& y_hat, double a,
                                              double gamma, const ConstrainedLsqOptions& opts) {
  const std::size_t n = y_hat.size();
  if (n > opts.cap)
    throw EnumerationCapError("fit_beta_constrained_lsq: n=" + std::to_string(n) +
                              " exceeds cap " + std::to_string(opts.cap));

  std::uint64_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= 3;

  // Boundary labels pin coordinates; interior coordinates are free, so the
  // squared loss of a pattern depends only on its boundary assignments.
  // beta recovery below makes every pattern feasible, hence ranking by the
  // loss alone is exact.
  auto pattern_objective = [&](std::uint64_t p) {
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto role = p % 3;
      p /= 3;
      if (role == 0) obj += y_hat[j] * y_hat[j];
      if (role == 1) obj += (y_hat[j] - 1.0) * (y_hat[j] - 1.0);
    }
    return obj;
  };

  std::vector<std::uint64_t> order(total);
  for (std::uint64_t p = 0; p < total; ++p) order[p] = p;
  std::stable_sort(order.begin(), order.end(), [&](std::uint64_t lhs, std::uint64_t rhs) {
    return pattern_objective(lhs) < pattern_objective(rhs);
  });

  GameSpec zero_cost(a, gamma, std::vector<double>(n, 0.0));
  ConstrainedLsqResult best;

  for (auto pattern : order) {
    std::vector<double> x(n);
    {
      std::uint64_t p = pattern;
      for (std::size_t j = 0; j < n; ++j) {
        const auto role = p % 3;
        p /= 3;
        x[j] = role == 0 ? 0.0 : role == 1 ? 1.0 : y_hat[j];
      }
    }
    // stationarity with free beta: beta_j equal to the gross expected
    // marginal reward zeroes every player's marginal at x
    std::vector<double> beta(n);
    StrategyProfile xp(x);
    for (std::size_t j = 0; j < n; ++j)
      beta[j] = marginal_utility(zero_cost, xp, j);

    GameSpec recovered(a, gamma, beta);
    KktCertificate cert{xp, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    auto verdict = verify_kkt(recovered, cert, opts.kkt_tol);
    if (!verdict.valid) continue;  // should not happen; try the next pattern

    best.x = xp;
    best.lambda = cert.lambda;
    best.mu = cert.mu;
    best.beta = std::move(beta);
    best.objective = pattern_objective(pattern);
    best.feasible = true;
    best.residuals = verdict.residuals;
    break;
  }
  return best;
}

}  // namespace disclosure
