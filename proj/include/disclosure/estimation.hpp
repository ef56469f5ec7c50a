#pragma once

// Parameter estimation: power-law reward regression against a linear null,
// residual normality diagnostics, per-user strategy and disclosure-cost
// estimators, and the complementarity-constrained least-squares fit.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "disclosure/dataset.hpp"
#include "disclosure/equilibrium.hpp"
#include "disclosure/stats.hpp"
#include "disclosure/types.hpp"

namespace disclosure {

struct PowerLawFit {
  double log_a = 0.0;
  double gamma = 0.0;
  double std_err_log_a = 0.0;
  double std_err_gamma = 0.0;
  double p_log_a = 1.0;
  double p_gamma = 1.0;
  double r2_adjusted = 0.0;
  double aic = 0.0;
  double rss = 0.0;
  std::size_t n_articles = 0;  // articles entering the fit (R >= 1 and S >= 1)
  std::vector<double> residuals;  // log-scale, one per fitted article
};

struct NullLinearFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double std_err_beta0 = 0.0;
  double std_err_beta1 = 0.0;
  double p_beta0 = 1.0;
  double p_beta1 = 1.0;
  double r2_adjusted = 0.0;
  double aic = 0.0;
  double rss = 0.0;
  std::size_t n_articles = 0;  // R >= 1; S = 0 kept here
  std::vector<double> residuals;  // natural units
};

// Core fits on raw value arrays (real-valued r supported so exact synthetic
// data round-trips). The aggregate overloads apply the article filters.
PowerLawFit fit_power_law(std::span<const double> s, std::span<const double> r);
PowerLawFit fit_power_law(const std::vector<ArticleAggregate>& aggregates);
NullLinearFit fit_null_linear(std::span<const double> s, std::span<const double> r);
NullLinearFit fit_null_linear(const std::vector<ArticleAggregate>& aggregates);

struct ResidualDiagnostics {
  double mean = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double jarque_bera_stat = 0.0;
  double jarque_bera_p = 1.0;
  std::vector<std::pair<double, double>> qq_points;  // (theoretical, sample)
};

// Needs at least 8 residuals with nonzero variance.
ResidualDiagnostics residual_diagnostics(std::span<const double> residuals);

struct StrategyEstimate {
  std::string user_id;
  double x_hat = 0.0;
  std::size_t n_posts = 0;       // comments
  std::size_t n_disclosing = 0;  // disclosing comments
  std::size_t n_articles = 0;    // distinct articles, the eligibility count
};

// x_hat = n_disclosing / n_posts; only users posting to at least min_posts
// distinct articles are returned. Sorted by user_id.
std::vector<StrategyEstimate> estimate_strategies(const std::vector<CommentRecord>& records,
                                                  std::size_t min_posts);

struct CoUser {
  std::string user_id;
  std::optional<double> x_hat;  // empty means substitute x_bar
};

// Expected marginal reward A((1+S)^gamma - S^gamma) over the co-users'
// disclosure draws, the per-article term whose mean across articles is the
// cost estimate. Co-users without an estimate enter at x_bar; when they
// would push the enumeration past `cap` users, only cap - (#estimated) of
// them are kept (estimated users always stay).
double beta_contribution(const std::vector<CoUser>& co_users, double a, double gamma,
                         double x_bar, std::size_t cap);

struct BetaEstimate {
  std::string user_id;
  double beta_hat = 0.0;
  std::size_t n_articles_used = 0;
  std::vector<double> per_article;  // beta_hat is their mean
};

struct EstimateOptions {
  double a = 1.0;      // reward scale, typically exp(log_a) from the fit
  double gamma = 1.0;  // reward exponent from the fit
  std::size_t min_posts = 15;
  std::size_t cap = 8;
  std::size_t min_estimated_users = 3;  // per-article proper-x-hat quorum
};

struct EstimateResult {
  std::vector<StrategyEstimate> strategies;
  double x_bar = 0.0;  // mean x_hat over the qualifying subsample
  std::vector<BetaEstimate> betas;
  struct Exclusion {
    std::string user_id;
    std::string reason;
  };
  std::vector<Exclusion> exclusions;
};

// Full pipeline: strategies, x_bar, then per-article cost contributions
// averaged per user. Articles count toward a user's estimate only when at
// least min_estimated_users participants carry proper strategy estimates;
// users whose x_hat is exactly 0 or 1 are excluded from cost estimation
// with a reason.
EstimateResult run_estimate_pipeline(const std::vector<CommentRecord>& records,
                                     const EstimateOptions& opts);

// OLS of x_hat on beta_hat for the users holding both estimates.
LinearFit correlate_x_beta(std::span<const double> beta_hat, std::span<const double> x_hat);

struct ConstrainedLsqResult {
  StrategyProfile x{std::vector<double>{0.0}};
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<double> beta;
  double objective = 0.0;
  bool feasible = false;
  KktResiduals residuals;
};

struct ConstrainedLsqOptions {
  std::size_t cap = 10;
  double kkt_tol = 1e-8;
};

// Nearest Nash-consistent profile to y_hat when the costs are free
// variables: minimizes sum (y_hat_j - x_j)^2 over (x, lambda, mu, beta)
// subject to the equilibrium KKT system. Searched over the 3^n support
// patterns; each pattern pins boundary coordinates and recovers beta in
// closed form from stationarity.
ConstrainedLsqResult fit_beta_constrained_lsq(const StrategyProfile& y_hat, double a,
                                              double gamma,
                                              const ConstrainedLsqOptions& opts = {});

}  // namespace disclosure
