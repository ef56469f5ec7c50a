#include "disclosure/json_io.hpp"

#include <stdexcept>

namespace disclosure {

using nlohmann::json;

json to_json(const GameSpec& g) {
  return json{{"A", g.a()}, {"gamma", g.gamma()}, {"beta", g.beta()}};
}

GameSpec game_from_json(const json& j) {
  if (!j.is_object() || !j.contains("A") || !j.contains("gamma") || !j.contains("beta"))
    throw std::invalid_argument("game JSON needs keys A, gamma, beta");
  if (!j["A"].is_number() || !j["gamma"].is_number() || !j["beta"].is_array())
    throw std::invalid_argument("game JSON: A and gamma must be numbers, beta an array");
  return GameSpec(j["A"].get<double>(), j["gamma"].get<double>(),
                  j["beta"].get<std::vector<double>>());
}

json to_json(const KktResiduals& r) {
  return json{{"primal", r.primal},
              {"dual", r.dual},
              {"stationarity", r.stationarity},
              {"complementarity", r.complementarity}};
}

json to_json(const CertificateEntry& e) {
  return json{{"x", e.cert.x.values()},
              {"lambda", e.cert.lambda},
              {"mu", e.cert.mu},
              {"method", to_string(e.method)},
              {"residuals", to_json(e.residuals)}};
}

json to_json(const EquilibriumReport& report) {
  json certs = json::array();
  for (const auto& e : report.certificates) certs.push_back(to_json(e));
  return json{{"equilibria", certs},
              {"method", to_string(report.method)},
              {"max_residuals", to_json(report.max_residuals)},
              {"degenerate", report.degenerate},
              {"odd_count_warning", report.odd_count_warning},
              {"failed_patterns", report.failed_patterns},
              {"notes", report.notes}};
}

json to_json(const PowerLawFit& fit) {
  return json{{"log_A", fit.log_a},
              {"gamma", fit.gamma},
              {"std_err_log_A", fit.std_err_log_a},
              {"std_err_gamma", fit.std_err_gamma},
              {"p_log_A", fit.p_log_a},
              {"p_gamma", fit.p_gamma},
              {"r2_adjusted", fit.r2_adjusted},
              {"aic", fit.aic},
              {"rss", fit.rss},
              {"n_articles", fit.n_articles},
              {"k_parameters", 3}};
}

json to_json(const NullLinearFit& fit) {
  return json{{"beta0", fit.beta0},
              {"beta1", fit.beta1},
              {"std_err_beta0", fit.std_err_beta0},
              {"std_err_beta1", fit.std_err_beta1},
              {"p_beta0", fit.p_beta0},
              {"p_beta1", fit.p_beta1},
              {"r2_adjusted", fit.r2_adjusted},
              {"aic", fit.aic},
              {"rss", fit.rss},
              {"n_articles", fit.n_articles},
              {"k_parameters", 3}};
}

json to_json(const ResidualDiagnostics& diag) {
  return json{{"mean", diag.mean},
              {"skewness", diag.skewness},
              {"excess_kurtosis", diag.excess_kurtosis},
              {"jarque_bera_stat", diag.jarque_bera_stat},
              {"jarque_bera_p", diag.jarque_bera_p}};
}

json to_json(const LinearFit& fit) {
  return json{{"intercept", fit.intercept},
              {"slope", fit.slope},
              {"intercept_se", fit.intercept_se},
              {"slope_se", fit.slope_se},
              {"intercept_t", fit.intercept_t},
              {"slope_t", fit.slope_t},
              {"intercept_p", fit.intercept_p},
              {"slope_p", fit.slope_p},
              {"r_squared", fit.r_squared},
              {"r_squared_adj", fit.r_squared_adj},
              {"n", fit.n}};
}

json to_json(const EstimateResult& result) {
  json strategies = json::array();
  for (const auto& est : result.strategies)
    strategies.push_back(json{{"user_id", est.user_id},
                              {"x_hat", est.x_hat},
                              {"n_posts", est.n_posts},
                              {"n_disclosing", est.n_disclosing},
                              {"n_articles", est.n_articles}});
  json betas = json::array();
  for (const auto& est : result.betas)
    betas.push_back(json{{"user_id", est.user_id},
                         {"beta_hat", est.beta_hat},
                         {"n_articles_used", est.n_articles_used}});
  json exclusions = json::array();
  for (const auto& ex : result.exclusions)
    exclusions.push_back(json{{"user_id", ex.user_id}, {"reason", ex.reason}});
  return json{{"strategies", strategies},
              {"x_bar", result.x_bar},
              {"betas", betas},
              {"exclusions", exclusions}};
}

json to_json(const ConstrainedLsqResult& result) {
  return json{{"x", result.x.values()},
              {"lambda", result.lambda},
              {"mu", result.mu},
              {"beta", result.beta},
              {"objective", result.objective},
              {"feasible", result.feasible},
              {"residuals", to_json(result.residuals)}};
}

}  // namespace disclosure
