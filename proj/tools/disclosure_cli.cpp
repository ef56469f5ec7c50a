// disclosure: command-line front end for the disclosure-games library.
// Subcommands: fit, estimate, solve, simulate. Every run writes a
// manifest.json so outputs can be reproduced byte for byte.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "disclosure/dataset.hpp"
#include "disclosure/equilibrium.hpp"
#include "disclosure/estimation.hpp"
#include "disclosure/game.hpp"
#include "disclosure/json_io.hpp"
#include "disclosure/stats.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace disclosure;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void apply_thread_env() {
#ifdef _OPENMP
  if (const char* env = std::getenv("DISCLOSURE_GAMES_THREADS")) {
    const long want = std::strtol(env, nullptr, 10);
    if (want > 0) omp_set_num_threads(int(want));
  }
#endif
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json_file(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_manifest(const fs::path& out_dir, const std::string& subcommand,
                    const json& config) {
  write_json_file(out_dir / "manifest.json",
                  json{{"tool", "disclosure"},
                       {"version", DISCLOSURE_VERSION},
                       {"subcommand", subcommand},
                       {"config", config}});
}

void write_hist_csv(const fs::path& path, const std::vector<HistogramBin>& bins) {
  std::string text = "bin_left,bin_right,count\n";
  for (const auto& b : bins)
    text += fmt(b.left) + "," + fmt(b.right) + "," + std::to_string(b.count) + "\n";
  write_text(path, text);
}

GameSpec load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("game file is not valid JSON: " + path);
  return game_from_json(j);
}

RecordFormat parse_format(const std::string& name) {
  if (name == "csv") return RecordFormat::csv;
  if (name == "jsonl") return RecordFormat::jsonl;
  throw std::runtime_error("unknown format: " + name);
}

struct FitArgs {
  std::string input;
  std::string out_dir = ".";
  std::string format = "csv";
};

int cmd_fit(const FitArgs& args) {
  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);

  auto loaded = load_records(args.input, parse_format(args.format));
  for (const auto& err : loaded.row_errors)
    std::cerr << "warning: " << args.input << ":" << err.line << ": " << err.message << "\n";
  auto aggregates = aggregate_articles(loaded.records);

  auto power = fit_power_law(aggregates);
  auto null_fit = fit_null_linear(aggregates);
  auto diag = residual_diagnostics(power.residuals);

  json report{{"power_law", to_json(power)},
              {"null_linear", to_json(null_fit)},
              {"residual_diagnostics", to_json(diag)},
              {"aic_note",
               "the two AIC values are computed on each model's own response scale "
               "(log for the power law, natural for the null); rss, n and k are "
               "reported so any convention can be recomputed"}};
  write_json_file(out / "fit_report.json", report);

  {
    std::string text = "s,observed_r,fitted_r\n";
    for (const auto& agg : aggregates) {
      if (agg.r == 0 || agg.s == 0) continue;
      const double fitted = std::exp(power.log_a + power.gamma * std::log(double(agg.s)));
      text += fmt(double(agg.s)) + "," + fmt(double(agg.r)) + "," + fmt(fitted) + "\n";
    }
    write_text(out / "powerlaw_fit.csv", text);
  }
  {
    std::string text = "s,observed_r,fitted_r\n";
    for (const auto& agg : aggregates) {
      if (agg.r == 0) continue;
      const double fitted = null_fit.beta0 + null_fit.beta1 * double(agg.s);
      text += fmt(double(agg.s)) + "," + fmt(double(agg.r)) + "," + fmt(fitted) + "\n";
    }
    write_text(out / "null_fit.csv", text);
  }
  write_hist_csv(out / "residual_hist.csv", histogram(power.residuals, 20));
  {
    std::string text = "theoretical_q,sample_q\n";
    for (const auto& [tq, sq] : diag.qq_points) text += fmt(tq) + "," + fmt(sq) + "\n";
    write_text(out / "qq.csv", text);
  }
  write_manifest(out, "fit",
                 json{{"input", args.input}, {"format", args.format}});

  auto ci = [](double v, double se) {
    return "(" + fmt(v - 1.96 * se) + ", " + fmt(v + 1.96 * se) + ")";
  };
  std::printf("power law: log R = log A + gamma log S   (n = %zu articles)\n",
              power.n_articles);
  std::printf("  %-8s %12.6f   p = %-12.6g 95%% CI %s\n", "log A", power.log_a,
              power.p_log_a, ci(power.log_a, power.std_err_log_a).c_str());
  std::printf("  %-8s %12.6f   p = %-12.6g 95%% CI %s\n", "gamma", power.gamma,
              power.p_gamma, ci(power.gamma, power.std_err_gamma).c_str());
  std::printf("  adjusted R^2 = %.4f   AIC = %.2f (log scale)\n", power.r2_adjusted,
              power.aic);
  std::printf("null linear: R = b0 + b1 S   (n = %zu articles)\n", null_fit.n_articles);
  std::printf("  %-8s %12.6f   p = %-12.6g\n", "b0", null_fit.beta0, null_fit.p_beta0);
  std::printf("  %-8s %12.6f   p = %-12.6g\n", "b1", null_fit.beta1, null_fit.p_beta1);
  std::printf("  adjusted R^2 = %.4f   AIC = %.2f (natural scale)\n",
              null_fit.r2_adjusted, null_fit.aic);
  std::printf("residuals: skew = %.4f, excess kurtosis = %.4f, JB = %.4f (p = %.4f)\n",
              diag.skewness, diag.excess_kurtosis, diag.jarque_bera_stat,
              diag.jarque_bera_p);
  return 0;
}

struct EstimateArgs {
  std::string input;
  std::string out_dir = ".";
  std::string format = "csv";
  std::size_t min_posts = 15;
  std::size_t cap = 8;
  std::optional<double> a_override;
  std::optional<double> gamma_override;
};

int cmd_estimate(const EstimateArgs& args) {
  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);

  auto loaded = load_records(args.input, parse_format(args.format));
  for (const auto& err : loaded.row_errors)
    std::cerr << "warning: " << args.input << ":" << err.line << ": " << err.message << "\n";

  EstimateOptions opts;
  opts.min_posts = args.min_posts;
  opts.cap = args.cap;
  if (args.a_override && args.gamma_override) {
    opts.a = *args.a_override;
    opts.gamma = *args.gamma_override;
  } else {
    auto power = fit_power_law(aggregate_articles(loaded.records));
    opts.a = args.a_override.value_or(std::exp(power.log_a));
    opts.gamma = args.gamma_override.value_or(power.gamma);
  }

  auto result = run_estimate_pipeline(loaded.records, opts);
  if (result.strategies.empty())
    std::cerr << "warning: no user posted to at least " << args.min_posts
              << " articles; outputs are empty\n";

  {
    std::string text = "user_id,x_hat,n_posts,n_disclosing,n_articles\n";
    for (const auto& est : result.strategies)
      text += est.user_id + "," + fmt(est.x_hat) + "," + std::to_string(est.n_posts) + "," +
              std::to_string(est.n_disclosing) + "," + std::to_string(est.n_articles) + "\n";
    write_text(out / "xhat.csv", text);
  }
  {
    std::string text = "user_id,beta_hat,n_articles_used\n";
    for (const auto& est : result.betas)
      text += est.user_id + "," + fmt(est.beta_hat) + "," +
              std::to_string(est.n_articles_used) + "\n";
    write_text(out / "betahat.csv", text);
  }

  json xvb{{"n_pairs", result.betas.size()},
           {"A", opts.a},
           {"gamma", opts.gamma},
           {"x_bar", result.x_bar}};
  if (result.betas.size() >= 3) {
    std::vector<double> bh, xh;
    for (const auto& est : result.betas) {
      bh.push_back(est.beta_hat);
      xh.push_back(0.0);
      for (const auto& s : result.strategies)
        if (s.user_id == est.user_id) xh.back() = s.x_hat;
    }
    xvb["fit"] = to_json(correlate_x_beta(bh, xh));
  } else {
    xvb["fit"] = nullptr;
    xvb["note"] = "fewer than 3 paired estimates; regression skipped";
  }
  write_json_file(out / "x_vs_beta.json", xvb);
  write_json_file(out / "estimates.json", to_json(result));

  if (!result.strategies.empty()) {
    std::vector<double> xs;
    for (const auto& est : result.strategies) xs.push_back(est.x_hat);
    write_hist_csv(out / "xhat_hist.csv", histogram(xs, 10));
  }
  if (!result.betas.empty()) {
    std::vector<double> bs;
    for (const auto& est : result.betas) bs.push_back(est.beta_hat);
    write_hist_csv(out / "betahat_hist.csv", histogram(bs, 10));
  }

  write_manifest(out, "estimate",
                 json{{"input", args.input},
                      {"format", args.format},
                      {"min_posts", args.min_posts},
                      {"cap", args.cap},
                      {"A", args.a_override ? json(*args.a_override) : json(nullptr)},
                      {"gamma",
                       args.gamma_override ? json(*args.gamma_override) : json(nullptr)}});

  std::printf("strategy estimates: %zu users (min %zu articles), x_bar = %.6f\n",
              result.strategies.size(), args.min_posts, result.x_bar);
  std::printf("cost estimates: %zu users (A = %.6f, gamma = %.6f), %zu exclusions\n",
              result.betas.size(), opts.a, opts.gamma, result.exclusions.size());
  return 0;
}

struct SolveArgs {
  std::string game_path;
  std::string out_dir = ".";
  std::size_t enum_cap = 25;
  std::size_t support_cap = 12;
  double tol = 1e-8;
  std::uint64_t seed = kDefaultSeed;
};

int cmd_solve(const SolveArgs& args) {
  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);

  GameSpec g = load_game(args.game_path);

  SolveOptions opts;
  opts.support_cap = args.support_cap;
  opts.seed = args.seed;
  opts.tol.kkt = args.tol;
  opts.eval.enum_cap = args.enum_cap;
  auto report = solve_equilibria(g, opts);

  json doc{{"game", to_json(g)},
           {"report", to_json(report)},
           {"all_withhold_equilibrium", check_all_withhold(g)},
           {"all_disclose_equilibrium", check_all_disclose(g)}};
  if (auto thr = construct_threshold_equilibrium(g))
    doc["threshold_equilibrium"] = thr->values();
  else
    doc["threshold_equilibrium"] = nullptr;
  write_json_file(out / "equilibria.json", doc);
  write_manifest(out, "solve",
                 json{{"game", args.game_path},
                      {"enum_cap", args.enum_cap},
                      {"support_cap", args.support_cap},
                      {"tol", args.tol},
                      {"seed", args.seed}});

  std::printf("%zu equilibrium certificate(s), max residual %.3g%s\n",
              report.certificates.size(), report.max_residuals.max(),
              report.degenerate ? " [degenerate]" : "");
  for (const auto& entry : report.certificates) {
    std::string line = "  x = (";
    for (std::size_t j = 0; j < entry.cert.x.size(); ++j)
      line += (j ? ", " : "") + fmt(entry.cert.x[j]);
    line += ")";
    std::printf("%s\n", line.c_str());
  }
  for (const auto& note : report.notes) std::printf("note: %s\n", note.c_str());
  return 0;
}

struct SimulateArgs {
  std::string game_path;
  std::string out_dir = ".";
  std::size_t n_articles = 100;
  double sigma = 0.0;
  std::uint64_t seed = kDefaultSeed;
  std::size_t users_per_article = 5;
  double x_min = 0.2;
  double x_max = 0.8;
};

int cmd_simulate(const SimulateArgs& args) {
  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);

  GameSpec g = load_game(args.game_path);

  SimulateOptions opts;
  opts.n_articles = args.n_articles;
  opts.noise_sigma = args.sigma;
  opts.seed = args.seed;
  opts.users_per_article = args.users_per_article;
  opts.x_min = args.x_min;
  opts.x_max = args.x_max;
  auto data = simulate_dataset(g, opts);

  write_records_csv((out / "comments.csv").string(), data.records);
  write_json_file(out / "truth.json", json{{"game", to_json(g)},
                                           {"sigma", args.sigma},
                                           {"strategies", data.strategies},
                                           {"user_ids", data.user_ids}});
  write_manifest(out, "simulate",
                 json{{"game", args.game_path},
                      {"n_articles", args.n_articles},
                      {"sigma", args.sigma},
                      {"seed", args.seed},
                      {"users_per_article", args.users_per_article},
                      {"x_min", args.x_min},
                      {"x_max", args.x_max}});

  std::printf("simulated %zu comments, pool of %zu users\n", data.records.size(), g.n());
  std::printf("true A = %s, gamma = %s, sigma = %s\n", fmt(g.a()).c_str(),
              fmt(g.gamma()).c_str(), fmt(args.sigma).c_str());
  std::string line = "true x = (";
  for (std::size_t j = 0; j < data.strategies.size(); ++j)
    line += (j ? ", " : "") + fmt(data.strategies[j]);
  std::printf("%s)\n", line.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();

  CLI::App app{"public-goods model of personal-information disclosure: "
               "fitting, estimation and equilibrium solving"};
  app.require_subcommand(1);
  app.footer("default seed: 20150301; DISCLOSURE_GAMES_THREADS bounds the worker count");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "fit the power-law reward model and the linear null");
  fit->add_option("--input", fit_args.input, "comment table")->required();
  fit->add_option("--out-dir", fit_args.out_dir, "output directory (default .)");
  fit->add_option("--format", fit_args.format, "csv or jsonl (default csv)");

  EstimateArgs est_args;
  auto* est = app.add_subcommand("estimate", "estimate per-user strategies and costs");
  est->add_option("--input", est_args.input, "comment table")->required();
  est->add_option("--out-dir", est_args.out_dir, "output directory (default .)");
  est->add_option("--format", est_args.format, "csv or jsonl (default csv)");
  est->add_option("--min-posts", est_args.min_posts,
                  "distinct-article threshold for strategy estimates (default 15)");
  est->add_option("--cap", est_args.cap, "co-user cap in the cost enumeration (default 8)");
  double a_tmp = 0.0, g_tmp = 0.0;
  est->add_option("--A", a_tmp, "reward scale override (skip the internal fit)");
  est->add_option("--gamma", g_tmp, "reward exponent override (skip the internal fit)");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "find and certify Nash equilibria of a game");
  solve->add_option("--game", solve_args.game_path,
                    "JSON file with keys A, gamma, beta")->required();
  solve->add_option("--out-dir", solve_args.out_dir, "output directory (default .)");
  solve->add_option("--enum-cap", solve_args.enum_cap,
                    "outcome-enumeration cap on n (default 25)");
  solve->add_option("--support-cap", solve_args.support_cap,
                    "support-enumeration cap on n (default 12)");
  solve->add_option("--tol", solve_args.tol, "KKT verification tolerance (default 1e-8)");
  solve->add_option("--seed", solve_args.seed, "seed for solver restarts");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "generate a synthetic comment table");
  sim->add_option("--game", sim_args.game_path,
                  "JSON file with keys A, gamma, beta (beta sets the pool size)")->required();
  sim->add_option("--out-dir", sim_args.out_dir, "output directory (default .)");
  sim->add_option("--articles", sim_args.n_articles, "number of articles (default 100)");
  sim->add_option("--sigma", sim_args.sigma, "lognormal noise sigma (default 0)");
  sim->add_option("--seed", sim_args.seed, "RNG seed (default 20150301)");
  sim->add_option("--users-per-article", sim_args.users_per_article,
                  "pool users drawn per article (default 5)");
  sim->add_option("--x-min", sim_args.x_min, "strategy draw lower bound (default 0.2)");
  sim->add_option("--x-max", sim_args.x_max, "strategy draw upper bound (default 0.8)");

  CLI11_PARSE(app, argc, argv);

  if (est->count("--A")) est_args.a_override = a_tmp;
  if (est->count("--gamma")) est_args.gamma_override = g_tmp;

  try {
    if (fit->parsed()) return cmd_fit(fit_args);
    if (est->parsed()) return cmd_estimate(est_args);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (sim->parsed()) return cmd_simulate(sim_args);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
