#pragma once

// Comment-table ingestion and per-article aggregation, plus a seeded
// synthetic-data generator used by the calibration tests and the CLI.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "disclosure/types.hpp"

namespace disclosure {

struct CommentRecord {
  std::string article_id;
  std::string user_id;
  bool disclosed = false;
  std::optional<std::string> timestamp;
  std::optional<std::string> source;
};

struct ArticleAggregate {
  std::string article_id;
  std::size_t r = 0;  // total comments on the article
  std::size_t s = 0;  // distinct users with at least one disclosing comment
  std::vector<std::string> user_ids;
};

enum class RecordFormat { csv, jsonl };

struct RowError {
  std::size_t line = 0;  // 1-based, header included for CSV
  std::string message;
};

struct LoadReport {
  std::vector<CommentRecord> records;
  std::vector<RowError> row_errors;
};

// Reads a comment table. CSV wants the header
// `article_id,user_id,disclosed,timestamp,source` (last two columns
// optional, any column order accepted by name); JSONL wants one object per
// line with the same keys. Malformed rows land in row_errors with their
// line number. Throws std::runtime_error when the file is missing, a
// required column is absent, or no row is valid.
LoadReport load_records(const std::string& path, RecordFormat format);

// Groups records by article. r counts comments, s counts users disclosing
// at least once in that article. Output sorted by article_id.
std::vector<ArticleAggregate> aggregate_articles(const std::vector<CommentRecord>& records);

void write_records_csv(const std::string& path, const std::vector<CommentRecord>& records);
void write_aggregates_csv(const std::string& path, const std::vector<ArticleAggregate>& aggregates);

struct SimulateOptions {
  std::size_t n_articles = 0;
  double noise_sigma = 0.0;
  std::uint64_t seed = kDefaultSeed;
  std::size_t users_per_article = 5;
  // pool users draw their true strategy uniformly from [x_min, x_max]
  // unless `strategies` pins the whole vector
  double x_min = 0.2;
  double x_max = 0.8;
  std::vector<double> strategies;
};

struct SimulatedData {
  std::vector<CommentRecord> records;
  std::vector<double> strategies;  // true x_j per pool user, index = player
  std::vector<std::string> user_ids;
};

// The template game supplies A, gamma and the pool size (one pool user per
// player). Each article samples users_per_article pool users; each draws
// disclosure Bernoulli(x_j) and posts one labelled comment. The article's
// comment total is round(A S^gamma e^eps), raised to the participant count
// when the formula falls below it so no participant post is dropped;
// the shortfall against the total is filled with single-use non-disclosing
// users. S = 0 gives a zero total and the article vanishes.
SimulatedData simulate_dataset(const GameSpec& g, const SimulateOptions& opts);

}  // namespace disclosure
