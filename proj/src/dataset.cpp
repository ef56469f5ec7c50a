#include "disclosure/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "disclosure/rng.hpp"

namespace disclosure {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<bool> parse_disclosed(std::string v) {
  v = trim(v);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  return std::nullopt;
}

LoadReport load_csv(std::ifstream& in) {
  LoadReport report;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file, header expected");

  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = i;
  for (const char* need : {"article_id", "user_id", "disclosed"})
    if (!col.count(need))
      throw std::runtime_error(std::string("missing required column: ") + need);

  auto get = [&](const std::vector<std::string>& fields, const char* name)
      -> std::optional<std::string> {
    auto it = col.find(name);
    if (it == col.end() || it->second >= fields.size()) return std::nullopt;
    return fields[it->second];
  };

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    auto bad = [&](std::string msg) { report.row_errors.push_back({lineno, std::move(msg)}); };

    auto aid = get(fields, "article_id");
    auto uid = get(fields, "user_id");
    auto dis = get(fields, "disclosed");
    if (!aid || !uid || !dis) {
      bad("too few fields");
      continue;
    }
    CommentRecord rec;
    rec.article_id = trim(*aid);
    rec.user_id = trim(*uid);
    if (rec.article_id.empty()) {
      bad("empty article_id");
      continue;
    }
    if (rec.user_id.empty()) {
      bad("empty user_id");
      continue;
    }
    auto flag = parse_disclosed(*dis);
    if (!flag) {
      bad("disclosed must be one of true/false/1/0, got '" + trim(*dis) + "'");
      continue;
    }
    rec.disclosed = *flag;
    if (auto t = get(fields, "timestamp"); t && !trim(*t).empty()) rec.timestamp = trim(*t);
    if (auto s = get(fields, "source"); s && !trim(*s).empty()) rec.source = trim(*s);
    report.records.push_back(std::move(rec));
  }
  return report;
}

LoadReport load_jsonl(std::ifstream& in) {
  LoadReport report;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto bad = [&](std::string msg) { report.row_errors.push_back({lineno, std::move(msg)}); };

    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      bad("not a JSON object");
      continue;
    }
    if (!obj.contains("article_id") || !obj.contains("user_id") || !obj.contains("disclosed")) {
      bad("missing required key");
      continue;
    }
    CommentRecord rec;
    if (!obj["article_id"].is_string() || !obj["user_id"].is_string()) {
      bad("article_id and user_id must be strings");
      continue;
    }
    rec.article_id = obj["article_id"].get<std::string>();
    rec.user_id = obj["user_id"].get<std::string>();
    if (rec.article_id.empty() || rec.user_id.empty()) {
      bad("empty article_id or user_id");
      continue;
    }
    const auto& d = obj["disclosed"];
    if (d.is_boolean()) {
      rec.disclosed = d.get<bool>();
    } else if (d.is_number_integer() &&
               (d.get<int>() == 0 || d.get<int>() == 1)) {
      rec.disclosed = d.get<int>() == 1;
    } else if (d.is_string()) {
      auto flag = parse_disclosed(d.get<std::string>());
      if (!flag) {
        bad("disclosed must be one of true/false/1/0");
        continue;
      }
      rec.disclosed = *flag;
    } else {
      bad("disclosed must be one of true/false/1/0");
      continue;
    }
    if (obj.contains("timestamp") && obj["timestamp"].is_string())
      rec.timestamp = obj["timestamp"].get<std::string>();
    if (obj.contains("source") && obj["source"].is_string())
      rec.source = obj["source"].get<std::string>();
    report.records.push_back(std::move(rec));
  }
  return report;
}

}  // namespace

LoadReport load_records(const std::string& path, RecordFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  LoadReport report = format == RecordFormat::csv ? load_csv(in) : load_jsonl(in);
  if (report.records.empty()) throw std::runtime_error("zero valid rows in " + path);
  return report;
}

std::vector<ArticleAggregate> aggregate_articles(const std::vector<CommentRecord>& records) {
  struct Acc {
    std::size_t r = 0;
    std::set<std::string> users;
    std::set<std::string> disclosers;
  };
  std::map<std::string, Acc> by_article;
  for (const auto& rec : records) {
    auto& acc = by_article[rec.article_id];
    ++acc.r;
    acc.users.insert(rec.user_id);
    if (rec.disclosed) acc.disclosers.insert(rec.user_id);
  }
  std::vector<ArticleAggregate> out;
  out.reserve(by_article.size());
  for (auto& [aid, acc] : by_article) {
    ArticleAggregate agg;
    agg.article_id = aid;
    agg.r = acc.r;
    agg.s = acc.disclosers.size();
    agg.user_ids.assign(acc.users.begin(), acc.users.end());
    out.push_back(std::move(agg));
  }
  return out;
}

void write_records_csv(const std::string& path, const std::vector<CommentRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "article_id,user_id,disclosed,timestamp,source\n";
  for (const auto& rec : records) {
    out << rec.article_id << ',' << rec.user_id << ',' << (rec.disclosed ? "true" : "false")
        << ',' << rec.timestamp.value_or("") << ',' << rec.source.value_or("") << '\n';
  }
}

void write_aggregates_csv(const std::string& path,
                          const std::vector<ArticleAggregate>& aggregates) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "article_id,r,s\n";
  for (const auto& agg : aggregates)
    out << agg.article_id << ',' << agg.r << ',' << agg.s << '\n';
}

SimulatedData simulate_dataset(const GameSpec& g, const SimulateOptions& opts) {
  const std::size_t pool = g.n();
  if (opts.users_per_article == 0 || opts.users_per_article > pool)
    throw std::invalid_argument("simulate_dataset: users_per_article must be in [1, n]");
  if (!opts.strategies.empty() && opts.strategies.size() != pool)
    throw std::invalid_argument("simulate_dataset: strategies size must match pool");
  if (!(opts.x_min >= 0.0 && opts.x_max <= 1.0 && opts.x_min <= opts.x_max))
    throw std::invalid_argument("simulate_dataset: need 0 <= x_min <= x_max <= 1");

  SimulatedData data;
  Rng rng(opts.seed);

  data.strategies = opts.strategies;
  if (data.strategies.empty()) {
    data.strategies.resize(pool);
    for (auto& x : data.strategies) x = rng.uniform(opts.x_min, opts.x_max);
  }
  for (const auto& x : data.strategies)
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("simulate_dataset: strategies must lie in [0,1]");

  data.user_ids.reserve(pool);
  char buf[64];
  for (std::size_t j = 0; j < pool; ++j) {
    std::snprintf(buf, sizeof(buf), "u%04zu", j);
    data.user_ids.emplace_back(buf);
  }

  std::vector<std::size_t> idx(pool);
  for (std::size_t article = 0; article < opts.n_articles; ++article) {
    // partial Fisher-Yates: first users_per_article entries are the draw
    for (std::size_t j = 0; j < pool; ++j) idx[j] = j;
    for (std::size_t j = 0; j < opts.users_per_article; ++j)
      std::swap(idx[j], idx[j + rng.index(pool - j)]);

    std::vector<std::uint8_t> delta(opts.users_per_article);
    std::size_t s = 0;
    for (std::size_t j = 0; j < opts.users_per_article; ++j) {
      delta[j] = rng.bernoulli(data.strategies[idx[j]]) ? 1 : 0;
      s += delta[j];
    }
    const double eps = opts.noise_sigma > 0.0 ? opts.noise_sigma * rng.normal() : 0.0;
    if (s == 0) continue;  // reward formula gives a zero comment total

    const double mean_r = g.a() * std::pow(double(s), g.gamma()) * std::exp(eps);
    std::size_t r = std::size_t(std::llround(mean_r));
    r = std::max(r, opts.users_per_article);

    std::snprintf(buf, sizeof(buf), "a%05zu", article);
    const std::string aid(buf);
    std::snprintf(buf, sizeof(buf), "2015-%02zu-%02zuT%02zu:00:00Z", article / 28 % 12 + 1,
                  article % 28 + 1, article % 24);
    const std::string stamp(buf);

    for (std::size_t j = 0; j < opts.users_per_article; ++j) {
      CommentRecord rec{aid, data.user_ids[idx[j]], delta[j] == 1, stamp, std::string("sim")};
      data.records.push_back(std::move(rec));
    }
    for (std::size_t k = opts.users_per_article; k < r; ++k) {
      std::snprintf(buf, sizeof(buf), "f%05zu_%zu", article, k);
      CommentRecord rec{aid, buf, false, stamp, std::string("sim")};
      data.records.push_back(std::move(rec));
    }
  }
  return data;
}

}  // namespace disclosure
