#include "lfw2vec/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "lfw2vec/error.hpp"
#include "lfw2vec/kernels.hpp"

namespace lfw2vec {

namespace {

constexpr std::size_t kQueryBatch = 64;
constexpr std::size_t kRowBlock = 256;

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

void add(CategoryScore& into, const CategoryScore& from) {
  into.correct += from.correct;
  into.answered += from.answered;
  into.total += from.total;
}

}  // namespace

bool is_syntactic_category(std::string_view category) { return category.starts_with("gram"); }

std::vector<AnalogyQuestion> load_questions(std::istream& in) {
  std::vector<AnalogyQuestion> questions;
  std::string line;
  std::string category;
  std::int64_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == ':') {
      category = trim(text.substr(1));
      if (category.empty()) throw ParseError("empty category name", number);
      continue;
    }
    if (category.empty()) throw ParseError("question before any ': category' header", number);
    std::istringstream fields(text);
    std::vector<std::string> words;
    for (std::string w; fields >> w;) words.push_back(lowercase(std::move(w)));
    if (words.size() != 4) {
      throw ParseError("expected 4 words, found " + std::to_string(words.size()), number);
    }
    questions.push_back({words[0], words[1], words[2], words[3], category, number});
  }
  if (in.bad()) throw IoError("read failure while loading questions");
  return questions;
}

std::vector<AnalogyQuestion> load_questions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return load_questions(in);
}

std::vector<std::string> question_categories(std::span<const AnalogyQuestion> questions) {
  std::vector<std::string> names;
  for (const auto& q : questions) {
    if (names.empty() || names.back() != q.category) {
      if (std::find(names.begin(), names.end(), q.category) == names.end()) names.push_back(q.category);
    }
  }
  return names;
}

AnalogySolver::AnalogySolver(const Embeddings& embeddings)
    : words_(embeddings.words), dim_(embeddings.dim), unit_(embeddings.values) {
  if (unit_.size() != words_.size() * static_cast<std::size_t>(dim_)) {
    throw ConfigError("embedding matrix does not match the word list");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], static_cast<WordId>(i));
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    float* row = unit_.data() + i * d;
    double norm = 0.0;
    for (std::size_t k = 0; k < d; ++k) norm += static_cast<double>(row[k]) * row[k];
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (std::size_t k = 0; k < d; ++k) row[k] = static_cast<float>(row[k] / norm);
    }
  }
}

std::optional<WordId> AnalogySolver::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool AnalogySolver::resolvable(const AnalogyQuestion& q) const {
  return find(q.a) && find(q.b) && find(q.c) && find(q.expected);
}

std::optional<WordId> AnalogySolver::answer(const AnalogyQuestion& q) const {
  if (!resolvable(q)) return std::nullopt;
  return answer(*find(q.a), *find(q.b), *find(q.c));
}

WordId AnalogySolver::answer(WordId a, WordId b, WordId c) const {
  const std::array<WordId, 3> query{a, b, c};
  WordId out = -1;
  answer_batch(std::span(&query, 1), std::span(&out, 1));
  return out;
}

void AnalogySolver::answer_batch(std::span<const std::array<WordId, 3>> queries, std::span<WordId> out) const {
  const auto d = static_cast<std::size_t>(dim_);
  const std::size_t n = words_.size();
  std::vector<float> targets(queries.size() * d);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto [a, b, c] = queries[q];
    const float* ua = unit_.data() + static_cast<std::size_t>(a) * d;
    const float* ub = unit_.data() + static_cast<std::size_t>(b) * d;
    const float* uc = unit_.data() + static_cast<std::size_t>(c) * d;
    float* t = targets.data() + q * d;
    for (std::size_t k = 0; k < d; ++k) t[k] = ub[k] - ua[k] + uc[k];
  }
  std::vector<float> best(queries.size(), -std::numeric_limits<float>::infinity());
  for (std::size_t q = 0; q < queries.size(); ++q) out[q] = -1;

  for (std::size_t block = 0; block < n; block += kRowBlock) {
    const std::size_t stop = std::min(n, block + kRowBlock);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const float* t = targets.data() + q * d;
      const auto& ex = queries[q];
      for (std::size_t i = block; i < stop; ++i) {
        const auto id = static_cast<WordId>(i);
        if (id == ex[0] || id == ex[1] || id == ex[2]) continue;
        const float s = kernels::dot(t, unit_.data() + i * d, d);
        if (s > best[q] || out[q] < 0) {
          best[q] = s;
          out[q] = id;
        }
      }
    }
  }
}

EvalReport evaluate(const AnalogySolver& solver, std::span<const AnalogyQuestion> questions, int threads) {
  EvalReport report;
  const auto names = question_categories(questions);
  for (const auto& name : names) report.categories.push_back({name, !is_syntactic_category(name)});
  if (questions.empty()) return report;

  std::vector<std::array<WordId, 3>> queries;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& q = questions[i];
    if (!solver.resolvable(q)) continue;
    queries.push_back({*solver.find(q.a), *solver.find(q.b), *solver.find(q.c)});
    owner.push_back(i);
  }
  std::vector<WordId> answers(queries.size(), -1);
  const std::size_t batches = (queries.size() + kQueryBatch - 1) / kQueryBatch;
  const auto workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), batches));
  auto run = [&](std::size_t w) {
    for (std::size_t b = w; b < batches; b += workers) {
      const std::size_t first = b * kQueryBatch;
      const std::size_t count = std::min(kQueryBatch, queries.size() - first);
      solver.answer_batch(std::span(queries).subspan(first, count), std::span(answers).subspan(first, count));
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  auto category_of = [&](const std::string& name) -> CategoryScore& {
    return *std::find_if(report.categories.begin(), report.categories.end(),
                         [&](const CategoryScore& s) { return s.name == name; });
  };
  for (const auto& q : questions) ++category_of(q.category).total;
  for (std::size_t j = 0; j < queries.size(); ++j) {
    const auto& q = questions[owner[j]];
    auto& score = category_of(q.category);
    ++score.answered;
    if (answers[j] == *solver.find(q.expected)) ++score.correct;
  }
  for (const auto& s : report.categories) {
    add(s.semantic ? report.semantic : report.syntactic, s);
    add(report.overall, s);
  }
  report.skipped = report.overall.total - report.overall.answered;
  return report;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "table") return ReportFormat::Table;
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  throw ConfigError("unknown report format '" + std::string(text) + "' (expected table, csv or json)");
}

namespace {

std::string percent(const CategoryScore& s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * s.accuracy() << '%';
  return os.str();
}

void table_row(std::ostream& out, const CategoryScore& s, const std::string& label, int width) {
  out << std::left << std::setw(width) << label << std::right << std::setw(8) << percent(s) << "  (" << s.correct
      << '/' << s.total << ")\n";
}

nlohmann::json to_json(const CategoryScore& s) {
  return {{"category", s.name},      {"semantic", s.semantic}, {"correct", s.correct},
          {"answered", s.answered}, {"total", s.total},       {"accuracy", s.accuracy()}};
}

}  // namespace

void write_report(const EvalReport& report, ReportFormat format, std::ostream& out) {
  switch (format) {
    case ReportFormat::Table: {
      int width = 12;
      for (const auto& s : report.categories) width = std::max(width, static_cast<int>(s.name.size()) + 4);
      out << std::left << std::setw(width) << "category" << std::right << std::setw(8) << "accuracy"
          << "  (correct/total)\n";
      for (bool semantic : {true, false}) {
        table_row(out, semantic ? report.semantic : report.syntactic, semantic ? "Semantic" : "Syntactic", width);
        for (const auto& s : report.categories) {
          if (s.semantic == semantic) table_row(out, s, "  " + s.name, width);
        }
      }
      table_row(out, report.overall, "Total", width);
      out << "skipped (out of vocabulary): " << report.skipped << '\n';
      break;
    }
    case ReportFormat::Csv: {
      out << "category,group,correct,answered,total,accuracy\n";
      auto row = [&](const CategoryScore& s, const char* group) {
        out << s.name << ',' << group << ',' << s.correct << ',' << s.answered << ',' << s.total << ','
            << std::setprecision(6) << s.accuracy() << '\n';
      };
      for (const auto& s : report.categories) row(s, s.semantic ? "semantic" : "syntactic");
      row(report.semantic, "rollup");
      row(report.syntactic, "rollup");
      row(report.overall, "rollup");
      break;
    }
    case ReportFormat::Json: {
      nlohmann::json j;
      j["categories"] = nlohmann::json::array();
      for (const auto& s : report.categories) j["categories"].push_back(to_json(s));
      j["semantic"] = to_json(report.semantic);
      j["syntactic"] = to_json(report.syntactic);
      j["total"] = to_json(report.overall);
      j["skipped"] = report.skipped;
      out << j.dump(2) << '\n';
      break;
    }
  }
  if (!out) throw IoError("failed writing report");
}

}  // namespace lfw2vec
