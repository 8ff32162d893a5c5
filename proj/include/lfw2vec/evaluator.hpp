#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lfw2vec/embeddings.hpp"

namespace lfw2vec {

/// "a : b :: c : expected", lowercased.
struct AnalogyQuestion {
  std::string a, b, c, expected;
  std::string category;
  std::int64_t line = 0;
};

/// Categories whose names start with "gram" are syntactic; the rest are semantic.
bool is_syntactic_category(std::string_view category);

/// Standard question-file layout: ": category" header lines followed by
/// four words per line. Throws ParseError with the line number.
std::vector<AnalogyQuestion> load_questions(std::istream& in);
std::vector<AnalogyQuestion> load_questions(const std::filesystem::path& path);

/// Category names in first-appearance order.
std::vector<std::string> question_categories(std::span<const AnalogyQuestion> questions);

/// 3CosAdd over length-normalized rows with a brute-force scan of the whole
/// vocabulary. The three query words are never returned; ties go to the
/// lowest index.
class AnalogySolver {
 public:
  explicit AnalogySolver(const Embeddings& embeddings);

  std::size_t size() const noexcept { return words_.size(); }
  int dim() const noexcept { return dim_; }
  const std::string& word(std::size_t i) const { return words_.at(i); }
  std::optional<WordId> find(const std::string& word) const;

  bool resolvable(const AnalogyQuestion& q) const;

  /// nullopt when any of the four words is out of vocabulary.
  std::optional<WordId> answer(const AnalogyQuestion& q) const;
  WordId answer(WordId a, WordId b, WordId c) const;

  /// Answers several index triples at once; rows are streamed once per batch.
  void answer_batch(std::span<const std::array<WordId, 3>> queries, std::span<WordId> out) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
  int dim_ = 0;
  std::vector<float> unit_;
};

struct CategoryScore {
  std::string name;
  bool semantic = true;
  std::int64_t correct = 0;
  std::int64_t answered = 0;  // resolvable questions
  std::int64_t total = 0;     // all questions, including out-of-vocabulary ones

  double accuracy() const { return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct EvalReport {
  std::vector<CategoryScore> categories;
  CategoryScore semantic{"semantic", true};
  CategoryScore syntactic{"syntactic", false};
  CategoryScore overall{"total", true};
  std::int64_t skipped = 0;  // questions with an out-of-vocabulary word
};

EvalReport evaluate(const AnalogySolver& solver, std::span<const AnalogyQuestion> questions, int threads = 1);

enum class ReportFormat { Table, Csv, Json };
ReportFormat parse_report_format(std::string_view text);
void write_report(const EvalReport& report, ReportFormat format, std::ostream& out);

}  // namespace lfw2vec
