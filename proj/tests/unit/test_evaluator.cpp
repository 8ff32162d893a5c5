#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lfw2vec/error.hpp"
#include "lfw2vec/evaluator.hpp"

using namespace lfw2vec;

namespace {

Embeddings make(std::vector<std::string> words, int dim, std::vector<float> values) {
  return {std::move(words), dim, std::move(values)};
}

// Independent 3CosAdd: double precision, explicit cosine, ascending scan.
WordId brute_answer(const Embeddings& e, WordId a, WordId b, WordId c) {
  auto unit = [&](std::size_t i) {
    std::vector<double> v(e.row(i).begin(), e.row(i).end());
    double n = 0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > 0)
      for (double& x : v) x /= n;
    return v;
  };
  const auto ua = unit(static_cast<std::size_t>(a)), ub = unit(static_cast<std::size_t>(b)),
             uc = unit(static_cast<std::size_t>(c));
  std::vector<double> t(ua.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = ub[k] - ua[k] + uc[k];
  double tn = 0;
  for (double x : t) tn += x * x;
  tn = std::sqrt(tn);
  WordId best = -1;
  double best_cos = -2;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto id = static_cast<WordId>(i);
    if (id == a || id == b || id == c) continue;
    const auto u = unit(i);
    double s = 0;
    for (std::size_t k = 0; k < t.size(); ++k) s += t[k] * u[k];
    s /= tn;
    if (s > best_cos) {
      best_cos = s;
      best = id;
    }
  }
  return best;
}

Embeddings random_embeddings(std::size_t n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  Embeddings e;
  e.dim = dim;
  for (std::size_t i = 0; i < n; ++i) e.words.push_back("w" + std::to_string(i));
  e.values.resize(n * static_cast<std::size_t>(dim));
  for (auto& v : e.values) v = g(rng);
  return e;
}

}  // namespace

TEST_CASE("question file parsing") {
  SUBCASE("single question") {
    std::istringstream in(": capital-common-countries\nAthens Greece Baghdad Iraq\n");
    const auto q = load_questions(in);
    REQUIRE(q.size() == 1);
    CHECK(q[0].a == "athens");
    CHECK(q[0].expected == "iraq");
    CHECK(q[0].category == "capital-common-countries");
    CHECK(q[0].line == 2);
  }
  SUBCASE("three tokens is a parse error naming the line") {
    std::istringstream in(": family\nboy girl brother sister\nboy girl king\n");
    try {
      load_questions(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("question before any category") {
    std::istringstream in("a b c d\n");
    CHECK_THROWS_AS(load_questions(in), ParseError);
  }
  CHECK(is_syntactic_category("gram3-comparative"));
  CHECK_FALSE(is_syntactic_category("family"));
}

TEST_CASE("standard question file structure") {
  const auto q = load_questions(std::filesystem::path(LFW2VEC_QUESTIONS_FILE));
  CHECK(q.size() == 19544);
  const auto cats = question_categories(q);
  int semantic = 0, syntactic = 0;
  for (const auto& c : cats) (is_syntactic_category(c) ? syntactic : semantic)++;
  CHECK(semantic == 5);
  CHECK(syntactic == 9);
  std::size_t sem_q = 0;
  for (const auto& x : q) sem_q += !is_syntactic_category(x.category);
  CHECK(sem_q == 8869);
  CHECK(q.size() - sem_q == 10675);
}

TEST_CASE("3CosAdd on toy embeddings") {
  SUBCASE("orthonormal words, degenerate query excludes the inputs") {
    const auto e = make({"x", "y", "z"}, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    AnalogySolver s(e);
    CHECK(s.answer(0, 0, 1) == 2);
    CHECK(brute_answer(e, 0, 0, 1) == 2);
  }
  SUBCASE("exact construction in two dimensions") {
    const auto e = make({"a", "b", "c", "target", "other"}, 2, {1, 0, 0, 1, 1, 0, 0, 3, 1, 1});
    AnalogySolver s(e);
    // b - a + c = (0, 1); "target" normalizes to (0, 1).
    CHECK(s.answer(0, 1, 2) == 3);
  }
  SUBCASE("ties go to the lowest index") {
    const auto e = make({"a", "b", "c", "p", "q"}, 2, {1, 0, 1, 0, 1, 0, 2, 0, 1, 0});
    AnalogySolver s(e);
    CHECK(s.answer(0, 1, 2) == 3);
  }
}

TEST_CASE("3CosAdd agrees with a brute-force oracle; exclusion and scale invariance") {
  const auto e = random_embeddings(300, 12, 21);
  AnalogySolver s(e);
  auto scaled = e;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> scale(0.1f, 10.0f);
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    const float f = scale(rng);
    for (float& v : scaled.row(i)) v *= f;
  }
  AnalogySolver s_scaled(scaled);
  std::uniform_int_distribution<WordId> pick(0, 299);
  for (int trial = 0; trial < 200; ++trial) {
    const WordId a = pick(rng), b = pick(rng), c = pick(rng);
    const WordId got = s.answer(a, b, c);
    CHECK(got != a);
    CHECK(got != b);
    CHECK(got != c);
    CHECK(got == brute_answer(e, a, b, c));
    CHECK(s_scaled.answer(a, b, c) == got);
  }
}

TEST_CASE("evaluation report over constructed perfect-recall embeddings") {
  // x_i = e_i, y_i = (e_i + f) / sqrt(2): y_b - x_a + x_c is closest to y_c.
  const int pairs = 6;
  const int dim = pairs + 1;
  Embeddings e;
  e.dim = dim;
  for (int i = 0; i < pairs; ++i) {
    e.words.push_back("x" + std::to_string(i));
    std::vector<float> row(dim, 0.0f);
    row[static_cast<std::size_t>(i)] = 1.0f;
    e.values.insert(e.values.end(), row.begin(), row.end());
  }
  for (int i = 0; i < pairs; ++i) {
    e.words.push_back("y" + std::to_string(i));
    std::vector<float> row(dim, 0.0f);
    row[static_cast<std::size_t>(i)] = 1.0f;
    row[static_cast<std::size_t>(pairs)] = 1.0f;
    e.values.insert(e.values.end(), row.begin(), row.end());
  }
  std::ostringstream file;
  file << ": semantic-pairs\n";
  for (int a = 0; a < pairs; ++a)
    for (int c = 0; c < pairs; ++c)
      if (a != c) file << "x" << a << " y" << a << " x" << c << " y" << c << "\n";
  file << "x0 y0 missing y1\n";
  file << ": gram-pairs\n";
  for (int a = 0; a < 3; ++a) file << "x" << a << " y" << a << " x" << a + 1 << " y" << a + 1 << "\n";
  file << "x0 y0 x1 nothere\nX0 Y0 X2 Y2\n";
  std::istringstream in(file.str());
  const auto questions = load_questions(in);
  AnalogySolver solver(e);
  for (int threads : {1, 3}) {
    const auto report = evaluate(solver, questions, threads);
    REQUIRE(report.categories.size() == 2);
    const auto& sem = report.categories[0];
    const auto& syn = report.categories[1];
    CHECK(sem.semantic);
    CHECK_FALSE(syn.semantic);
    CHECK(sem.total == pairs * (pairs - 1) + 1);
    CHECK(sem.answered == pairs * (pairs - 1));
    CHECK(sem.correct == sem.answered);
    CHECK(syn.total == 5);
    CHECK(syn.answered == 4);
    CHECK(syn.correct == 4);
    CHECK(report.skipped == 2);
    CHECK(report.overall.total == sem.total + syn.total);
    CHECK(report.overall.correct == sem.correct + syn.correct);
    CHECK(report.semantic.correct == sem.correct);
    CHECK(report.syntactic.total == syn.total);
    CHECK(sem.accuracy() == doctest::Approx(double(sem.answered) / sem.total));
  }
}

TEST_CASE("empty question list gives an empty report") {
  const auto e = random_embeddings(5, 3, 1);
  const auto report = evaluate(AnalogySolver(e), {}, 2);
  CHECK(report.categories.empty());
  CHECK(report.overall.total == 0);
  CHECK(report.overall.correct == 0);
  CHECK(report.skipped == 0);
}

TEST_CASE("report formats") {
  EvalReport r;
  r.categories = {{"family", true, 3, 4, 5}, {"gram1-adjective-to-adverb", false, 1, 2, 4}};
  r.semantic = {"semantic", true, 3, 4, 5};
  r.syntactic = {"syntactic", false, 1, 2, 4};
  r.overall = {"total", true, 4, 6, 9};
  r.skipped = 3;
  std::ostringstream table, csv, json;
  write_report(r, ReportFormat::Table, table);
  write_report(r, ReportFormat::Csv, csv);
  write_report(r, ReportFormat::Json, json);
  CHECK(table.str().find("60.00%  (3/5)") != std::string::npos);
  CHECK(table.str().find("44.44%  (4/9)") != std::string::npos);
  CHECK(csv.str().find("family,semantic,3,4,5,0.6\n") != std::string::npos);
  CHECK(json.str().find("\"skipped\": 3") != std::string::npos);
  CHECK_THROWS_AS(parse_report_format("xml"), ConfigError);
}
