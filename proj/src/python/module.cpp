#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "lfw2vec/corpus.hpp"
#include "lfw2vec/embeddings.hpp"
#include "lfw2vec/error.hpp"
#include "lfw2vec/evaluator.hpp"
#include "lfw2vec/lfw_weights.hpp"
#include "lfw2vec/model_io.hpp"
#include "lfw2vec/trainer.hpp"
#include "lfw2vec/window_schedule.hpp"

namespace py = pybind11;
using namespace lfw2vec;

namespace {

py::array_t<float> matrix(const std::vector<float>& values, std::size_t rows, int dim) {
  py::array_t<float> out({rows, static_cast<std::size_t>(dim)});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

Embeddings embeddings_from(std::vector<std::string> words, py::array_t<float, py::array::c_style | py::array::forcecast> vectors) {
  if (vectors.ndim() != 2) throw ConfigError("vectors must be a 2-d array");
  if (static_cast<std::size_t>(vectors.shape(0)) != words.size())
    throw ConfigError("vectors has " + std::to_string(vectors.shape(0)) + " rows for " + std::to_string(words.size()) +
                      " words");
  Embeddings e;
  e.words = std::move(words);
  e.dim = static_cast<int>(vectors.shape(1));
  e.values.assign(vectors.data(), vectors.data() + vectors.size());
  return e;
}

Corpus corpus_from_text(const std::string& text, std::int64_t min_count) {
  std::istringstream in(text);
  return make_corpus(in, min_count);
}

}  // namespace

PYBIND11_MODULE(_lfw2vec, m) {
  m.doc() = "CBOW / Skip-gram training with learnable formulated weights";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DegenerateVocabulary>(m, "DegenerateVocabulary", base.ptr());
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", base.ptr());

  py::enum_<ModelKind>(m, "ModelKind").value("CBOW", ModelKind::Cbow).value("SKIPGRAM", ModelKind::SkipGram);
  py::enum_<LfwFormula>(m, "LfwFormula")
      .value("EQ3", LfwFormula::PowerShared)
      .value("EQ4", LfwFormula::PowerSplit)
      .value("EQ5", LfwFormula::ExpShared)
      .value("EQ6", LfwFormula::ExpSplit);
  py::enum_<WindowStrategy>(m, "WindowStrategy")
      .value("FIXED", WindowStrategy::Fixed)
      .value("RANDOM", WindowStrategy::RandomDynamic)
      .value("EDWS", WindowStrategy::EpochBased);
  py::enum_<ModelFormat>(m, "ModelFormat").value("TEXT", ModelFormat::Text).value("BINARY", ModelFormat::Binary);

  py::class_<Vocabulary>(m, "Vocabulary")
      .def("__len__", &Vocabulary::size)
      .def("word", &Vocabulary::word)
      .def("count", &Vocabulary::count)
      .def("find", &Vocabulary::find)
      .def_property_readonly("words", &Vocabulary::words)
      .def_property_readonly("counts", &Vocabulary::counts)
      .def_property_readonly("total_tokens", &Vocabulary::total_tokens);

  py::class_<Corpus>(m, "Corpus")
      .def_readonly("vocab", &Corpus::vocab)
      .def_property_readonly("tokens", [](const Corpus& c) {
        py::array_t<WordId> out(c.tokens.size());
        std::copy(c.tokens.begin(), c.tokens.end(), out.mutable_data());
        return out;
      });

  m.def("load_corpus", &load_corpus, py::arg("path"), py::arg("min_count") = kDefaultDiscardAtMost,
        "Vocabulary and token ids; words seen at most min_count times are dropped.");
  m.def("corpus_from_text", &corpus_from_text, py::arg("text"), py::arg("min_count") = kDefaultDiscardAtMost);
  m.def("build_vocabulary", py::overload_cast<const std::filesystem::path&, std::int64_t>(&build_vocabulary),
        py::arg("path"), py::arg("min_count") = kDefaultDiscardAtMost);

  py::class_<LfwParams>(m, "LfwParams")
      .def(py::init([](LfwFormula f, std::vector<double> values) {
             LfwParams p{f, {}};
             if (values.size() > p.values.size()) throw ConfigError("too many parameter values");
             std::copy(values.begin(), values.end(), p.values.begin());
             return p;
           }),
           py::arg("formula"), py::arg("values") = std::vector<double>{})
      .def_readwrite("formula", &LfwParams::formula)
      .def_property_readonly("values",
                             [](const LfwParams& p) {
                               return std::vector<double>(p.values.begin(), p.values.begin() + p.count());
                             })
      .def_property_readonly("names", &LfwParams::names);

  m.def("weight", &weight, py::arg("params"), py::arg("offset"), py::arg("window"));
  m.def(
      "weight_gradients",
      [](const LfwParams& p, int offset, int window) {
        const auto g = weight_gradients(p, offset, window);
        return std::vector<double>(g.begin(), g.begin() + p.count());
      },
      py::arg("params"), py::arg("offset"), py::arg("window"));
  m.def(
      "export_weight_curve",
      [](const LfwParams& p, int window) {
        std::vector<std::tuple<int, double, int>> out;
        for (const auto& c : export_weight_curve(p, window)) out.emplace_back(c.distance, c.weight, c.side);
        return out;
      },
      py::arg("params"), py::arg("window"), "(distance, normalized weight, side) rows; side is 0, -1 or +1.");

  m.def(
      "window_for_epoch",
      [](int max_window, int epochs, int epoch, int phases) {
        return window_for_epoch({WindowStrategy::EpochBased, max_window, epochs, phases}, epoch);
      },
      py::arg("max_window"), py::arg("epochs"), py::arg("epoch"), py::arg("phases") = 3);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("model", &TrainConfig::model)
      .def_readwrite("dim", &TrainConfig::dim)
      .def_readwrite("window_strategy", &TrainConfig::window_strategy)
      .def_readwrite("window", &TrainConfig::window)
      .def_readwrite("edws_phases", &TrainConfig::edws_phases)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("lfw", &TrainConfig::lfw)
      .def_readwrite("freeze_lfw", &TrainConfig::freeze_lfw)
      .def_readwrite("negatives", &TrainConfig::negatives)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("subsample", &TrainConfig::subsample)
      .def_readwrite("threads", &TrainConfig::threads)
      .def_readwrite("seed", &TrainConfig::seed)
      .def("validate", &TrainConfig::validate);

  py::class_<EpochLog>(m, "EpochLog")
      .def_readonly("epoch", &EpochLog::epoch)
      .def_readonly("window", &EpochLog::window)
      .def_readonly("mean_loss", &EpochLog::mean_loss)
      .def_readonly("examples", &EpochLog::examples)
      .def_readonly("lfw", &EpochLog::lfw)
      .def_readonly("tokens_per_sec", &EpochLog::tokens_per_sec)
      .def("__str__", &format_epoch_log);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("lfw", &TrainResult::lfw)
      .def_readonly("epochs", &TrainResult::epochs)
      .def_readonly("seconds", &TrainResult::seconds)
      .def_property_readonly("input_vectors",
                             [](const TrainResult& r) {
                               return matrix(r.matrices.input, r.matrices.vocab_size, r.matrices.dim);
                             })
      .def_property_readonly("output_vectors", [](const TrainResult& r) {
        return matrix(r.matrices.output, r.matrices.vocab_size, r.matrices.dim);
      });

  m.def(
      "train",
      [](const Corpus& corpus, const TrainConfig& config, const EpochObserver& observer) {
        py::gil_scoped_release release;
        EpochObserver guarded;
        if (observer) {
          guarded = [&observer](const EpochLog& log) {
            py::gil_scoped_acquire acquire;
            observer(log);
          };
        }
        return train(corpus, config, guarded);
      },
      py::arg("corpus"), py::arg("config"), py::arg("on_epoch") = EpochObserver{});

  py::class_<Embeddings>(m, "Embeddings")
      .def(py::init(&embeddings_from), py::arg("words"), py::arg("vectors"))
      .def_readonly("words", &Embeddings::words)
      .def_readonly("dim", &Embeddings::dim)
      .def("__len__", &Embeddings::size)
      .def_property_readonly("vectors", [](const Embeddings& e) { return matrix(e.values, e.size(), e.dim); });

  m.def("make_embeddings", [](const Corpus& corpus, const TrainResult& r) {
    return make_embeddings(corpus.vocab, r.matrices);
  });
  m.def("save_model", &save_model, py::arg("embeddings"), py::arg("path"), py::arg("format") = ModelFormat::Binary);
  m.def("load_model", py::overload_cast<const std::filesystem::path&>(&load_model), py::arg("path"));
  m.def("detect_model_format", &detect_model_format, py::arg("path"));

  py::class_<AnalogyQuestion>(m, "AnalogyQuestion")
      .def_readonly("a", &AnalogyQuestion::a)
      .def_readonly("b", &AnalogyQuestion::b)
      .def_readonly("c", &AnalogyQuestion::c)
      .def_readonly("expected", &AnalogyQuestion::expected)
      .def_readonly("category", &AnalogyQuestion::category);
  m.def("load_questions", py::overload_cast<const std::filesystem::path&>(&load_questions), py::arg("path"));

  py::class_<CategoryScore>(m, "CategoryScore")
      .def_readonly("name", &CategoryScore::name)
      .def_readonly("semantic", &CategoryScore::semantic)
      .def_readonly("correct", &CategoryScore::correct)
      .def_readonly("answered", &CategoryScore::answered)
      .def_readonly("total", &CategoryScore::total)
      .def_property_readonly("accuracy", &CategoryScore::accuracy);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("categories", &EvalReport::categories)
      .def_readonly("semantic", &EvalReport::semantic)
      .def_readonly("syntactic", &EvalReport::syntactic)
      .def_readonly("overall", &EvalReport::overall)
      .def_readonly("skipped", &EvalReport::skipped)
      .def(
          "format",
          [](const EvalReport& r, const std::string& fmt) {
            std::ostringstream out;
            write_report(r, parse_report_format(fmt), out);
            return out.str();
          },
          py::arg("format") = "table");

  m.def(
      "evaluate",
      [](const Embeddings& e, const std::vector<AnalogyQuestion>& questions, int threads) {
        py::gil_scoped_release release;
        return evaluate(AnalogySolver(e), questions, threads);
      },
      py::arg("embeddings"), py::arg("questions"), py::arg("threads") = 1);
  m.def(
      "analogy",
      [](const Embeddings& e, const std::string& a, const std::string& b, const std::string& c) -> std::optional<std::string> {
        const AnalogySolver solver(e);
        const auto answer = solver.answer(AnalogyQuestion{a, b, c, a, "", 0});
        if (!answer) return std::nullopt;
        return solver.word(static_cast<std::size_t>(*answer));
      },
      py::arg("embeddings"), py::arg("a"), py::arg("b"), py::arg("c"), "3CosAdd answer to a : b :: c : ?");
}
