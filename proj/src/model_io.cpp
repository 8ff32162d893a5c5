#include "lfw2vec/model_io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "lfw2vec/error.hpp"

namespace lfw2vec {

namespace {

using nlohmann::json;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

void check_shape(const Embeddings& m) {
  if (m.dim < 1) throw ConfigError("model dimension must be >= 1");
  if (m.values.size() != m.words.size() * static_cast<std::size_t>(m.dim)) {
    throw ConfigError("model matrix does not match the word list");
  }
  for (const auto& w : m.words) {
    if (w.empty() || w.find_first_of(" \t\n\r") != std::string::npos) {
      throw ConfigError("word '" + w + "' cannot be stored (empty or contains whitespace)");
    }
  }
}

void write_header(const Embeddings& m, std::ostream& out) { out << m.words.size() << ' ' << m.dim << '\n'; }

struct Header {
  std::size_t vocab = 0;
  int dim = 0;
};

Header read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  std::istringstream fields(line);
  long long vocab = -1;
  long long dim = -1;
  std::string extra;
  if (!(fields >> vocab >> dim) || (fields >> extra) || vocab < 0 || dim < 1) {
    throw ParseError("malformed header '" + line + "' (expected 'vocab_size dim')", 1);
  }
  return {static_cast<std::size_t>(vocab), static_cast<int>(dim)};
}

bool parse_float(std::string_view text, float& value) {
  // from_chars for float is not available everywhere yet; strtof needs a terminated copy.
  std::string copy(text);
  char* end = nullptr;
  value = std::strtof(copy.c_str(), &end);
  return !copy.empty() && end == copy.c_str() + copy.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::uint32_t to_little(std::uint32_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) | (bits >> 24);
  }
  return bits;
}

}  // namespace

ModelFormat parse_model_format(std::string_view text) {
  if (text == "text" || text == "txt") return ModelFormat::Text;
  if (text == "bin" || text == "binary") return ModelFormat::Binary;
  throw ConfigError("unknown model format '" + std::string(text) + "' (expected text or bin)");
}

void save_text(const Embeddings& model, std::ostream& out) {
  check_shape(model);
  write_header(model, out);
  char buf[32];
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << model.words[i];
    for (float v : model.row(i)) {
      const int len = std::snprintf(buf, sizeof buf, " %.6g", static_cast<double>(v));
      out.write(buf, len);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing text model");
}

void save_text(const Embeddings& model, const std::filesystem::path& path) {
  auto out = open_output(path);
  save_text(model, out);
}

Embeddings load_text(std::istream& in) {
  const Header header = read_header(in);
  Embeddings m;
  m.dim = header.dim;
  m.words.reserve(header.vocab);
  m.values.reserve(header.vocab * static_cast<std::size_t>(header.dim));
  std::string line;
  std::int64_t number = 1;
  while (m.words.size() < header.vocab) {
    if (!std::getline(in, line)) {
      throw ParseError("expected " + std::to_string(header.vocab) + " records, found " +
                           std::to_string(m.words.size()),
                       number + 1);
    }
    ++number;
    const auto fields = split_fields(line);
    if (fields.size() != static_cast<std::size_t>(header.dim) + 1) {
      throw ParseError("expected word and " + std::to_string(header.dim) + " values, found " +
                           std::to_string(fields.size()) + " fields",
                       number);
    }
    m.words.emplace_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      float v = 0.0f;
      if (!parse_float(fields[k], v)) throw ParseError("bad value '" + std::string(fields[k]) + "'", number);
      m.values.push_back(v);
    }
  }
  while (std::getline(in, line)) {
    ++number;
    if (!split_fields(line).empty()) throw ParseError("more records than the header declares", number);
  }
  return m;
}

Embeddings load_text(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_text(in);
}

void save_binary(const Embeddings& model, std::ostream& out) {
  check_shape(model);
  write_header(model, out);
  std::vector<char> record(static_cast<std::size_t>(model.dim) * 4);
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << model.words[i] << ' ';
    char* p = record.data();
    for (float v : model.row(i)) {
      const std::uint32_t bits = to_little(std::bit_cast<std::uint32_t>(v));
      std::memcpy(p, &bits, 4);
      p += 4;
    }
    out.write(record.data(), static_cast<std::streamsize>(record.size()));
    out.put('\n');
  }
  if (!out) throw IoError("failed writing binary model");
}

void save_binary(const Embeddings& model, const std::filesystem::path& path) {
  auto out = open_output(path);
  save_binary(model, out);
}

Embeddings load_binary(std::istream& in) {
  const Header header = read_header(in);
  Embeddings m;
  m.dim = header.dim;
  m.words.reserve(header.vocab);
  m.values.resize(header.vocab * static_cast<std::size_t>(header.dim));
  std::vector<char> record(static_cast<std::size_t>(header.dim) * 4);
  auto truncated = [&](std::size_t i, const std::string& what) {
    return ParseError("truncated record at word index " + std::to_string(i) + ": " + what);
  };
  for (std::size_t i = 0; i < header.vocab; ++i) {
    std::string word;
    int c = in.get();
    while (c == '\n') c = in.get();
    while (c != EOF && c != ' ') {
      word.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (c == EOF) throw truncated(i, word.empty() ? "missing word" : "missing vector for '" + word + "'");
    in.read(record.data(), static_cast<std::streamsize>(record.size()));
    if (static_cast<std::size_t>(in.gcount()) != record.size()) {
      throw truncated(i, "vector for '" + word + "' has " + std::to_string(in.gcount()) + " of " +
                             std::to_string(record.size()) + " bytes");
    }
    float* row = m.values.data() + i * static_cast<std::size_t>(header.dim);
    for (int k = 0; k < header.dim; ++k) {
      std::uint32_t bits = 0;
      std::memcpy(&bits, record.data() + 4 * k, 4);
      row[k] = std::bit_cast<float>(to_little(bits));
    }
    if (in.peek() == '\n') in.get();
    m.words.push_back(std::move(word));
  }
  return m;
}

Embeddings load_binary(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_binary(in);
}

void save_model(const Embeddings& model, const std::filesystem::path& path, ModelFormat format) {
  if (format == ModelFormat::Text) {
    save_text(model, path);
  } else {
    save_binary(model, path);
  }
}

ModelFormat detect_model_format(const std::filesystem::path& path) {
  auto in = open_input(path);
  const Header header = read_header(in);
  if (header.vocab == 0) return ModelFormat::Text;
  std::string line;
  std::getline(in, line);
  const auto fields = split_fields(line);
  if (fields.size() != static_cast<std::size_t>(header.dim) + 1) return ModelFormat::Binary;
  for (std::size_t k = 1; k < fields.size(); ++k) {
    float v = 0.0f;
    if (!parse_float(fields[k], v)) return ModelFormat::Binary;
  }
  return ModelFormat::Text;
}

Embeddings load_model(const std::filesystem::path& path) {
  return detect_model_format(path) == ModelFormat::Text ? load_text(path) : load_binary(path);
}

void save_sidecar(const Sidecar& s, std::ostream& out) {
  const TrainConfig& c = s.config;
  json j;
  j["model"] = std::string(to_string(c.model));
  j["dim"] = c.dim;
  j["window_strategy"] = std::string(to_string(c.window_strategy));
  j["window"] = c.window;
  j["edws_phases"] = c.edws_phases;
  j["epochs"] = c.epochs;
  j["lfw"] = c.lfw ? std::string(to_string(*c.lfw)) : std::string("none");
  j["freeze_lfw"] = c.freeze_lfw;
  j["negatives"] = c.negatives;
  j["learning_rate"] = c.initial_learning_rate();
  j["lfw_lr_scale"] = c.lfw_lr_scale;
  j["lfw_flush_interval"] = c.lfw_flush_interval;
  j["subsample"] = c.subsample;
  j["distortion"] = c.distortion;
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  j["vocab_size"] = s.vocab_size;
  j["corpus_tokens"] = s.corpus_tokens;
  j["corpus"] = s.corpus;
  if (s.lfw) {
    json params = json::object();
    const auto names = s.lfw->names();
    for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = s.lfw->values[i];
    j["lfw_params"] = params;
  }
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing sidecar");
}

void save_sidecar(const Sidecar& sidecar, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  save_sidecar(sidecar, out);
}

Sidecar load_sidecar(std::istream& in) {
  json j;
  try {
    in >> j;
    Sidecar s;
    TrainConfig& c = s.config;
    c.model = parse_model_kind(j.at("model").get<std::string>());
    c.dim = j.at("dim").get<int>();
    c.window_strategy = parse_window_strategy(j.at("window_strategy").get<std::string>());
    c.window = j.at("window").get<int>();
    c.edws_phases = j.value("edws_phases", 3);
    c.epochs = j.at("epochs").get<int>();
    const auto lfw = j.value("lfw", std::string("none"));
    if (lfw != "none") c.lfw = parse_lfw_formula(lfw);
    c.freeze_lfw = j.value("freeze_lfw", false);
    c.negatives = j.at("negatives").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.lfw_lr_scale = j.value("lfw_lr_scale", 0.1);
    c.lfw_flush_interval = j.value("lfw_flush_interval", 10000);
    c.subsample = j.value("subsample", 0.0);
    c.distortion = j.value("distortion", 0.75);
    c.threads = j.value("threads", 1);
    c.seed = j.value("seed", std::uint64_t{1});
    s.vocab_size = j.value("vocab_size", std::size_t{0});
    s.corpus_tokens = j.value("corpus_tokens", std::int64_t{0});
    s.corpus = j.value("corpus", std::string());
    if (c.lfw && j.contains("lfw_params")) {
      LfwParams p;
      p.formula = *c.lfw;
      const auto names = p.names();
      for (std::size_t i = 0; i < names.size(); ++i) p.values[i] = j.at("lfw_params").at(names[i]).get<double>();
      s.lfw = p;
    }
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("sidecar: ") + e.what());
  }
}

Sidecar load_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return load_sidecar(in);
}

}  // namespace lfw2vec
