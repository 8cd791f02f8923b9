#include "npsr/model_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "npsr/error.hpp"

namespace npsr {
namespace {

constexpr const char* kPointMagic = "npsr-point-model 1";
constexpr const char* kSequenceMagic = "npsr-sequence-model 1";
constexpr const char* kMinMaxMagic = "npsr-minmax 1";

std::string hex(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  return std::string(buf, ptr);
}

double parse_hex(const std::string& token) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  bool negative = false;
  if (begin != end && *begin == '-') {
    negative = true;
    ++begin;
  }
  const auto [ptr, ec] = std::from_chars(begin, end, v, std::chars_format::hex);
  if (ec != std::errc() || ptr != end) throw ParseError(0, "bad hex float '" + token + "'");
  return negative ? -v : v;
}

class Writer {
 public:
  Writer(const std::filesystem::path& path, const char* magic) : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary);
    if (!out_) throw IoError("cannot write '" + path.string() + "'");
    out_ << magic << '\n';
  }

  template <typename T>
  void field(const char* key, const T& value) {
    out_ << key << ' ' << value << '\n';
  }
  void real(const char* key, double value) { out_ << key << ' ' << hex(value) << '\n'; }

  void matrix(const char* name, std::size_t rows, std::size_t cols, std::span<const double> data) {
    out_ << "matrix " << name << ' ' << rows << ' ' << cols << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (c) out_ << ' ';
        out_ << hex(data[r * cols + c]);
      }
      out_ << '\n';
    }
  }
  void matrix(const char* name, const Matrix& m) { matrix(name, m.rows(), m.cols(), m.values()); }
  void vector(const char* name, std::span<const double> v) { matrix(name, 1, v.size(), v); }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct Document {
  std::map<std::string, std::string> fields;
  std::map<std::string, Matrix> matrices;

  const std::string& field(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(0, "missing field '" + key + "'");
    return it->second;
  }
  std::size_t size(const std::string& key) const { return std::stoull(field(key)); }
  double real(const std::string& key) const { return parse_hex(field(key)); }
  const Matrix& matrix(const std::string& name) const {
    auto it = matrices.find(name);
    if (it == matrices.end()) throw ParseError(0, "missing matrix '" + name + "'");
    return it->second;
  }
  std::vector<double> vector(const std::string& name) const {
    const auto v = matrix(name).values();
    return {v.begin(), v.end()};
  }
};

Document read_document(const std::filesystem::path& path, const char* magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != magic) {
    throw ParseError(1, "'" + path.string() + "' is not a " + std::string(magic) + " file");
  }
  Document doc;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "matrix") {
      std::string name;
      std::size_t rows = 0, cols = 0;
      if (!(ls >> name >> rows >> cols)) throw ParseError(line_no, "bad matrix header");
      Matrix m(rows, cols);
      for (std::size_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw ParseError(line_no, "truncated matrix '" + name + "'");
        ++line_no;
        std::istringstream rs(line);
        std::string token;
        for (std::size_t c = 0; c < cols; ++c) {
          if (!(rs >> token)) throw ParseError(line_no, "short matrix row");
          m(r, c) = parse_hex(token);
        }
      }
      doc.matrices.emplace(name, std::move(m));
    } else {
      std::string rest;
      std::getline(ls >> std::ws, rest);
      doc.fields[key] = rest;
    }
  }
  return doc;
}

}  // namespace

void save_point_model(const PointModel& model, const std::filesystem::path& path) {
  Writer w(path, kPointMagic);
  w.field("input_dim", model.input_dim());
  w.field("latent_dim", model.latent_dim());
  w.field("activation", "tanh");
  w.real("learn_rate", model.hyper.learn_rate);
  w.field("epochs", model.hyper.epochs);
  w.field("batch_size", model.hyper.batch_size);
  w.field("seed", model.hyper.seed);
  w.field("optimizer", to_string(model.hyper.optimizer));
  w.matrix("encoder_weights", model.encoder_weights);
  w.vector("encoder_bias", model.encoder_bias);
  w.matrix("decoder_weights", model.decoder_weights);
  w.vector("decoder_bias", model.decoder_bias);
  w.vector("epoch_losses", model.epoch_losses);
}

PointModel load_point_model(const std::filesystem::path& path) {
  const Document doc = read_document(path, kPointMagic);
  PointModel m;
  m.hyper.latent_dim = doc.size("latent_dim");
  m.hyper.learn_rate = doc.real("learn_rate");
  m.hyper.epochs = doc.size("epochs");
  m.hyper.batch_size = doc.size("batch_size");
  m.hyper.seed = doc.size("seed");
  m.hyper.optimizer = parse_optimizer(doc.field("optimizer"));
  m.encoder_weights = doc.matrix("encoder_weights");
  m.encoder_bias = doc.vector("encoder_bias");
  m.decoder_weights = doc.matrix("decoder_weights");
  m.decoder_bias = doc.vector("decoder_bias");
  m.epoch_losses = doc.vector("epoch_losses");
  const std::size_t d = doc.size("input_dim");
  if (m.encoder_weights.rows() != d || m.encoder_weights.cols() != m.hyper.latent_dim ||
      m.decoder_weights.rows() != m.hyper.latent_dim || m.decoder_weights.cols() != d ||
      m.encoder_bias.size() != m.hyper.latent_dim || m.decoder_bias.size() != d) {
    throw ShapeError("point model file has inconsistent shapes");
  }
  return m;
}

void save_sequence_model(const SequenceModel& model, const std::filesystem::path& path) {
  Writer w(path, kSequenceMagic);
  w.field("gamma", model.gamma);
  w.field("delta", model.delta);
  w.field("channels", model.channels);
  w.real("ridge_lambda", model.ridge_lambda);
  w.field("stride", model.stride);
  w.matrix("weights", model.weights);
}

SequenceModel load_sequence_model(const std::filesystem::path& path) {
  const Document doc = read_document(path, kSequenceMagic);
  SequenceModel m;
  m.gamma = doc.size("gamma");
  m.delta = doc.size("delta");
  m.channels = doc.size("channels");
  m.ridge_lambda = doc.real("ridge_lambda");
  m.stride = doc.size("stride");
  m.weights = doc.matrix("weights");
  if (m.weights.rows() != m.feature_count() + 1 || m.weights.cols() != m.target_count()) {
    throw ShapeError("sequence model file has inconsistent shapes");
  }
  return m;
}

void save_minmax(const MinMaxStats& stats, const std::filesystem::path& path) {
  Writer w(path, kMinMaxMagic);
  w.field("channels", stats.channels());
  w.vector("min", stats.min);
  w.vector("max", stats.max);
}

MinMaxStats load_minmax(const std::filesystem::path& path) {
  const Document doc = read_document(path, kMinMaxMagic);
  MinMaxStats stats{doc.vector("min"), doc.vector("max")};
  if (stats.min.size() != doc.size("channels") || stats.max.size() != stats.min.size()) {
    throw ShapeError("min-max file has inconsistent shapes");
  }
  return stats;
}

}  // namespace npsr
