#include "rsnn/model_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "rsnn/error.hpp"
#include "rsnn/fixed_point.hpp"

namespace rsnn {

namespace {

class ByteWriter {
 public:
  void magic(std::string_view m) { out_.insert(out_.end(), m.begin(), m.end()); }
  void u8(uint8_t v) { out_.push_back(v); }
  void i8(int8_t v) { out_.push_back(static_cast<uint8_t>(v)); }
  void u16(uint16_t v) {
    out_.push_back(static_cast<uint8_t>(v));
    out_.push_back(static_cast<uint8_t>(v >> 8));
  }
  void u32(uint32_t v) {
    for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<uint8_t>(v >> s));
  }
  void bytes(std::span<const uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<uint8_t> take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> in) : in_(in) {}

  void expect_magic(std::string_view m) {
    need(m.size());
    if (std::memcmp(in_.data() + pos_, m.data(), m.size()) != 0) {
      throw Error(ErrorCode::bad_magic, "expected magic '" + std::string(m) + "'");
    }
    pos_ += m.size();
  }
  void expect_version() {
    const uint16_t v = u16();
    if (v != kFormatVersion) {
      throw Error(ErrorCode::version_mismatch, "unsupported format version " + std::to_string(v));
    }
  }
  uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  int8_t i8() { return static_cast<int8_t>(u8()); }
  uint16_t u16() {
    need(2);
    const uint16_t v = static_cast<uint16_t>(in_[pos_] | in_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= uint32_t{in_[pos_ + static_cast<std::size_t>(k)]} << (8 * k);
    pos_ += 4;
    return v;
  }
  std::span<const uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::truncated, "stream ends early");
  }

  std::span<const uint8_t> in_;
  std::size_t pos_ = 0;
};

uint16_t checked_u16(int v, const char* what) {
  if (v < 0 || v > 0xFFFF) throw Error(ErrorCode::invalid_argument, std::string(what) + " out of range");
  return static_cast<uint16_t>(v);
}

}  // namespace

std::size_t model_payload_bytes(const ModelConfig& config) {
  std::size_t n = 0;
  for (LayerId id : kAllLayers) n += packed_nibble_bytes(config.layer_shape(id).elements());
  return n;
}

std::vector<uint8_t> serialize_model(const Model& model) {
  model.validate();
  const auto& c = model.config;
  ByteWriter w;
  w.magic("RSNN");
  w.u16(kFormatVersion);
  w.u16(checked_u16(c.rnn_dim, "rnn_dim"));
  w.u16(checked_u16(c.input_dim, "input_dim"));
  w.u16(checked_u16(c.fc_dim, "fc_dim"));
  w.u8(static_cast<uint8_t>(c.time_steps));
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    if (model.weights[l].scale_shift() != c.weight_scale_shift[l]) {
      throw Error(ErrorCode::invalid_argument, "weight scale does not match config");
    }
    w.i8(static_cast<int8_t>(c.weight_scale_shift[l]));
  }
  for (const auto& p : c.lif) {
    w.u8(static_cast<uint8_t>(p.beta_shift));
    w.u8(static_cast<uint8_t>(p.v_th_log2()));
  }
  for (const auto& m : model.weights) {
    if (m.bits() > 4) {
      throw Error(ErrorCode::invalid_argument, "model files store 4-bit weights only");
    }
    w.bytes(m.packed());
  }
  return w.take();
}

Model deserialize_model(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("RSNN");
  r.expect_version();
  Model m;
  auto& c = m.config;
  c.rnn_dim = r.u16();
  c.input_dim = r.u16();
  c.fc_dim = r.u16();
  c.time_steps = r.u8();
  for (auto& s : c.weight_scale_shift) s = r.i8();
  for (auto& p : c.lif) {
    const int beta = r.u8();
    const int log2 = r.u8();
    p = LifParams::from_log2(beta, log2);
  }
  if (c.rnn_dim == 0 || c.input_dim == 0 || c.fc_dim == 0) {
    throw Error(ErrorCode::dim_mismatch, "model header has a zero dimension");
  }
  c.validate();

  const std::size_t expected = model_payload_bytes(c);
  if (r.remaining() < expected) {
    throw Error(ErrorCode::truncated, "weight payload shorter than header dimensions imply");
  }
  if (r.remaining() > expected) {
    throw Error(ErrorCode::dim_mismatch, "weight payload longer than header dimensions imply");
  }
  for (LayerId id : kAllLayers) {
    const auto shape = c.layer_shape(id);
    auto span = r.bytes(packed_nibble_bytes(shape.elements()));
    m.weights[index_of(id)] = QuantizedMatrix::from_packed(
        shape.rows, shape.cols, std::vector<uint8_t>(span.begin(), span.end()),
        c.weight_scale_shift[index_of(id)]);
  }
  return m;
}

std::vector<uint8_t> serialize_features(std::span<const FeatureFrame> frames, int input_dim) {
  ByteWriter w;
  w.magic("FEAT");
  w.u16(kFormatVersion);
  w.u16(checked_u16(input_dim, "input_dim"));
  w.u32(static_cast<uint32_t>(frames.size()));
  for (const auto& f : frames) {
    if (static_cast<int>(f.values.size()) != input_dim) {
      throw Error(ErrorCode::dim_mismatch, "feature frame width mismatch");
    }
    w.bytes(f.values);
  }
  return w.take();
}

std::vector<FeatureFrame> deserialize_features(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("FEAT");
  r.expect_version();
  const std::size_t dim = r.u16();
  const std::size_t n = r.u32();
  if (r.remaining() != dim * n) {
    throw Error(r.remaining() < dim * n ? ErrorCode::truncated : ErrorCode::dim_mismatch,
                "feature payload length does not match header");
  }
  std::vector<FeatureFrame> frames(n);
  for (auto& f : frames) {
    auto s = r.bytes(dim);
    f.values.assign(s.begin(), s.end());
  }
  return frames;
}

std::vector<uint8_t> serialize_logits(std::span<const golden::FrameOutput> outputs, int fc_dim) {
  ByteWriter w;
  w.magic("LOGT");
  w.u16(kFormatVersion);
  w.u16(checked_u16(fc_dim, "fc_dim"));
  w.u32(static_cast<uint32_t>(outputs.size()));
  for (const auto& o : outputs) {
    if (static_cast<int>(o.logits.size()) != fc_dim) {
      throw Error(ErrorCode::dim_mismatch, "logit row width mismatch");
    }
    for (int32_t v : o.logits) w.u16(static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  return w.take();
}

LogitsFile deserialize_logits(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("LOGT");
  r.expect_version();
  LogitsFile file;
  file.fc_dim = r.u16();
  const std::size_t n = r.u32();
  const std::size_t expected = n * static_cast<std::size_t>(file.fc_dim) * 2;
  if (r.remaining() != expected) {
    throw Error(r.remaining() < expected ? ErrorCode::truncated : ErrorCode::dim_mismatch,
                "logit payload length does not match header");
  }
  file.frames.resize(n);
  for (auto& f : file.frames) {
    f.logits.resize(static_cast<std::size_t>(file.fc_dim));
    for (auto& v : f.logits) v = static_cast<int16_t>(r.u16());
  }
  return file;
}

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

}  // namespace rsnn
