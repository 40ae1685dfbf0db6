#include "rsnn/model.hpp"

#include <bit>
#include <cmath>

#include "rsnn/error.hpp"

namespace rsnn {

std::string_view layer_name(LayerId id) noexcept {
  switch (id) {
    case LayerId::l0_input: return "l0_input";
    case LayerId::l0_recurrent: return "l0_recurrent";
    case LayerId::l1_feedforward: return "l1_feedforward";
    case LayerId::l1_recurrent: return "l1_recurrent";
    case LayerId::fc: return "fc";
  }
  return "unknown";
}

LifParams LifParams::from_log2(int beta_shift, int v_th_log2) {
  if (v_th_log2 < 0 || v_th_log2 > kMaxThresholdLog2) {
    throw Error(ErrorCode::invalid_argument,
                "threshold exponent out of range: " + std::to_string(v_th_log2));
  }
  LifParams p{beta_shift, 1 << v_th_log2};
  p.validate();
  return p;
}

int LifParams::v_th_log2() const { return std::countr_zero(static_cast<unsigned>(v_th)); }

void LifParams::validate() const {
  if (beta_shift < 0 || beta_shift > kMaxBetaShift) {
    throw Error(ErrorCode::invalid_argument,
                "beta_shift must be in [0, 11], got " + std::to_string(beta_shift));
  }
  if (v_th <= 0 || !std::has_single_bit(static_cast<unsigned>(v_th)) ||
      v_th > (1 << kMaxThresholdLog2)) {
    throw Error(ErrorCode::invalid_argument,
                "v_th must be a power of two in [1, 2048], got " + std::to_string(v_th));
  }
}

void ModelConfig::validate() const {
  if (rnn_dim <= 0 || input_dim <= 0 || fc_dim <= 0) {
    throw Error(ErrorCode::invalid_argument, "all model dimensions must be positive");
  }
  if (time_steps != 1 && time_steps != 2) {
    throw Error(ErrorCode::invalid_argument,
                "time_steps must be 1 or 2, got " + std::to_string(time_steps));
  }
  if (rnn_dim == 128 && fc_dim % rnn_dim != 0) {
    throw Error(ErrorCode::invalid_argument, "fc_dim must be a multiple of 128");
  }
  for (const auto& p : lif) p.validate();
}

LayerShape ModelConfig::layer_shape(LayerId id) const {
  switch (id) {
    case LayerId::l0_input: return {input_dim, rnn_dim};
    case LayerId::l0_recurrent:
    case LayerId::l1_feedforward:
    case LayerId::l1_recurrent: return {rnn_dim, rnn_dim};
    case LayerId::fc: return {rnn_dim, fc_dim};
  }
  return {};
}

int64_t ModelConfig::parameter_count() const {
  int64_t n = 0;
  for (LayerId id : kAllLayers) n += layer_shape(id).elements();
  return n;
}

ModelConfig build_baseline_config() {
  ModelConfig c;
  c.rnn_dim = 256;
  c.input_dim = 40;
  c.fc_dim = 1920;
  c.time_steps = 2;
  c.lif = {LifParams{1, 1}, LifParams{1, 1}};
  c.weight_scale_shift.fill(3);
  return c;
}

ModelConfig build_pruned_config() {
  ModelConfig c = build_baseline_config();
  c.rnn_dim = 128;
  return c;
}

int64_t pruned_element_count(int64_t n, double sparsity) {
  // The epsilon absorbs representation error in fractions like 0.4.
  return static_cast<int64_t>(std::floor(sparsity * static_cast<double>(n) + 1e-9));
}

int64_t parameter_count(const ModelConfig& config, double fc_sparsity) {
  return config.parameter_count() -
         pruned_element_count(config.layer_shape(LayerId::fc).elements(), fc_sparsity);
}

void Model::validate() const {
  config.validate();
  for (LayerId id : kAllLayers) {
    const auto shape = config.layer_shape(id);
    const auto& w = layer(id);
    if (w.rows() != shape.rows || w.cols() != shape.cols) {
      throw Error(ErrorCode::dim_mismatch,
                  std::string("weight shape mismatch in layer ") + std::string(layer_name(id)));
    }
  }
}

// QuantizedMatrix ----------------------------------------------------------

namespace {

std::size_t storage_bytes(int64_t elements, int bits) {
  return bits <= 4 ? packed_nibble_bytes(elements) : static_cast<std::size_t>(elements);
}

}  // namespace

QuantizedMatrix::QuantizedMatrix(int rows, int cols, int scale_shift, int bits)
    : rows_(rows), cols_(cols), scale_shift_(scale_shift), bits_(bits) {
  if (rows < 0 || cols < 0) throw Error(ErrorCode::invalid_argument, "negative matrix shape");
  if (bits < 2 || bits > 8) {
    throw Error(ErrorCode::invalid_argument, "bits must be in [2, 8]");
  }
  data_.assign(storage_bytes(elements(), bits), 0);
}

QuantizedMatrix QuantizedMatrix::from_codes(int rows, int cols, std::span<const int8_t> codes,
                                             int scale_shift, int bits) {
  QuantizedMatrix m(rows, cols, scale_shift, bits);
  if (static_cast<int64_t>(codes.size()) != m.elements()) {
    throw Error(ErrorCode::dim_mismatch, "code count does not match matrix shape");
  }
  for (int64_t k = 0; k < m.elements(); ++k) m.set_flat(k, codes[static_cast<std::size_t>(k)]);
  return m;
}

QuantizedMatrix QuantizedMatrix::from_packed(int rows, int cols, std::vector<uint8_t> packed,
                                             int scale_shift) {
  QuantizedMatrix m(rows, cols, scale_shift, 4);
  if (packed.size() != m.data_.size()) {
    throw Error(ErrorCode::dim_mismatch, "packed length does not match matrix shape");
  }
  m.data_ = std::move(packed);
  return m;
}

void QuantizedMatrix::set_flat(int64_t k, int code) {
  if (code < min_code() || code > max_code()) {
    throw Error(ErrorCode::invalid_argument,
                "code " + std::to_string(code) + " outside " + std::to_string(bits_) +
                    "-bit range");
  }
  const auto i = static_cast<std::size_t>(k);
  if (bits_ <= 4) {
    uint8_t& byte = data_[i >> 1];
    if (i & 1) {
      byte = static_cast<uint8_t>((byte & 0x0F) | (to_nibble(code) << 4));
    } else {
      byte = static_cast<uint8_t>((byte & 0xF0) | to_nibble(code));
    }
  } else {
    data_[i] = static_cast<uint8_t>(static_cast<int8_t>(code));
  }
}

double QuantizedMatrix::dequantized(int r, int c) const {
  return std::ldexp(static_cast<double>(at(r, c)), -scale_shift_);
}

std::vector<int8_t> QuantizedMatrix::codes() const {
  std::vector<int8_t> out(static_cast<std::size_t>(elements()));
  for (int64_t k = 0; k < elements(); ++k) out[static_cast<std::size_t>(k)] = at_flat(k);
  return out;
}

int64_t QuantizedMatrix::count_nonzero() const {
  int64_t n = 0;
  for (int64_t k = 0; k < elements(); ++k) n += at_flat(k) != 0;
  return n;
}

// SpikeVector ---------------------------------------------------------------

SpikeVector SpikeVector::from_bits(std::span<const uint8_t> bits) {
  SpikeVector v(static_cast<int>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) v.bits_[i] = bits[i] ? 1 : 0;
  return v;
}

void SpikeVector::clear() { std::fill(bits_.begin(), bits_.end(), uint8_t{0}); }

int SpikeVector::count() const {
  int n = 0;
  for (uint8_t b : bits_) n += b;
  return n;
}

uint8_t SpikeVector::slice(int slice) const {
  uint8_t out = 0;
  const int base = slice * 8;
  for (int k = 0; k < 8 && base + k < size(); ++k) {
    if (bits_[static_cast<std::size_t>(base + k)]) out |= static_cast<uint8_t>(1u << k);
  }
  return out;
}

}  // namespace rsnn
