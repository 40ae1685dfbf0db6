#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rsnn {

// Execution order of the five weight layers.
enum class LayerId : uint8_t {
  l0_input,
  l0_recurrent,
  l1_feedforward,
  l1_recurrent,
  fc,
};

inline constexpr std::size_t kNumLayers = 5;
inline constexpr std::array<LayerId, kNumLayers> kAllLayers = {
    LayerId::l0_input, LayerId::l0_recurrent, LayerId::l1_feedforward,
    LayerId::l1_recurrent, LayerId::fc};

constexpr std::size_t index_of(LayerId id) noexcept {
  return static_cast<std::size_t>(id);
}

std::string_view layer_name(LayerId id) noexcept;

// Leak is a right shift (beta = 2^-beta_shift); the threshold is a power of two.
// v_th = 2^11 lies above every reachable membrane value and silences the layer.
struct LifParams {
  int beta_shift = 1;
  int v_th = 1;

  static constexpr int kMaxBetaShift = 11;
  static constexpr int kMaxThresholdLog2 = 11;

  static LifParams from_log2(int beta_shift, int v_th_log2);
  int v_th_log2() const;
  void validate() const;

  bool operator==(const LifParams&) const = default;
};

struct LayerShape {
  int rows = 0;  // fan-in
  int cols = 0;  // fan-out
  int64_t elements() const { return int64_t{rows} * cols; }
};

struct ModelConfig {
  int rnn_dim = 128;
  int input_dim = 40;
  int fc_dim = 1920;
  int time_steps = 2;
  std::array<LifParams, 2> lif{};
  std::array<int, kNumLayers> weight_scale_shift{};

  void validate() const;
  LayerShape layer_shape(LayerId id) const;
  // input_dim*rnn_dim + 3*rnn_dim^2 + rnn_dim*fc_dim
  int64_t parameter_count() const;

  bool operator==(const ModelConfig&) const = default;
};

ModelConfig build_baseline_config();
// Structurally pruned shape: rnn_dim 128, FC width kept.
ModelConfig build_pruned_config();

// Elements zeroed by unstructured pruning of n elements at the given sparsity.
int64_t pruned_element_count(int64_t n, double sparsity);

// Parameter count after pruning the FC layer to fc_sparsity.
int64_t parameter_count(const ModelConfig& config, double fc_sparsity);

// 4-bit two's complement nibble helpers. Element k of a packed stream lives in
// byte k/2; even k takes the low nibble.
constexpr uint8_t to_nibble(int v) noexcept { return static_cast<uint8_t>(v) & 0x0F; }
constexpr int8_t from_nibble(uint8_t nib) noexcept {
  return static_cast<int8_t>(static_cast<int>((nib & 0x0F) ^ 0x08) - 0x08);
}
constexpr std::size_t packed_nibble_bytes(int64_t elements) noexcept {
  return static_cast<std::size_t>((elements + 1) / 2);
}

// Signed fixed-point weights, row-major. bits <= 4 are nibble packed; wider
// codes take one byte each. value = code * 2^-scale_shift.
class QuantizedMatrix {
 public:
  QuantizedMatrix() = default;
  QuantizedMatrix(int rows, int cols, int scale_shift = 0, int bits = 4);

  static QuantizedMatrix from_codes(int rows, int cols, std::span<const int8_t> codes,
                                    int scale_shift = 0, int bits = 4);
  static QuantizedMatrix from_packed(int rows, int cols, std::vector<uint8_t> packed,
                                     int scale_shift = 0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int bits() const { return bits_; }
  int scale_shift() const { return scale_shift_; }
  int64_t elements() const { return int64_t{rows_} * cols_; }
  int min_code() const { return -(1 << (bits_ - 1)); }
  int max_code() const { return (1 << (bits_ - 1)) - 1; }

  int8_t at(int r, int c) const { return at_flat(int64_t{r} * cols_ + c); }
  int8_t at_flat(int64_t k) const {
    const auto i = static_cast<std::size_t>(k);
    if (bits_ <= 4) {
      const uint8_t byte = data_[i >> 1];
      return from_nibble((i & 1) ? byte >> 4 : byte);
    }
    return static_cast<int8_t>(data_[i]);
  }
  void set(int r, int c, int code) { set_flat(int64_t{r} * cols_ + c, code); }
  void set_flat(int64_t k, int code);

  double dequantized(int r, int c) const;
  std::vector<int8_t> codes() const;
  std::span<const uint8_t> packed() const { return data_; }
  int64_t count_nonzero() const;

  bool operator==(const QuantizedMatrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int scale_shift_ = 0;
  int bits_ = 4;
  std::vector<uint8_t> data_;
};

struct RealMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  RealMatrix() = default;
  RealMatrix(int r, int c) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const {
    return values[static_cast<std::size_t>(r) * cols + c];
  }
  int64_t elements() const { return int64_t{rows} * cols; }
};

using RealWeights = std::array<RealMatrix, kNumLayers>;
using QuantizedWeights = std::array<QuantizedMatrix, kNumLayers>;

struct Model {
  ModelConfig config;
  QuantizedWeights weights;

  const QuantizedMatrix& layer(LayerId id) const { return weights[index_of(id)]; }
  void validate() const;

  bool operator==(const Model&) const = default;
};

struct FeatureFrame {
  std::vector<uint8_t> values;
};

// Binary activations, one byte per neuron (0 or 1).
class SpikeVector {
 public:
  SpikeVector() = default;
  explicit SpikeVector(int size) : bits_(static_cast<std::size_t>(size), 0) {}

  static SpikeVector from_bits(std::span<const uint8_t> bits);

  int size() const { return static_cast<int>(bits_.size()); }
  bool operator[](int i) const { return bits_[static_cast<std::size_t>(i)] != 0; }
  void set(int i, bool v) { bits_[static_cast<std::size_t>(i)] = v ? 1 : 0; }
  void clear();
  int count() const;
  bool any() const { return count() > 0; }

  // Eight spikes starting at 8*slice, bit k = spike 8*slice+k (missing = 0).
  uint8_t slice(int slice) const;

  std::span<const uint8_t> bits() const { return bits_; }

  bool operator==(const SpikeVector&) const = default;

 private:
  std::vector<uint8_t> bits_;
};

// Compression toolchain ---------------------------------------------------

// Largest scale_shift s whose rounded codes all fit in [-2^(bits-1), 2^(bits-1)-1].
QuantizedMatrix quantize_matrix(const RealMatrix& weights, int bits = 4);
QuantizedWeights quantize_weights(const RealWeights& weights, int bits, ModelConfig& config);

// Indices of the `target` largest norms, ties to the lower index, in rank order.
std::vector<int> select_channels(std::span<const double> norms, int target);

struct StructuredPruneResult {
  ModelConfig config;
  RealWeights weights;
  std::array<std::vector<int>, 2> kept;  // per recurrent layer, ascending
};

StructuredPruneResult prune_structured(const ModelConfig& config, int target_rnn_dim,
                                       const RealWeights& weights);

RealMatrix prune_unstructured(const RealMatrix& weights, double target_sparsity);
QuantizedMatrix prune_unstructured(const QuantizedMatrix& weights, double target_sparsity);

}  // namespace rsnn
