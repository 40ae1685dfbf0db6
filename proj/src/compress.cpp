#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "rsnn/error.hpp"
#include "rsnn/model.hpp"

namespace rsnn {

namespace {

bool fits(double lo, double hi, int s, int min_code, int max_code) {
  return std::round(std::ldexp(hi, s)) <= max_code && std::round(std::ldexp(lo, s)) >= min_code;
}

// Zeroes the n smallest magnitudes; stable ordering breaks ties by lower index.
template <typename Magnitude, typename Zero>
void zero_smallest(int64_t elements, double sparsity, Magnitude magnitude, Zero zero) {
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "target sparsity must be in [0, 1)");
  }
  const int64_t n = pruned_element_count(elements, sparsity);
  if (n == 0) return;
  std::vector<int64_t> order(static_cast<std::size_t>(elements));
  std::iota(order.begin(), order.end(), int64_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](int64_t a, int64_t b) { return magnitude(a) < magnitude(b); });
  for (int64_t k = 0; k < n; ++k) zero(order[static_cast<std::size_t>(k)]);
}

double column_l1(const RealMatrix& m, int c) {
  double s = 0.0;
  for (int r = 0; r < m.rows; ++r) s += std::abs(m(r, c));
  return s;
}

double row_l1(const RealMatrix& m, int r) {
  double s = 0.0;
  for (int c = 0; c < m.cols; ++c) s += std::abs(m(r, c));
  return s;
}

RealMatrix gather(const RealMatrix& m, const std::vector<int>* rows, const std::vector<int>* cols) {
  const int nr = rows ? static_cast<int>(rows->size()) : m.rows;
  const int nc = cols ? static_cast<int>(cols->size()) : m.cols;
  RealMatrix out(nr, nc);
  for (int r = 0; r < nr; ++r) {
    const int sr = rows ? (*rows)[static_cast<std::size_t>(r)] : r;
    for (int c = 0; c < nc; ++c) {
      out(r, c) = m(sr, cols ? (*cols)[static_cast<std::size_t>(c)] : c);
    }
  }
  return out;
}

}  // namespace

QuantizedMatrix quantize_matrix(const RealMatrix& weights, int bits) {
  if (bits < 2 || bits > 8) throw Error(ErrorCode::invalid_argument, "bits must be in [2, 8]");
  if (weights.elements() == 0) throw Error(ErrorCode::invalid_argument, "empty matrix");

  const auto [lo_it, hi_it] = std::minmax_element(weights.values.begin(), weights.values.end());
  const double lo = std::min(*lo_it, 0.0);
  const double hi = std::max(*hi_it, 0.0);
  const int min_code = -(1 << (bits - 1));
  const int max_code = (1 << (bits - 1)) - 1;

  int shift = 0;
  if (lo != 0.0 || hi != 0.0) {
    // Codes grow monotonically with s, so scan down from a shift far above any fit.
    const double mag = std::max(std::abs(lo), std::abs(hi));
    shift = bits - std::ilogb(mag) + 1;
    while (!fits(lo, hi, shift, min_code, max_code)) --shift;
  }

  QuantizedMatrix q(weights.rows, weights.cols, shift, bits);
  for (int64_t k = 0; k < weights.elements(); ++k) {
    const double scaled = std::round(std::ldexp(weights.values[static_cast<std::size_t>(k)], shift));
    q.set_flat(k, static_cast<int>(std::clamp<double>(scaled, min_code, max_code)));
  }
  return q;
}

QuantizedWeights quantize_weights(const RealWeights& weights, int bits, ModelConfig& config) {
  QuantizedWeights out;
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    out[l] = quantize_matrix(weights[l], bits);
    config.weight_scale_shift[l] = out[l].scale_shift();
  }
  return out;
}

std::vector<int> select_channels(std::span<const double> norms, int target) {
  if (target < 0 || target > static_cast<int>(norms.size())) {
    throw Error(ErrorCode::invalid_argument, "channel target out of range");
  }
  std::vector<int> order(norms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return norms[static_cast<std::size_t>(a)] > norms[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(target));
  return order;
}

StructuredPruneResult prune_structured(const ModelConfig& config, int target_rnn_dim,
                                       const RealWeights& weights) {
  if (target_rnn_dim <= 0 || target_rnn_dim >= config.rnn_dim) {
    throw Error(ErrorCode::invalid_argument,
                "structured pruning target must be in (0, " + std::to_string(config.rnn_dim) +
                    "), got " + std::to_string(target_rnn_dim));
  }
  for (LayerId id : kAllLayers) {
    const auto shape = config.layer_shape(id);
    const auto& w = weights[index_of(id)];
    if (w.rows != shape.rows || w.cols != shape.cols) {
      throw Error(ErrorCode::dim_mismatch, "weights inconsistent with config");
    }
  }

  const auto& w_x = weights[index_of(LayerId::l0_input)];
  const auto& w_h0 = weights[index_of(LayerId::l0_recurrent)];
  const auto& w_ff1 = weights[index_of(LayerId::l1_feedforward)];
  const auto& w_h1 = weights[index_of(LayerId::l1_recurrent)];
  const auto& w_fc = weights[index_of(LayerId::fc)];

  // A channel's norm sums every weight entering or leaving it.
  const int n = config.rnn_dim;
  std::vector<double> norm0(static_cast<std::size_t>(n)), norm1(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    norm0[static_cast<std::size_t>(j)] =
        column_l1(w_x, j) + column_l1(w_h0, j) + row_l1(w_h0, j) + row_l1(w_ff1, j);
    norm1[static_cast<std::size_t>(j)] =
        column_l1(w_ff1, j) + column_l1(w_h1, j) + row_l1(w_h1, j) + row_l1(w_fc, j);
  }

  StructuredPruneResult result;
  result.kept[0] = select_channels(norm0, target_rnn_dim);
  result.kept[1] = select_channels(norm1, target_rnn_dim);
  for (auto& k : result.kept) std::sort(k.begin(), k.end());

  const auto& k0 = result.kept[0];
  const auto& k1 = result.kept[1];
  result.config = config;
  result.config.rnn_dim = target_rnn_dim;
  result.weights[index_of(LayerId::l0_input)] = gather(w_x, nullptr, &k0);
  result.weights[index_of(LayerId::l0_recurrent)] = gather(w_h0, &k0, &k0);
  result.weights[index_of(LayerId::l1_feedforward)] = gather(w_ff1, &k0, &k1);
  result.weights[index_of(LayerId::l1_recurrent)] = gather(w_h1, &k1, &k1);
  result.weights[index_of(LayerId::fc)] = gather(w_fc, &k1, nullptr);
  return result;
}

RealMatrix prune_unstructured(const RealMatrix& weights, double target_sparsity) {
  RealMatrix out = weights;
  zero_smallest(
      weights.elements(), target_sparsity,
      [&](int64_t k) { return std::abs(weights.values[static_cast<std::size_t>(k)]); },
      [&](int64_t k) { out.values[static_cast<std::size_t>(k)] = 0.0; });
  return out;
}

QuantizedMatrix prune_unstructured(const QuantizedMatrix& weights, double target_sparsity) {
  QuantizedMatrix out = weights;
  zero_smallest(
      weights.elements(), target_sparsity,
      [&](int64_t k) { return std::abs(static_cast<int>(weights.at_flat(k))); },
      [&](int64_t k) { out.set_flat(k, 0); });
  return out;
}

}  // namespace rsnn
