#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsnn/model.hpp"

namespace rsnn {

// Everything observable about one frame: the input bytes and each recurrent
// layer's output spikes per time step.
struct FrameTrace {
  bool utterance_start = false;
  std::vector<uint8_t> input;
  std::array<std::vector<SpikeVector>, 2> spikes;  // [layer][ts]

  bool operator==(const FrameTrace&) const = default;
};

struct SpikeTrace {
  int rnn_dim = 0;
  int input_dim = 0;
  int time_steps = 0;
  std::vector<FrameTrace> frames;

  bool empty() const { return frames.empty(); }
  // h[t-1][ts] for the given frame: the previous frame's spikes, or zeros at
  // an utterance start.
  SpikeVector previous(std::size_t frame, int layer, int ts) const;
  void append(const SpikeTrace& other);

  bool operator==(const SpikeTrace&) const = default;
};

// Line-oriented text export. Spike vectors and input rows are hex strings of
// their bytes in index order; spike i is bit (i % 8) of byte i / 8.
//
//   rsnn-trace 1 <rnn_dim> <input_dim> <time_steps> <n_frames>
//   F <frame> <utterance_start 0|1> <input hex>
//   S <frame> <layer> <ts> <spike hex>
void write_trace(std::ostream& out, const SpikeTrace& trace);
SpikeTrace read_trace(std::istream& in);

std::string spikes_to_hex(const SpikeVector& v);
SpikeVector spikes_from_hex(const std::string& hex, int size);

// Synthetic activity with controlled sparsity, used to exercise the cycle
// model without a trained network.
struct SyntheticProfile {
  int rnn_dim = 128;
  int input_dim = 40;
  int time_steps = 2;
  int frames = 200;
  double input_bit_density = 0.43;
  std::array<double, 2> layer_density{0.32, 0.40};
  // P(spike at ts 2 | spike at ts 1); the ts-2 marginal still equals layer_density.
  double ts_overlap = 0.85;
  uint64_t seed = 1;
};

SpikeTrace synthesize_trace(const SyntheticProfile& profile);

}  // namespace rsnn
