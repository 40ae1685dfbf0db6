#pragma once

// Fixed-point reference for RSNN inference. Computes each layer directly from
// its definition with no knowledge of the accelerator's dataflow; the cycle
// simulator is checked against it bit for bit.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rsnn/model.hpp"
#include "rsnn/trace.hpp"

namespace rsnn::golden {

using AccVector = std::vector<int32_t>;

struct LifResult {
  int32_t membrane = 0;
  bool spike = false;

  bool operator==(const LifResult&) const = default;
};

// U = sat12(stimulus + (prev_spike ? 0 : prev_membrane >> beta_shift));
// fires when U >= v_th and then resets to 0.
LifResult lif_update(int32_t stimulus, int32_t prev_membrane, bool prev_spike,
                     const LifParams& params);

// Membrane of one recurrent layer within a frame. Zeroed at frame start.
struct LayerMembrane {
  std::vector<int32_t> potential;
  SpikeVector last_spike;

  explicit LayerMembrane(int dim = 0) : potential(static_cast<std::size_t>(dim), 0), last_spike(dim) {}
  void reset();
};

// Spikes from the previous frame, per layer and time step; zeroed at each
// utterance boundary.
struct Carry {
  std::array<std::vector<SpikeVector>, 2> hidden;

  Carry() = default;
  Carry(int rnn_dim, int time_steps);
  void reset();
};

struct FrameOutput {
  std::vector<int32_t> logits;

  bool operator==(const FrameOutput&) const = default;
};

// sat12(sum_i frame[i] * W_x[i][j]); computed once per frame.
AccVector input_stimulus(const FeatureFrame& frame, const QuantizedMatrix& w_x);

// sat12(sum_i spikes[i] * W[i][j]) with no LIF.
AccVector spike_product(const SpikeVector& spikes, const QuantizedMatrix& w);

// stim = sat12(ff[j] + sum_i prev_hidden[i] * W_h[i][j]) followed by LIF.
SpikeVector recurrent_layer_step(std::span<const int32_t> ff_stimulus,
                                 const SpikeVector& prev_hidden, const QuantizedMatrix& w_h,
                                 LayerMembrane& state, const LifParams& params);

// logits[k] = sat12(sum_ts sum_i spikes[ts][i] * W_fc[i][k]).
FrameOutput fc_forward(std::span<const SpikeVector> spikes_per_ts, const QuantizedMatrix& w_fc);

// One frame: input stimulus once, then both recurrent layers per time step,
// then FC summed over time steps. Updates the carry.
FrameOutput run_frame(const FeatureFrame& frame, const Model& model, int time_steps,
                      Carry& carry, FrameTrace* trace = nullptr);

struct UtteranceResult {
  std::vector<FrameOutput> outputs;
  SpikeTrace trace;
};

// Runs frames from a zero carry.
UtteranceResult run_utterance(std::span<const FeatureFrame> frames, const Model& model,
                              int time_steps);

}  // namespace rsnn::golden
