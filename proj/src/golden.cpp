#include "rsnn/golden.hpp"

#include "rsnn/error.hpp"
#include "rsnn/fixed_point.hpp"

namespace rsnn::golden {

LifResult lif_update(int32_t stimulus, int32_t prev_membrane, bool prev_spike,
                     const LifParams& params) {
  const int32_t leak = prev_spike ? 0 : shift_right_arith(prev_membrane, params.beta_shift);
  const int32_t u = sat12(int64_t{stimulus} + leak);
  const bool spike = u >= params.v_th;
  return {spike ? 0 : u, spike};
}

void LayerMembrane::reset() {
  std::fill(potential.begin(), potential.end(), 0);
  last_spike.clear();
}

Carry::Carry(int rnn_dim, int time_steps) {
  for (auto& layer : hidden) layer.assign(static_cast<std::size_t>(time_steps), SpikeVector(rnn_dim));
}

void Carry::reset() {
  for (auto& layer : hidden) {
    for (auto& v : layer) v.clear();
  }
}

AccVector input_stimulus(const FeatureFrame& frame, const QuantizedMatrix& w_x) {
  if (static_cast<int>(frame.values.size()) != w_x.rows()) {
    throw Error(ErrorCode::invalid_argument, "feature frame length does not match W_x rows");
  }
  AccVector out(static_cast<std::size_t>(w_x.cols()));
  for (int j = 0; j < w_x.cols(); ++j) {
    int64_t sum = 0;
    for (int i = 0; i < w_x.rows(); ++i) {
      sum += int64_t{frame.values[static_cast<std::size_t>(i)]} * w_x.at(i, j);
    }
    out[static_cast<std::size_t>(j)] = sat12(sum);
  }
  return out;
}

AccVector spike_product(const SpikeVector& spikes, const QuantizedMatrix& w) {
  if (spikes.size() != w.rows()) {
    throw Error(ErrorCode::invalid_argument, "spike vector length does not match weight rows");
  }
  std::vector<int64_t> sum(static_cast<std::size_t>(w.cols()), 0);
  for (int i = 0; i < w.rows(); ++i) {
    if (!spikes[i]) continue;
    for (int j = 0; j < w.cols(); ++j) sum[static_cast<std::size_t>(j)] += w.at(i, j);
  }
  AccVector out(sum.size());
  for (std::size_t j = 0; j < sum.size(); ++j) out[j] = sat12(sum[j]);
  return out;
}

SpikeVector recurrent_layer_step(std::span<const int32_t> ff_stimulus,
                                 const SpikeVector& prev_hidden, const QuantizedMatrix& w_h,
                                 LayerMembrane& state, const LifParams& params) {
  const int dim = w_h.cols();
  if (prev_hidden.size() != w_h.rows() || static_cast<int>(ff_stimulus.size()) != dim ||
      static_cast<int>(state.potential.size()) != dim || state.last_spike.size() != dim) {
    throw Error(ErrorCode::invalid_argument, "recurrent layer dimensions disagree");
  }
  std::vector<int64_t> rec(static_cast<std::size_t>(dim), 0);
  for (int i = 0; i < w_h.rows(); ++i) {
    if (!prev_hidden[i]) continue;
    for (int j = 0; j < dim; ++j) rec[static_cast<std::size_t>(j)] += w_h.at(i, j);
  }

  SpikeVector out(dim);
  for (int j = 0; j < dim; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    const int32_t stim = sat12(int64_t{ff_stimulus[sj]} + rec[sj]);
    const LifResult r = lif_update(stim, state.potential[sj], state.last_spike[j], params);
    state.potential[sj] = r.membrane;
    state.last_spike.set(j, r.spike);
    out.set(j, r.spike);
  }
  return out;
}

FrameOutput fc_forward(std::span<const SpikeVector> spikes_per_ts, const QuantizedMatrix& w_fc) {
  if (spikes_per_ts.empty() || spikes_per_ts.size() > 2) {
    throw Error(ErrorCode::invalid_argument, "FC expects one or two spike vectors");
  }
  std::vector<int64_t> sum(static_cast<std::size_t>(w_fc.cols()), 0);
  for (const auto& spikes : spikes_per_ts) {
    if (spikes.size() != w_fc.rows()) {
      throw Error(ErrorCode::invalid_argument, "spike vector length does not match W_fc rows");
    }
    for (int i = 0; i < w_fc.rows(); ++i) {
      if (!spikes[i]) continue;
      for (int k = 0; k < w_fc.cols(); ++k) sum[static_cast<std::size_t>(k)] += w_fc.at(i, k);
    }
  }
  FrameOutput out;
  out.logits.resize(sum.size());
  for (std::size_t k = 0; k < sum.size(); ++k) out.logits[k] = sat12(sum[k]);
  return out;
}

FrameOutput run_frame(const FeatureFrame& frame, const Model& model, int time_steps,
                      Carry& carry, FrameTrace* trace) {
  const auto& cfg = model.config;
  if (time_steps != 1 && time_steps != 2) {
    throw Error(ErrorCode::invalid_argument, "time_steps must be 1 or 2");
  }
  for (const auto& layer : carry.hidden) {
    if (static_cast<int>(layer.size()) != time_steps) {
      throw Error(ErrorCode::invalid_argument, "carry time steps do not match");
    }
    for (const auto& v : layer) {
      if (v.size() != cfg.rnn_dim) throw Error(ErrorCode::invalid_argument, "carry width mismatch");
    }
  }

  const AccVector ff0 = input_stimulus(frame, model.layer(LayerId::l0_input));

  LayerMembrane m0(cfg.rnn_dim);
  LayerMembrane m1(cfg.rnn_dim);
  std::vector<SpikeVector> h0(static_cast<std::size_t>(time_steps));
  std::vector<SpikeVector> h1(static_cast<std::size_t>(time_steps));
  for (int ts = 0; ts < time_steps; ++ts) {
    const auto t = static_cast<std::size_t>(ts);
    h0[t] = recurrent_layer_step(ff0, carry.hidden[0][t], model.layer(LayerId::l0_recurrent), m0,
                                 cfg.lif[0]);
    const AccVector ff1 = spike_product(h0[t], model.layer(LayerId::l1_feedforward));
    h1[t] = recurrent_layer_step(ff1, carry.hidden[1][t], model.layer(LayerId::l1_recurrent), m1,
                                 cfg.lif[1]);
  }
  FrameOutput out = fc_forward(h1, model.layer(LayerId::fc));

  if (trace) {
    trace->input = frame.values;
    trace->spikes = {h0, h1};
  }
  carry.hidden = {std::move(h0), std::move(h1)};
  return out;
}

UtteranceResult run_utterance(std::span<const FeatureFrame> frames, const Model& model,
                              int time_steps) {
  UtteranceResult result;
  result.trace.rnn_dim = model.config.rnn_dim;
  result.trace.input_dim = model.config.input_dim;
  result.trace.time_steps = time_steps;
  result.outputs.reserve(frames.size());
  result.trace.frames.reserve(frames.size());

  Carry carry(model.config.rnn_dim, time_steps);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    FrameTrace ft;
    ft.utterance_start = f == 0;
    result.outputs.push_back(run_frame(frames[f], model, time_steps, carry, &ft));
    result.trace.frames.push_back(std::move(ft));
  }
  return result;
}

}  // namespace rsnn::golden
