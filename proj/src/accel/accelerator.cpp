#include "rsnn/accel/accelerator.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <stdexcept>

#include "rsnn/accel/lif_hw.hpp"
#include "rsnn/error.hpp"
#include "rsnn/fixed_point.hpp"

namespace rsnn::accel {

namespace {

bool is_recurrent_pass(LayerId id) {
  return id == LayerId::l0_recurrent || id == LayerId::l1_feedforward ||
         id == LayerId::l1_recurrent;
}

// Spikes [start, start+count) of v as an 8-bit group, bit k = spike start+k.
uint8_t spike_group(const SpikeVector& v, int start, int count) {
  uint8_t g = 0;
  for (int k = 0; k < count; ++k) g |= static_cast<uint8_t>(v[start + k] << k);
  return g;
}

}  // namespace

void EventLog::write(std::ostream& out) const {
  out << "# frame cycle layer set unit index group shift active\n";
  for (const auto& r : records_) {
    out << r.frame << ' ' << r.cycle << ' ' << layer_name(r.layer) << ' ' << r.set << ' ' << r.unit
        << ' ' << r.index << ' ' << r.group << ' ' << r.shift << ' ' << (r.active ? 1 : 0) << '\n';
  }
}

Accelerator::Accelerator(const Model& model, SimOptions options)
    : config_(model.config), options_(options), buffers_(WeightBuffers::load(model)) {
  options_.validate();
  fc_groups_ = config_.fc_dim / kLanes;
  const auto dim = static_cast<std::size_t>(config_.rnn_dim);
  const auto ts = static_cast<std::size_t>(options_.time_steps);
  input_reg_.assign(dim, 0);
  for (auto& r : ff1_reg_) r.assign(dim, 0);
  fc_acc_.assign(static_cast<std::size_t>(config_.fc_dim), 0);
  for (std::size_t l = 0; l < 2; ++l) {
    prev_[l].assign(ts, SpikeVector(config_.rnn_dim));
    cur_[l].assign(ts, SpikeVector(config_.rnn_dim));
  }
  reset_stats();
}

void Accelerator::reset_stats() {
  stats_ = RunStats{};
  stats_.options = options_;
  stats_.rnn_dim = config_.rnn_dim;
  stats_.input_dim = config_.input_dim;
  frame_stats_ = stats_;
}

void Accelerator::reset_carry() {
  for (auto& layer : prev_) {
    for (auto& v : layer) v.clear();
  }
  utterance_start_ = true;
}

void Accelerator::accumulate(std::span<int32_t> acc, const WordLanes& w, int shift) {
  bool over = false;
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const int32_t v = acc[k] + w[k] * (1 << shift);
    acc[k] = v;
    over |= v >= kPeGuardLimit || v <= -kPeGuardLimit;
  }
  if (over) throw std::logic_error("PE accumulator left its guard range");
}

void Accelerator::count(LayerId layer, int64_t words, int lanes, int64_t processed, int64_t idle,
                        int64_t skipped, SetSlots slots) {
  auto& l = frame_stats_.layer(layer);
  l.cycles += std::max(slots[0], slots[1]);
  l.set_cycles[0] += slots[0];
  l.set_cycles[1] += slots[1];
  l.word_reads += words;
  l.element_reads += words * lanes;
  l.events_processed += processed;
  l.events_idle += idle;
  l.events_skipped += skipped;
}

void Accelerator::log_event(LayerId layer, int64_t slot, int set, ZeroSkipMode unit, int index,
                            int group, const SkipEvent& e) {
  if (!log_) return;
  log_->add({stats_.frames, layer, frame_stats_.cycles_total() + slot, set, mode_letter(unit),
             index, group, e.shift, e.active});
}

void Accelerator::check_mode(LayerId layer, std::optional<ZeroSkipMode> mode) const {
  if (mode && !mode_legal(*mode, layer, options_.time_steps, options_.merge_enable)) {
    throw Error(ErrorCode::invalid_argument, std::string("zero-skip type ") + mode_letter(*mode) +
                                                 " is not legal for " +
                                                 std::string(layer_name(layer)) + " with " +
                                                 std::to_string(options_.time_steps) + " ts");
  }
}

void Accelerator::load_input(const FeatureFrame& frame) {
  if (static_cast<int>(frame.values.size()) != config_.input_dim) {
    throw Error(ErrorCode::dim_mismatch, "feature frame has " +
                                             std::to_string(frame.values.size()) +
                                             " values, model expects " +
                                             std::to_string(config_.input_dim));
  }
  in_buffer_.fill(0);
  std::copy(frame.values.begin(), frame.values.end(), in_buffer_.begin());

  const RunStats totals = stats_;
  frame_stats_ = RunStats{};
  frame_stats_.options = totals.options;
  frame_stats_.rnn_dim = totals.rnn_dim;
  frame_stats_.input_dim = totals.input_dim;
}

void Accelerator::run_layer_input() {
  const auto dim = static_cast<std::size_t>(config_.rnn_dim);
  for (auto& p : pe_) p.fill(0);
  SetSlots slots{};
  int64_t words = 0, processed = 0, idle = 0, skipped = 0;

  for (int i = 0; i < config_.input_dim; ++i) {
    const uint8_t byte = in_buffer_[static_cast<std::size_t>(i)];
    const NibbleStreams streams = zskip_type_a(byte, options_.skip_enable);
    const WordLanes& w = buffers_.lanes(LayerId::l0_input, i);
    const std::array<const EventStream*, 2> per_set = {&streams.low, &streams.high};
    for (int set = 0; set < kSets; ++set) {
      const auto s = static_cast<std::size_t>(set);
      for (const SkipEvent& e : *per_set[s]) {
        log_event(LayerId::l0_input, slots[s], set, ZeroSkipMode::A, i, 0, e);
        ++words;
        ++slots[s];
        if (e.active) {
          accumulate(std::span(pe_[s]).first(dim), w, e.shift);
          ++processed;
        } else {
          ++idle;
        }
      }
    }
    const int bits = std::popcount(byte);
    frame_stats_.input_bits_set += bits;
    if (options_.skip_enable) skipped += 8 - bits;
  }

  for (std::size_t j = 0; j < dim; ++j) input_reg_[j] = sat12(int64_t{pe_[0][j]} + pe_[1][j]);
  count(LayerId::l0_input, words, config_.rnn_dim, processed, idle, skipped, slots);
}

const SpikeVector& Accelerator::source(LayerId layer, int ts) const {
  const auto t = static_cast<std::size_t>(ts);
  switch (layer) {
    case LayerId::l0_recurrent:
      return prev_[0][t];
    case LayerId::l1_feedforward:
      return cur_[0][t];
    case LayerId::l1_recurrent:
      return prev_[1][t];
    default:
      throw Error(ErrorCode::invalid_argument, "not a recurrent-array layer");
  }
}

void Accelerator::run_layer_recurrent(LayerId layer, std::optional<ZeroSkipMode> mode) {
  if (!is_recurrent_pass(layer)) {
    throw Error(ErrorCode::invalid_argument,
                std::string(layer_name(layer)) + " does not run on the recurrent dataflow");
  }
  check_mode(layer, mode);
  const int dim = config_.rnn_dim;
  const auto udim = static_cast<std::size_t>(dim);
  const int n_ts = options_.time_steps;
  std::vector<std::vector<int32_t>> acc(static_cast<std::size_t>(n_ts),
                                        std::vector<int32_t>(udim, 0));
  SetSlots slots{};
  int64_t words = 0, processed = 0, idle = 0, skipped = 0;

  if (n_ts == 2) {
    // Type D: one shared word per position, set k integrates time step k.
    for (int i = 0; i < dim; ++i) {
      const WordLanes& w = buffers_.lanes(layer, i);
      ++words;
      for (int set = 0; set < kSets; ++set) {
        const SkipEvent e = zskip_type_d(source(layer, set)[i]);
        log_event(layer, i, set, ZeroSkipMode::D, i, 0, e);
        if (e.active) {
          accumulate(acc[static_cast<std::size_t>(set)], w, 0);
          ++processed;
        } else {
          ++idle;
        }
      }
    }
    slots = {dim, dim};
  } else {
    // Type B: positions [0, dim/2) on set 0, the rest on set 1.
    const SpikeVector& src = source(layer, 0);
    const int half = dim / 2;
    std::array<std::vector<int32_t>, 2> part;
    for (int set = 0; set < kSets; ++set) {
      const auto s = static_cast<std::size_t>(set);
      part[s].assign(udim, 0);
      const int lo = set == 0 ? 0 : half;
      const int hi = set == 0 ? half : dim;
      for (int start = lo; start < hi; start += 8) {
        const int n = std::min(8, hi - start);
        const uint8_t group = spike_group(src, start, n);
        const EventStream stream = zskip_type_b(group, options_.skip_enable);
        if (options_.skip_enable) skipped += n - std::popcount(group);
        for (const SkipEvent& e : stream) {
          if (e.index >= n) continue;
          const int pos = start + e.index;
          log_event(layer, slots[s], set, ZeroSkipMode::B, pos, 0, e);
          ++words;
          ++slots[s];
          if (e.active) {
            accumulate(part[s], buffers_.lanes(layer, pos), 0);
            ++processed;
          } else {
            ++idle;
          }
        }
      }
    }
    for (std::size_t j = 0; j < udim; ++j) acc[0][j] = part[0][j] + part[1][j];
  }
  count(layer, words, dim, processed, idle, skipped, slots);

  if (layer == LayerId::l1_feedforward) {
    for (int ts = 0; ts < n_ts; ++ts) {
      const auto t = static_cast<std::size_t>(ts);
      for (std::size_t j = 0; j < udim; ++j) ff1_reg_[t][j] = sat12(acc[t][j]);
    }
    return;
  }
  const int l = layer == LayerId::l0_recurrent ? 0 : 1;
  const std::vector<int32_t>& ff = l == 0 ? input_reg_ : ff1_reg_[0];
  for (int ts = 0; ts < n_ts; ++ts) {
    const auto t = static_cast<std::size_t>(ts);
    const std::vector<int32_t>& base = l == 0 ? ff : ff1_reg_[t];
    for (std::size_t j = 0; j < udim; ++j) acc[t][j] = sat12(int64_t{base[j]} + acc[t][j]);
  }
  lif_bank(l, acc);
}

void Accelerator::lif_bank(int layer, const std::vector<std::vector<int32_t>>& stimulus) {
  const auto l = static_cast<std::size_t>(layer);
  const LifParams& p = config_.lif[l];
  std::vector<int32_t> membrane(static_cast<std::size_t>(config_.rnn_dim), 0);
  std::vector<uint8_t> spike_reg(membrane.size(), 0);
  for (std::size_t t = 0; t < stimulus.size(); ++t) {
    SpikeVector& out = cur_[l][t];
    for (int j = 0; j < config_.rnn_dim; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      const LifHwOut r = lif_hw(stimulus[t][sj], membrane[sj], spike_reg[sj] != 0, p);
      membrane[sj] = r.membrane;
      spike_reg[sj] = r.spike;
      out.set(j, r.spike);
    }
    if (override_) {
      const SpikeVector& forced = override_->spikes[l][t];
      if (forced.size() != config_.rnn_dim) {
        throw Error(ErrorCode::dim_mismatch, "recorded spike vector width mismatch");
      }
      out = forced;
    }
  }
}

golden::FrameOutput Accelerator::run_layer_fc(std::optional<ZeroSkipMode> mode) {
  check_mode(LayerId::fc, mode);
  const ZeroSkipMode m =
      mode.value_or(default_mode(LayerId::fc, options_.time_steps, options_.merge_enable));
  const int dim = config_.rnn_dim;
  const int paired_groups = fc_groups_ / 2;
  const int half = dim / 2;
  // Groups [0, G/2) on set 0, [G/2, 2*(G/2)) on set 1; an odd last group is
  // split by spike position.
  const auto set_of = [&](int g, int pos) {
    if (g < paired_groups) return 0;
    if (g < 2 * paired_groups) return 1;
    return pos < half ? 0 : 1;
  };

  std::fill(fc_acc_.begin(), fc_acc_.end(), 0);
  SetSlots slots{};
  int64_t words = 0, processed = 0, idle = 0, skipped = 0;

  const SpikeVector& s0 = cur_[1][0];
  const int passes = (m == ZeroSkipMode::B) ? options_.time_steps : 1;
  for (int pass = 0; pass < passes; ++pass) {
    const SpikeVector& a = cur_[1][static_cast<std::size_t>(pass)];
    for (int g = 0; g < fc_groups_; ++g) {
      const auto acc = std::span(fc_acc_).subspan(static_cast<std::size_t>(g) * kLanes, kLanes);
      for (int start = 0; start < dim; start += 8) {
        const int n = std::min(8, dim - start);
        EventStream stream;
        int nonzero = 0;
        if (m == ZeroSkipMode::C) {
          const uint8_t ga = spike_group(s0, start, n);
          const uint8_t gb = spike_group(cur_[1][1], start, n);
          stream = zskip_type_c(ga, gb, options_.skip_enable);
          nonzero = std::popcount(static_cast<uint8_t>(ga | gb));
        } else {
          const uint8_t ga = spike_group(a, start, n);
          stream = zskip_type_b(ga, options_.skip_enable);
          nonzero = std::popcount(ga);
        }
        if (options_.skip_enable) skipped += n - nonzero;
        for (const SkipEvent& e : stream) {
          if (e.index >= n) continue;
          const int pos = start + e.index;
          const int set = set_of(g, pos);
          const auto s = static_cast<std::size_t>(set);
          log_event(LayerId::fc, slots[s], set, m, pos, g, e);
          ++words;
          ++slots[s];
          if (e.active) {
            accumulate(acc, buffers_.lanes(LayerId::fc, pos, g), e.shift);
            ++processed;
          } else {
            ++idle;
          }
        }
      }
    }
  }
  count(LayerId::fc, words, kLanes, processed, idle, skipped, slots);
  frame_stats_.drain_cycles += (config_.fc_dim + 3) / 4;

  golden::FrameOutput out;
  out.logits.resize(fc_acc_.size());
  for (std::size_t k = 0; k < fc_acc_.size(); ++k) out.logits[k] = sat12(fc_acc_[k]);
  return out;
}

void Accelerator::end_frame() {
  for (std::size_t l = 0; l < 2; ++l) {
    for (std::size_t t = 0; t < cur_[l].size(); ++t) frame_stats_.spikes[l][t] += cur_[l][t].count();
  }
  frame_stats_.frames = 1;
  stats_ += frame_stats_;
  prev_ = cur_;
  utterance_start_ = false;
}

golden::FrameOutput Accelerator::run_frame(const FeatureFrame& frame, FrameTrace* trace) {
  load_input(frame);
  run_layer_input();
  run_layer_recurrent(LayerId::l0_recurrent);
  run_layer_recurrent(LayerId::l1_feedforward);
  run_layer_recurrent(LayerId::l1_recurrent);
  golden::FrameOutput out = run_layer_fc();
  if (trace) {
    trace->utterance_start = utterance_start_;
    trace->input = frame.values;
    trace->spikes = cur_;
  }
  end_frame();
  return out;
}

golden::FrameOutput Accelerator::replay_frame(const FrameTrace& recorded) {
  for (const auto& layer : recorded.spikes) {
    if (static_cast<int>(layer.size()) != options_.time_steps) {
      throw Error(ErrorCode::dim_mismatch, "recorded frame has the wrong number of time steps");
    }
  }
  if (recorded.utterance_start) reset_carry();
  override_ = &recorded;
  struct Clear {
    const FrameTrace*& p;
    ~Clear() { p = nullptr; }
  } clear{override_};
  return run_frame(FeatureFrame{recorded.input});
}

RunStats replay_trace(const Model& model, const SpikeTrace& trace, const SimOptions& options) {
  if (trace.empty()) throw Error(ErrorCode::empty_trace, "trace has no frames");
  if (trace.time_steps != options.time_steps || trace.rnn_dim != model.config.rnn_dim ||
      trace.input_dim != model.config.input_dim) {
    throw Error(ErrorCode::dim_mismatch, "trace shape does not match model and options");
  }
  Accelerator acc(model, options);
  for (const auto& fr : trace.frames) acc.replay_frame(fr);
  return acc.stats();
}

Model timing_model(const ModelConfig& config) {
  config.validate();
  Model m;
  m.config = config;
  for (LayerId id : kAllLayers) {
    const auto s = config.layer_shape(id);
    m.weights[index_of(id)] = QuantizedMatrix(s.rows, s.cols, config.weight_scale_shift[index_of(id)]);
  }
  return m;
}

}  // namespace rsnn::accel
