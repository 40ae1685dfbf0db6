#pragma once

// Cycle-level model of the dual PE-array RSNN accelerator. One instance holds
// the loaded weight buffers and the architectural registers of a single
// utterance stream; distinct instances are independent.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rsnn/accel/buffers.hpp"
#include "rsnn/accel/stats.hpp"
#include "rsnn/accel/zero_skip.hpp"
#include "rsnn/golden.hpp"
#include "rsnn/model.hpp"
#include "rsnn/trace.hpp"

namespace rsnn::accel {

// PE accumulators carry guard bits; only register writes saturate to 12 bits.
inline constexpr int kPeGuardBits = 18;
inline constexpr int32_t kPeGuardLimit = 1 << (kPeGuardBits - 1);

struct EventRecord {
  int64_t frame = 0;
  LayerId layer = LayerId::l0_input;
  int64_t cycle = 0;  // frame-relative
  int set = 0;
  char unit = 'A';
  int index = 0;   // input, spike position, or bit
  int group = 0;   // FC output group
  int shift = 0;
  bool active = true;
};

class EventLog {
 public:
  void add(const EventRecord& r) { records_.push_back(r); }
  const std::vector<EventRecord>& records() const { return records_; }
  void clear() { records_.clear(); }
  // One line per event: frame cycle layer set unit index group shift active
  void write(std::ostream& out) const;

 private:
  std::vector<EventRecord> records_;
};

class Accelerator {
 public:
  Accelerator(const Model& model, SimOptions options);

  const WeightBuffers& buffers() const { return buffers_; }
  const SimOptions& options() const { return options_; }
  const ModelConfig& config() const { return config_; }

  // Zeroes the hidden-state spike registers; call at each utterance boundary.
  void reset_carry();

  // Full FSM for one frame: input layer, L0 recurrent, L1 feedforward,
  // L1 recurrent, FC.
  golden::FrameOutput run_frame(const FeatureFrame& frame, FrameTrace* trace = nullptr);

  // Same schedule, but recurrent-layer spikes are taken from the record
  // instead of the LIF units. Used to time recorded or synthetic activity.
  golden::FrameOutput replay_frame(const FrameTrace& recorded);

  // Individual FSM states, exposed for testing. They must run in order.
  void load_input(const FeatureFrame& frame);
  void run_layer_input();
  void run_layer_recurrent(LayerId layer, std::optional<ZeroSkipMode> mode = std::nullopt);
  golden::FrameOutput run_layer_fc(std::optional<ZeroSkipMode> mode = std::nullopt);
  void end_frame();

  std::span<const int32_t> input_register() const { return input_reg_; }
  std::span<const int32_t> ff_register(int ts) const { return ff1_reg_[static_cast<std::size_t>(ts)]; }
  const SpikeVector& spikes(int layer, int ts) const {
    return cur_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(ts)];
  }

  const RunStats& stats() const { return stats_; }
  const RunStats& frame_stats() const { return frame_stats_; }
  void reset_stats();

  void set_event_log(EventLog* log) { log_ = log; }

 private:
  using PeArray = std::array<int32_t, kLanes>;
  using SetSlots = std::array<int64_t, 2>;

  void accumulate(std::span<int32_t> acc, const WordLanes& w, int shift);
  void lif_bank(int layer, const std::vector<std::vector<int32_t>>& stimulus);
  void count(LayerId layer, int64_t words, int lanes, int64_t processed, int64_t idle,
             int64_t skipped, SetSlots slots);
  void log_event(LayerId layer, int64_t slot, int set, ZeroSkipMode unit, int index, int group,
                 const SkipEvent& e);
  const SpikeVector& source(LayerId layer, int ts) const;
  void check_mode(LayerId layer, std::optional<ZeroSkipMode> mode) const;

  ModelConfig config_;
  SimOptions options_;
  WeightBuffers buffers_;
  int fc_groups_ = 0;

  std::array<uint8_t, kInputEntries> in_buffer_{};
  std::vector<int32_t> input_reg_;
  std::array<std::vector<int32_t>, 2> ff1_reg_;  // per ts
  std::array<PeArray, kSets> pe_{};
  std::vector<int32_t> fc_acc_;

  std::array<std::vector<SpikeVector>, 2> prev_;  // [layer][ts], previous frame
  std::array<std::vector<SpikeVector>, 2> cur_;
  const FrameTrace* override_ = nullptr;
  bool utterance_start_ = true;

  RunStats stats_;
  RunStats frame_stats_;
  int64_t frame_cycle_base_ = 0;
  EventLog* log_ = nullptr;
};

// Times a recorded trace. Output values are discarded; only the stats matter.
RunStats replay_trace(const Model& model, const SpikeTrace& trace, const SimOptions& options);

// All-zero weights of the given shape, for replaying traces when only timing
// is wanted.
Model timing_model(const ModelConfig& config);

}  // namespace rsnn::accel
