#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "rsnn/model.hpp"

namespace rsnn::accel {

struct SimOptions {
  bool skip_enable = true;
  bool merge_enable = true;
  int time_steps = 2;

  void validate() const;
  bool operator==(const SimOptions&) const = default;
};

// Counters for one layer pass, summed over frames.
//   events_processed: nonzero events, counted per PE set
//   events_idle:      zero slots that still cost a cycle (skip off, or type D)
//   events_skipped:   zero slots removed by a zero-skip unit
struct LayerStats {
  int64_t cycles = 0;
  std::array<int64_t, 2> set_cycles{};
  int64_t word_reads = 0;
  int64_t element_reads = 0;
  int64_t events_processed = 0;
  int64_t events_idle = 0;
  int64_t events_skipped = 0;

  LayerStats& operator+=(const LayerStats& o);
  bool operator==(const LayerStats&) const = default;
};

struct RunStats {
  SimOptions options;
  int rnn_dim = 0;
  int input_dim = 0;
  int64_t frames = 0;
  std::array<LayerStats, kNumLayers> layers{};
  int64_t drain_cycles = 0;  // FC output drain, 4 values per cycle; not in cycles_total
  std::array<std::array<int64_t, 2>, 2> spikes{};  // [layer][ts]
  int64_t input_bits_set = 0;

  LayerStats& layer(LayerId id) { return layers[index_of(id)]; }
  const LayerStats& layer(LayerId id) const { return layers[index_of(id)]; }

  int64_t cycles_total() const;
  int64_t word_reads() const;
  int64_t element_reads() const;
  int64_t events_processed() const;
  int64_t events_skipped() const;
  double cycles_per_frame() const;

  // Merges counters from runs with the same options and shape.
  RunStats& operator+=(const RunStats& o);
  bool operator==(const RunStats&) const = default;
};

std::string stats_to_json(const RunStats& stats, int indent = 2);
RunStats stats_from_json(const std::string& text);

}  // namespace rsnn::accel
