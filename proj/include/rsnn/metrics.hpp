#pragma once

// Analytical accounting from configs and spike traces. Deliberately shares no
// code with the simulator so the two can be cross-checked.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rsnn/accel/stats.hpp"
#include "rsnn/model.hpp"
#include "rsnn/trace.hpp"

namespace rsnn::metrics {

// 25 ms windows every 10 ms.
inline constexpr int kFramesPerSecond = 100;

enum class MacRule { dense, post_skip, post_merge };
const char* rule_name(MacRule r) noexcept;
MacRule parse_rule(const std::string& s);

// Dense: the input layer costs 8 ops per input-weight pair (bit serial) once
// per frame; recurrent and FC layers cost one op per spike-weight pair per
// time step. post_skip counts only nonzero bits and spikes. post_merge also
// counts an FC position once when it fires in either time step.
struct MacReport {
  MacRule rule = MacRule::dense;
  int time_steps = 2;
  int64_t frames = 1;
  std::array<int64_t, kNumLayers> per_layer{};  // summed over frames

  int64_t total() const;
  double per_frame() const;
  double per_second() const { return per_frame() * kFramesPerSecond; }
};

// Trace-based rules throw missing_trace when trace is null.
MacReport count_macs(const ModelConfig& config, int time_steps, MacRule rule,
                     const SpikeTrace* trace = nullptr);

enum class AccessStrategy { layer_based, full_unfolding, ts_unfolding };
const char* strategy_name(AccessStrategy s) noexcept;
AccessStrategy parse_strategy(const std::string& s);

// Weight elements fetched per frame. Layer-based fetches every weight once
// per time step; the unfolding strategies fetch recurrent and FC weights once
// per frame. Input weights are fetched once per input bit in all cases.
struct AccessReport {
  AccessStrategy strategy = AccessStrategy::layer_based;
  int time_steps = 2;
  std::array<int64_t, kNumLayers> per_layer{};

  int64_t per_frame() const;
  // Reported as a count per frame-time unit, matching how the access figures
  // are quoted (1,458,176 -> "1.458 M/s").
  double millions() const { return static_cast<double>(per_frame()) / 1e6; }
};

AccessReport count_weight_accesses(const ModelConfig& config, int time_steps,
                                   AccessStrategy strategy);

// Reads the simulator should report for this trace under its dataflow
// choices, derived from the activity alone.
struct ReadCount {
  int64_t words = 0;
  int64_t elements = 0;
};
std::array<ReadCount, kNumLayers> expected_weight_reads(const ModelConfig& config,
                                                        const SpikeTrace& trace,
                                                        const accel::SimOptions& options);

// Model size through the compression pipeline.
struct CompressionPlan {
  ModelConfig baseline;
  int target_rnn_dim = 128;
  double fc_sparsity = 0.4;
  int bits = 4;
};

struct SizeStage {
  std::string name;
  int64_t parameters = 0;
  int bits = 32;
  int64_t bytes = 0;
  double megabytes() const { return static_cast<double>(bytes) / 1e6; }
};

int64_t size_bytes(int64_t parameters, int bits);
std::vector<SizeStage> model_size_report(const CompressionPlan& plan);

// Zero fractions per tap. L<l>T<ts>R is the previous-frame spikes feeding
// layer l's recurrent weights, L1T<ts>F the layer-0 spikes feeding layer 1,
// L2T<ts>F the layer-1 spikes feeding FC.
struct SparsityEntry {
  std::string tap;
  double zero_fraction = 0.0;
};

struct SparsityReport {
  double input_bit_zero_fraction = 0.0;
  std::vector<SparsityEntry> taps;

  double tap(const std::string& name) const;
};

SparsityReport sparsity_from_trace(const SpikeTrace& trace);

struct CrossCheckDiff {
  std::string term;
  int64_t expected = 0;
  int64_t actual = 0;
};

struct CrossCheckResult {
  std::vector<CrossCheckDiff> diffs;
  bool ok() const { return diffs.empty(); }
  std::string describe() const;
};

// Compares per layer: simulator MACs (processed events x lanes) against the
// post_skip rule, or post_merge for merged two-time-step FC, and word and
// element reads against expected_weight_reads.
CrossCheckResult cross_check(const accel::RunStats& stats, const ModelConfig& config,
                             const SpikeTrace& trace);

// Figures measured on the trained model over real speech. They depend on
// per-frame activity that was never published, so they are printed beside
// our numbers for comparison and never asserted.
struct ReportedFigure {
  const char* what;
  double value;
};
inline constexpr std::array<ReportedFigure, 3> kReportedMmacs = {{
    {"post_skip ts=2", 24.48},
    {"post_merge ts=2", 16.01},
    {"post_skip ts=1", 13.86},
}};
inline constexpr std::array<ReportedFigure, 3> kReportedCycles = {{
    {"skip ts=1", 574},
    {"skip ts=2 merge off", 1224},
    {"skip ts=2 merge on", 895},
}};

std::string format_mac_table(const std::vector<MacReport>& rows, const ModelConfig& config);
std::string format_size_table(const std::vector<SizeStage>& stages);

}  // namespace rsnn::metrics
