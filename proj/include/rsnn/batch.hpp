#pragma once

// Runs a feature stream split into independent utterances. The serial path
// is the reference; the OpenMP path distributes utterances across threads and
// must produce identical bytes.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rsnn/accel/accelerator.hpp"
#include "rsnn/golden.hpp"
#include "rsnn/model.hpp"
#include "rsnn/trace.hpp"

namespace rsnn {

enum class Engine { golden, sim };

// [begin, end) frame ranges; utt_len 0 keeps the whole stream as one utterance.
std::vector<std::pair<std::size_t, std::size_t>> split_utterances(std::size_t frames,
                                                                  std::size_t utt_len);

struct BatchResult {
  std::vector<golden::FrameOutput> outputs;
  SpikeTrace trace;
  accel::RunStats stats;  // sim engine only

  bool operator==(const BatchResult&) const = default;
};

BatchResult run_utterance(const Model& model, std::span<const FeatureFrame> frames, Engine engine,
                          const accel::SimOptions& options, accel::EventLog* log = nullptr);

BatchResult run_batch_serial(const Model& model, std::span<const FeatureFrame> frames,
                             std::size_t utt_len, Engine engine, const accel::SimOptions& options,
                             accel::EventLog* log = nullptr);

// jobs <= 0 uses the OpenMP default thread count.
BatchResult run_batch_parallel(const Model& model, std::span<const FeatureFrame> frames,
                               std::size_t utt_len, Engine engine,
                               const accel::SimOptions& options, int jobs);

}  // namespace rsnn
