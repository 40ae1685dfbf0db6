#include "rsnn/batch.hpp"

#include <omp.h>

#include "rsnn/error.hpp"

namespace rsnn {

std::vector<std::pair<std::size_t, std::size_t>> split_utterances(std::size_t frames,
                                                                  std::size_t utt_len) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (utt_len == 0) utt_len = frames;
  for (std::size_t b = 0; b < frames; b += utt_len) out.emplace_back(b, std::min(frames, b + utt_len));
  return out;
}

BatchResult run_utterance(const Model& model, std::span<const FeatureFrame> frames, Engine engine,
                          const accel::SimOptions& options, accel::EventLog* log) {
  BatchResult r;
  if (engine == Engine::golden) {
    auto u = golden::run_utterance(frames, model, options.time_steps);
    r.outputs = std::move(u.outputs);
    r.trace = std::move(u.trace);
    return r;
  }
  accel::Accelerator acc(model, options);
  acc.set_event_log(log);
  r.trace.rnn_dim = model.config.rnn_dim;
  r.trace.input_dim = model.config.input_dim;
  r.trace.time_steps = options.time_steps;
  r.outputs.reserve(frames.size());
  r.trace.frames.resize(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    r.outputs.push_back(acc.run_frame(frames[f], &r.trace.frames[f]));
  }
  r.stats = acc.stats();
  return r;
}

namespace {

void append(BatchResult& into, BatchResult&& part) {
  into.outputs.insert(into.outputs.end(), std::make_move_iterator(part.outputs.begin()),
                      std::make_move_iterator(part.outputs.end()));
  into.trace.append(part.trace);
  into.stats += part.stats;
}

BatchResult empty_result(const Model& model, Engine engine, const accel::SimOptions& options) {
  BatchResult r;
  r.trace.rnn_dim = model.config.rnn_dim;
  r.trace.input_dim = model.config.input_dim;
  r.trace.time_steps = options.time_steps;
  if (engine == Engine::sim) {
    r.stats.options = options;
    r.stats.rnn_dim = model.config.rnn_dim;
    r.stats.input_dim = model.config.input_dim;
  }
  return r;
}

}  // namespace

BatchResult run_batch_serial(const Model& model, std::span<const FeatureFrame> frames,
                             std::size_t utt_len, Engine engine, const accel::SimOptions& options,
                             accel::EventLog* log) {
  options.validate();
  BatchResult out = empty_result(model, engine, options);
  for (const auto& [b, e] : split_utterances(frames.size(), utt_len)) {
    append(out, run_utterance(model, frames.subspan(b, e - b), engine, options, log));
  }
  return out;
}

BatchResult run_batch_parallel(const Model& model, std::span<const FeatureFrame> frames,
                               std::size_t utt_len, Engine engine,
                               const accel::SimOptions& options, int jobs) {
  options.validate();
  const auto ranges = split_utterances(frames.size(), utt_len);
  const auto n = static_cast<std::ptrdiff_t>(ranges.size());
  std::vector<BatchResult> parts(ranges.size());
  std::vector<std::exception_ptr> errors(ranges.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t u = 0; u < n; ++u) {
    const auto k = static_cast<std::size_t>(u);
    try {
      const auto [b, e] = ranges[k];
      parts[k] = run_utterance(model, frames.subspan(b, e - b), engine, options);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  BatchResult out = empty_result(model, engine, options);
  for (auto& p : parts) append(out, std::move(p));
  return out;
}

}  // namespace rsnn
