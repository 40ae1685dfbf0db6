#include "rsnn/metrics.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "rsnn/error.hpp"

namespace rsnn::metrics {

namespace {

constexpr int kBitsPerInput = 8;
constexpr int kWordLanes = 128;

std::size_t at(LayerId id) { return index_of(id); }

int64_t nnz(const SpikeVector& v) { return v.count(); }

int64_t nnz_or(const SpikeVector& a, const SpikeVector& b) {
  int64_t n = 0;
  for (int i = 0; i < a.size(); ++i) n += a[i] || b[i];
  return n;
}

int64_t input_bits(const FrameTrace& f) {
  int64_t n = 0;
  for (uint8_t b : f.input) n += std::popcount(b);
  return n;
}

void check_trace(const ModelConfig& config, int time_steps, const SpikeTrace& trace) {
  if (trace.empty()) throw Error(ErrorCode::empty_trace, "trace has no frames");
  if (trace.time_steps != time_steps || trace.rnn_dim != config.rnn_dim ||
      trace.input_dim != config.input_dim) {
    throw Error(ErrorCode::dim_mismatch, "trace shape does not match config");
  }
}

}  // namespace

const char* rule_name(MacRule r) noexcept {
  switch (r) {
    case MacRule::dense: return "dense";
    case MacRule::post_skip: return "post_skip";
    case MacRule::post_merge: return "post_merge";
  }
  return "?";
}

MacRule parse_rule(const std::string& s) {
  if (s == "dense") return MacRule::dense;
  if (s == "post_skip") return MacRule::post_skip;
  if (s == "post_merge") return MacRule::post_merge;
  throw Error(ErrorCode::invalid_argument, "unknown MAC rule '" + s + "'");
}

const char* strategy_name(AccessStrategy s) noexcept {
  switch (s) {
    case AccessStrategy::layer_based: return "layer_based";
    case AccessStrategy::full_unfolding: return "full_unfolding";
    case AccessStrategy::ts_unfolding: return "ts_unfolding";
  }
  return "?";
}

AccessStrategy parse_strategy(const std::string& s) {
  if (s == "layer_based") return AccessStrategy::layer_based;
  if (s == "full_unfolding") return AccessStrategy::full_unfolding;
  if (s == "ts_unfolding") return AccessStrategy::ts_unfolding;
  throw Error(ErrorCode::invalid_argument, "unknown access strategy '" + s + "'");
}

int64_t MacReport::total() const {
  int64_t t = 0;
  for (int64_t v : per_layer) t += v;
  return t;
}

double MacReport::per_frame() const {
  return frames > 0 ? static_cast<double>(total()) / static_cast<double>(frames) : 0.0;
}

MacReport count_macs(const ModelConfig& c, int time_steps, MacRule rule, const SpikeTrace* trace) {
  if (time_steps != 1 && time_steps != 2) {
    throw Error(ErrorCode::invalid_argument, "time_steps must be 1 or 2");
  }
  MacReport r;
  r.rule = rule;
  r.time_steps = time_steps;
  const int64_t dim = c.rnn_dim;

  if (rule == MacRule::dense) {
    r.per_layer[at(LayerId::l0_input)] = int64_t{c.input_dim} * dim * kBitsPerInput;
    for (LayerId id : {LayerId::l0_recurrent, LayerId::l1_feedforward, LayerId::l1_recurrent}) {
      r.per_layer[at(id)] = time_steps * dim * dim;
    }
    r.per_layer[at(LayerId::fc)] = time_steps * dim * c.fc_dim;
    return r;
  }

  if (!trace) {
    throw Error(ErrorCode::missing_trace, std::string("rule ") + rule_name(rule) + " needs a trace");
  }
  check_trace(c, time_steps, *trace);
  r.frames = static_cast<int64_t>(trace->frames.size());
  for (std::size_t f = 0; f < trace->frames.size(); ++f) {
    const auto& fr = trace->frames[f];
    r.per_layer[at(LayerId::l0_input)] += input_bits(fr) * dim;
    for (int ts = 0; ts < time_steps; ++ts) {
      const auto t = static_cast<std::size_t>(ts);
      r.per_layer[at(LayerId::l0_recurrent)] += nnz(trace->previous(f, 0, ts)) * dim;
      r.per_layer[at(LayerId::l1_feedforward)] += nnz(fr.spikes[0][t]) * dim;
      r.per_layer[at(LayerId::l1_recurrent)] += nnz(trace->previous(f, 1, ts)) * dim;
    }
    if (rule == MacRule::post_merge && time_steps == 2) {
      r.per_layer[at(LayerId::fc)] += nnz_or(fr.spikes[1][0], fr.spikes[1][1]) * c.fc_dim;
    } else {
      for (int ts = 0; ts < time_steps; ++ts) {
        r.per_layer[at(LayerId::fc)] += nnz(fr.spikes[1][static_cast<std::size_t>(ts)]) * c.fc_dim;
      }
    }
  }
  return r;
}

int64_t AccessReport::per_frame() const {
  int64_t t = 0;
  for (int64_t v : per_layer) t += v;
  return t;
}

AccessReport count_weight_accesses(const ModelConfig& c, int time_steps, AccessStrategy strategy) {
  if (time_steps != 1 && time_steps != 2) {
    throw Error(ErrorCode::invalid_argument, "time_steps must be 1 or 2");
  }
  AccessReport r;
  r.strategy = strategy;
  r.time_steps = time_steps;
  const int64_t fetches = strategy == AccessStrategy::layer_based ? time_steps : 1;
  r.per_layer[at(LayerId::l0_input)] = c.layer_shape(LayerId::l0_input).elements() * kBitsPerInput;
  for (LayerId id : {LayerId::l0_recurrent, LayerId::l1_feedforward, LayerId::l1_recurrent,
                     LayerId::fc}) {
    r.per_layer[at(id)] = c.layer_shape(id).elements() * fetches;
  }
  return r;
}

std::array<ReadCount, kNumLayers> expected_weight_reads(const ModelConfig& c,
                                                        const SpikeTrace& trace,
                                                        const accel::SimOptions& options) {
  const int ts = options.time_steps;
  check_trace(c, ts, trace);
  const bool skip = options.skip_enable;
  const int64_t dim = c.rnn_dim;
  const int64_t groups = c.fc_dim / kWordLanes;

  std::array<ReadCount, kNumLayers> out{};
  for (std::size_t f = 0; f < trace.frames.size(); ++f) {
    const auto& fr = trace.frames[f];
    out[at(LayerId::l0_input)].words += skip ? input_bits(fr) : int64_t{c.input_dim} * kBitsPerInput;

    const std::array<SpikeVector, 3> single_ts_src = {
        trace.previous(f, 0, 0), fr.spikes[0][0], trace.previous(f, 1, 0)};
    const std::array<LayerId, 3> rec = {LayerId::l0_recurrent, LayerId::l1_feedforward,
                                        LayerId::l1_recurrent};
    for (std::size_t k = 0; k < rec.size(); ++k) {
      // Two time steps share every word; one time step can skip.
      out[at(rec[k])].words += (ts == 2 || !skip) ? dim : nnz(single_ts_src[k]);
    }

    int64_t fc_positions = 0;
    if (ts == 2 && options.merge_enable) {
      fc_positions = skip ? nnz_or(fr.spikes[1][0], fr.spikes[1][1]) : dim;
    } else {
      for (int t = 0; t < ts; ++t) {
        fc_positions += skip ? nnz(fr.spikes[1][static_cast<std::size_t>(t)]) : dim;
      }
    }
    out[at(LayerId::fc)].words += fc_positions * groups;
  }
  for (LayerId id : kAllLayers) {
    out[at(id)].elements = out[at(id)].words * (id == LayerId::fc ? kWordLanes : dim);
  }
  return out;
}

int64_t size_bytes(int64_t parameters, int bits) {
  if (parameters < 0 || bits <= 0) throw Error(ErrorCode::invalid_argument, "bad size arguments");
  return (parameters * bits + 7) / 8;
}

std::vector<SizeStage> model_size_report(const CompressionPlan& plan) {
  if (plan.target_rnn_dim <= 0 || plan.target_rnn_dim > plan.baseline.rnn_dim) {
    throw Error(ErrorCode::invalid_argument, "target width must be in (0, baseline width]");
  }
  if (plan.bits < 2 || plan.bits > 32) throw Error(ErrorCode::invalid_argument, "bits out of range");
  ModelConfig pruned = plan.baseline;
  pruned.rnn_dim = plan.target_rnn_dim;

  const int64_t p0 = plan.baseline.parameter_count();
  const int64_t p1 = pruned.parameter_count();
  const int64_t p2 = parameter_count(pruned, plan.fc_sparsity);
  return {
      {"baseline float32", p0, 32, size_bytes(p0, 32)},
      {"+structured pruning", p1, 32, size_bytes(p1, 32)},
      {"+unstructured pruning", p2, 32, size_bytes(p2, 32)},
      {"+" + std::to_string(plan.bits) + "-bit quantization", p2, plan.bits, size_bytes(p2, plan.bits)},
  };
}

double SparsityReport::tap(const std::string& name) const {
  for (const auto& e : taps) {
    if (e.tap == name) return e.zero_fraction;
  }
  throw Error(ErrorCode::invalid_argument, "no sparsity tap " + name);
}

SparsityReport sparsity_from_trace(const SpikeTrace& trace) {
  if (trace.empty()) throw Error(ErrorCode::empty_trace, "trace has no frames");
  const auto n = static_cast<double>(trace.frames.size());
  const double width = trace.rnn_dim;

  SparsityReport r;
  int64_t set_bits = 0;
  for (const auto& f : trace.frames) set_bits += input_bits(f);
  const double bit_slots = n * trace.input_dim * kBitsPerInput;
  r.input_bit_zero_fraction = bit_slots > 0 ? 1.0 - static_cast<double>(set_bits) / bit_slots : 1.0;

  for (int ts = 0; ts < trace.time_steps; ++ts) {
    const auto t = static_cast<std::size_t>(ts);
    int64_t rec0 = 0, rec1 = 0, ff1 = 0, ff2 = 0;
    for (std::size_t f = 0; f < trace.frames.size(); ++f) {
      rec0 += nnz(trace.previous(f, 0, ts));
      rec1 += nnz(trace.previous(f, 1, ts));
      ff1 += nnz(trace.frames[f].spikes[0][t]);
      ff2 += nnz(trace.frames[f].spikes[1][t]);
    }
    const std::string T = "T" + std::to_string(ts + 1);
    const auto zero = [&](int64_t ones) { return 1.0 - static_cast<double>(ones) / (n * width); };
    r.taps.push_back({"L0" + T + "R", zero(rec0)});
    r.taps.push_back({"L1" + T + "F", zero(ff1)});
    r.taps.push_back({"L1" + T + "R", zero(rec1)});
    r.taps.push_back({"L2" + T + "F", zero(ff2)});
  }
  return r;
}

std::string CrossCheckResult::describe() const {
  if (ok()) return "cross-check ok";
  std::ostringstream os;
  os << "cross-check failed at " << diffs.front().term << ": expected " << diffs.front().expected
     << ", simulator " << diffs.front().actual;
  if (diffs.size() > 1) os << " (" << diffs.size() - 1 << " more)";
  return os.str();
}

CrossCheckResult cross_check(const accel::RunStats& stats, const ModelConfig& config,
                             const SpikeTrace& trace) {
  const int ts = stats.options.time_steps;
  check_trace(config, ts, trace);
  CrossCheckResult result;
  const auto diff = [&](const std::string& term, int64_t expected, int64_t actual) {
    if (expected != actual) result.diffs.push_back({term, expected, actual});
  };
  diff("frames", static_cast<int64_t>(trace.frames.size()), stats.frames);

  const MacRule rule = (ts == 2 && stats.options.merge_enable) ? MacRule::post_merge : MacRule::post_skip;
  const MacReport macs = count_macs(config, ts, rule, &trace);
  const auto reads = expected_weight_reads(config, trace, stats.options);
  for (LayerId id : kAllLayers) {
    const std::string name(layer_name(id));
    const auto& l = stats.layer(id);
    const int64_t lanes = id == LayerId::fc ? kWordLanes : config.rnn_dim;
    diff(name + ".macs", macs.per_layer[at(id)], l.events_processed * lanes);
    diff(name + ".word_reads", reads[at(id)].words, l.word_reads);
    diff(name + ".element_reads", reads[at(id)].elements, l.element_reads);
  }
  return result;
}

std::string format_mac_table(const std::vector<MacReport>& rows, const ModelConfig& config) {
  std::ostringstream os;
  os << "MACs  rnn_dim=" << config.rnn_dim << " input_dim=" << config.input_dim
     << " fc_dim=" << config.fc_dim << "\n";
  os << std::left << std::setw(12) << "rule" << std::setw(4) << "ts" << std::right << std::setw(12)
     << "L0-input" << std::setw(12) << "L0-rec" << std::setw(12) << "L1-ff" << std::setw(12)
     << "L1-rec" << std::setw(12) << "FC" << std::setw(14) << "per frame" << std::setw(12)
     << "MMAC/s" << "\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(12) << rule_name(r.rule) << std::setw(4) << r.time_steps
       << std::right;
    for (int64_t v : r.per_layer) {
      os << std::setw(12) << std::fixed << std::setprecision(0)
         << static_cast<double>(v) / static_cast<double>(r.frames);
    }
    os << std::setw(14) << std::setprecision(r.frames == 1 ? 0 : 1) << r.per_frame()
       << std::setw(12) << std::setprecision(2) << r.per_second() / 1e6 << "\n";
  }
  return os.str();
}

std::string format_size_table(const std::vector<SizeStage>& stages) {
  std::ostringstream os;
  os << std::left << std::setw(26) << "stage" << std::right << std::setw(12) << "params"
     << std::setw(6) << "bits" << std::setw(12) << "bytes" << std::setw(9) << "MB" << "\n";
  for (const auto& s : stages) {
    os << std::left << std::setw(26) << s.name << std::right << std::setw(12) << s.parameters
       << std::setw(6) << s.bits << std::setw(12) << s.bytes << std::setw(9) << std::fixed
       << std::setprecision(2) << s.megabytes() << "\n";
  }
  return os.str();
}

}  // namespace rsnn::metrics
