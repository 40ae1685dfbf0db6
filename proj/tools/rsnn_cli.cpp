// rsnn: fixture generation, compression, golden/simulator runs, comparison
// and accounting reports.
//
// Exit codes: 0 ok, 1 comparison or cross-check mismatch, 2 usage, 3 I/O or
// format error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "rsnn/accel/accelerator.hpp"
#include "rsnn/batch.hpp"
#include "rsnn/error.hpp"
#include "rsnn/fixtures.hpp"
#include "rsnn/metrics.hpp"
#include "rsnn/model_io.hpp"
#include "rsnn/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rsnn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const fs::path& p, const std::string& s) {
  write_file(p, std::span(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

std::string read_text(const fs::path& p) {
  const auto bytes = read_file(p);
  return {bytes.begin(), bytes.end()};
}

SpikeTrace load_trace(const fs::path& p) {
  std::istringstream in(read_text(p));
  return read_trace(in);
}

// gen -----------------------------------------------------------------------

struct GenArgs {
  uint64_t seed = 1;
  int dim = 128;
  int input_dim = 40;
  int fc_dim = 1920;
  int ts = 2;
  double density = 0.35;
  double fc_sparsity = 0.0;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  ModelConfig c = build_pruned_config();
  c.rnn_dim = a.dim;
  c.input_dim = a.input_dim;
  c.fc_dim = a.fc_dim;
  c.time_steps = a.ts;
  GeneratedModel g = gen_random_model(a.seed, c, a.density);
  if (a.fc_sparsity > 0.0) {
    auto& fc = g.model.weights[index_of(LayerId::fc)];
    fc = prune_unstructured(fc, a.fc_sparsity);
  }
  const auto bytes = serialize_model(g.model);
  write_file(a.out, bytes);
  std::cout << "parameters: " << parameter_count(c, a.fc_sparsity) << "\n"
            << "nonzero weights: " << [&] {
                 int64_t n = 0;
                 for (const auto& w : g.model.weights) n += w.count_nonzero();
                 return n;
               }() << "\n"
            << "bytes: " << bytes.size() << "\n"
            << "calibrated ts1 rate: " << g.calibration.ts1_rate[0] << " "
            << g.calibration.ts1_rate[1] << "\n";
  return kExitOk;
}

// features ------------------------------------------------------------------

struct FeatArgs {
  uint64_t seed = 1;
  int frames = 16;
  int dim = 40;
  double bit_density = -1.0;
  bool dense = false;
  bool zero = false;
  std::string out;
};

int cmd_features(const FeatArgs& a) {
  if (a.dense && a.zero) throw UsageError("--dense and --zero are exclusive");
  std::vector<FeatureFrame> frames;
  if (a.dense) {
    frames = constant_features(a.frames, a.dim, 0xFF);
  } else if (a.zero) {
    frames = constant_features(a.frames, a.dim, 0x00);
  } else if (a.bit_density >= 0.0) {
    frames = random_features_bits(a.seed, a.frames, a.dim, a.bit_density);
  } else {
    frames = random_features(a.seed, a.frames, a.dim);
  }
  write_file(a.out, serialize_features(frames, a.dim));
  std::cout << "frames: " << frames.size() << "\n";
  return kExitOk;
}

// compress ------------------------------------------------------------------

struct CompressArgs {
  std::string in;
  uint64_t baseline_seed = 1;
  int baseline_dim = 256;
  int target_dim = 128;
  double fc_sparsity = 0.4;
  int bits = 4;
  std::string out;
};

int cmd_compress(const CompressArgs& a) {
  ModelConfig base;
  RealWeights real;
  if (!a.in.empty()) {
    const Model m = deserialize_model(read_file(a.in));
    base = m.config;
    for (LayerId id : kAllLayers) {
      const auto& q = m.layer(id);
      RealMatrix r(q.rows(), q.cols());
      for (int i = 0; i < q.rows(); ++i) {
        for (int j = 0; j < q.cols(); ++j) r(i, j) = q.dequantized(i, j);
      }
      real[index_of(id)] = std::move(r);
    }
  } else {
    base = build_baseline_config();
    base.rnn_dim = a.baseline_dim;
    real = random_real_weights(a.baseline_seed, base);
  }

  const auto stages = metrics::model_size_report({base, a.target_dim, a.fc_sparsity, a.bits});
  std::cout << metrics::format_size_table(stages);

  auto pruned = prune_structured(base, a.target_dim, real);
  auto& fc = pruned.weights[index_of(LayerId::fc)];
  fc = prune_unstructured(fc, a.fc_sparsity);
  ModelConfig cfg = pruned.config;
  const QuantizedWeights q = quantize_weights(pruned.weights, a.bits, cfg);

  int64_t nonzero = 0;
  for (const auto& w : q) nonzero += w.count_nonzero();
  std::cout << "quantized nonzero weights: " << nonzero << "\n";

  if (!a.out.empty()) {
    if (a.bits != 4) throw UsageError("model files hold 4-bit weights; use --bits 4 with --out");
    Model m{cfg, q};
    write_file(a.out, serialize_model(m));
    std::cout << "wrote " << a.out << "\n";
  }
  return kExitOk;
}

// run -----------------------------------------------------------------------

struct RunArgs {
  std::string model;
  std::string features;
  std::size_t utt_len = 0;
  int ts = 0;
  bool no_skip = false;
  bool no_merge = false;
  std::string engine = "sim";
  std::string out_dir;
  int jobs = 1;
  bool dequantize = false;
  std::string event_log;
  bool cross_check = false;
};

void write_dequantized(const fs::path& p, const std::vector<golden::FrameOutput>& outs, int shift) {
  std::ostringstream os;
  os << std::setprecision(9);
  for (const auto& o : outs) {
    for (std::size_t k = 0; k < o.logits.size(); ++k) {
      os << (k ? " " : "") << std::ldexp(static_cast<double>(o.logits[k]), -shift);
    }
    os << "\n";
  }
  write_text(p, os.str());
}

int cmd_run(const RunArgs& a) {
  const Model model = deserialize_model(read_file(a.model));
  const auto frames = deserialize_features(read_file(a.features));
  if (!frames.empty() && static_cast<int>(frames.front().values.size()) != model.config.input_dim) {
    throw Error(ErrorCode::dim_mismatch, "feature width does not match model input_dim");
  }
  accel::SimOptions opt{!a.no_skip, !a.no_merge, a.ts ? a.ts : model.config.time_steps};
  if (opt.time_steps != 1 && opt.time_steps != 2) throw UsageError("--ts must be 1 or 2");
  if (a.engine != "golden" && a.engine != "sim" && a.engine != "both") {
    throw UsageError("--engine must be golden, sim or both");
  }
  if (a.jobs < 1) throw UsageError("--jobs must be at least 1");
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);

  const json manifest = {
      {"model", a.model},
      {"features", a.features},
      {"frames", frames.size()},
      {"utt_len", a.utt_len},
      {"time_steps", opt.time_steps},
      {"skip_enable", opt.skip_enable},
      {"merge_enable", opt.merge_enable},
      {"engine", a.engine},
      {"jobs", a.jobs},
      {"dequantize", a.dequantize},
      {"model_config",
       {{"rnn_dim", model.config.rnn_dim},
        {"input_dim", model.config.input_dim},
        {"fc_dim", model.config.fc_dim},
        {"lif",
         {{{"beta_shift", model.config.lif[0].beta_shift}, {"v_th", model.config.lif[0].v_th}},
          {{"beta_shift", model.config.lif[1].beta_shift}, {"v_th", model.config.lif[1].v_th}}}},
        {"weight_scale_shift", model.config.weight_scale_shift}}},
  };
  write_text(dir / "config.json", manifest.dump(2) + "\n");

  int rc = kExitOk;
  std::vector<std::pair<std::string, BatchResult>> results;
  for (const std::string engine : {"golden", "sim"}) {
    if (a.engine != engine && a.engine != "both") continue;
    const Engine e = engine == "golden" ? Engine::golden : Engine::sim;
    BatchResult r;
    if (e == Engine::sim && !a.event_log.empty()) {
      accel::EventLog log;
      r = run_batch_serial(model, frames, a.utt_len, e, opt, &log);
      std::ofstream out(a.event_log);
      if (!out) throw Error(ErrorCode::io, "cannot write " + a.event_log);
      log.write(out);
    } else if (a.jobs > 1) {
      r = run_batch_parallel(model, frames, a.utt_len, e, opt, a.jobs);
    } else {
      r = run_batch_serial(model, frames, a.utt_len, e, opt);
    }

    write_file(dir / ("logits_" + engine + ".bin"), serialize_logits(r.outputs, model.config.fc_dim));
    std::ostringstream trace;
    write_trace(trace, r.trace);
    write_text(dir / ("trace_" + engine + ".txt"), trace.str());
    if (a.dequantize) {
      write_dequantized(dir / ("logits_" + engine + ".txt"), r.outputs,
                        model.config.weight_scale_shift[index_of(LayerId::fc)]);
    }
    std::cout << engine << ": " << r.outputs.size() << " frames\n";

    if (e == Engine::sim) {
      write_text(dir / "stats.json", accel::stats_to_json(r.stats));
      std::cout << "cycles/frame: " << std::fixed << std::setprecision(2)
                << r.stats.cycles_per_frame() << "\n";
      if (a.cross_check && !r.trace.empty()) {
        const auto cc = metrics::cross_check(r.stats, model.config, r.trace);
        std::cout << cc.describe() << "\n";
        if (!cc.ok()) rc = kExitMismatch;
      }
    }
    results.emplace_back(engine, std::move(r));
  }

  if (results.size() == 2) {
    const auto& g = results[0].second.outputs;
    const auto& s = results[1].second.outputs;
    for (std::size_t f = 0; f < g.size(); ++f) {
      if (g[f] == s[f]) continue;
      std::cout << "golden and sim differ at frame " << f << "\n";
      return kExitMismatch;
    }
    std::cout << "golden and sim agree\n";
  }
  return rc;
}

// compare -------------------------------------------------------------------

int cmd_compare(const std::string& lhs, const std::string& rhs) {
  const auto a = read_file(lhs);
  const auto b = read_file(rhs);
  if (a == b) {
    std::cout << "identical\n";
    return kExitOk;
  }
  const auto la = deserialize_logits(a);
  const auto lb = deserialize_logits(b);
  if (la.fc_dim != lb.fc_dim || la.frames.size() != lb.frames.size()) {
    std::cout << "length mismatch: " << la.frames.size() << "x" << la.fc_dim << " vs "
              << lb.frames.size() << "x" << lb.fc_dim << "\n";
    return kExitMismatch;
  }
  for (std::size_t f = 0; f < la.frames.size(); ++f) {
    for (std::size_t k = 0; k < la.frames[f].logits.size(); ++k) {
      const int32_t x = la.frames[f].logits[k];
      const int32_t y = lb.frames[f].logits[k];
      if (x != y) {
        std::cout << "mismatch at frame " << f << " index " << k << ": " << x << " vs " << y << "\n";
        return kExitMismatch;
      }
    }
  }
  std::cout << "files differ outside the logit payload\n";
  return kExitMismatch;
}

// report --------------------------------------------------------------------

struct ReportArgs {
  bool macs = false;
  bool access = false;
  bool size = false;
  bool sparsity = false;
  bool cycles = false;
  bool cross = false;
  bool as_json = false;
  std::string model;
  std::string trace;
  std::string stats;
  int dim = 128;
  int input_dim = 40;
  int fc_dim = 1920;
  int ts = 2;
  std::string rule = "all";
  std::string strategy = "all";
  int target_dim = 128;
  double fc_sparsity = 0.4;
  int bits = 4;
  int baseline_dim = 256;
  bool no_skip = false;
  bool no_merge = false;
};

int cmd_report(ReportArgs a) {
  if (!(a.macs || a.access || a.size || a.sparsity || a.cycles || a.cross)) {
    a.macs = a.access = a.size = true;
  }
  ModelConfig cfg = build_pruned_config();
  std::optional<Model> model;
  if (!a.model.empty()) {
    model = deserialize_model(read_file(a.model));
    cfg = model->config;
  } else {
    cfg.rnn_dim = a.dim;
    cfg.input_dim = a.input_dim;
    cfg.fc_dim = a.fc_dim;
    cfg.validate();
  }
  std::optional<SpikeTrace> trace;
  if (!a.trace.empty()) {
    trace = load_trace(a.trace);
    a.ts = trace->time_steps;
  }
  json j = json::object();
  std::ostringstream text;
  int rc = kExitOk;

  if (a.macs) {
    std::vector<metrics::MacReport> rows;
    std::vector<metrics::MacRule> rules;
    if (a.rule == "all") {
      rules.push_back(metrics::MacRule::dense);
      if (trace) rules.insert(rules.end(), {metrics::MacRule::post_skip, metrics::MacRule::post_merge});
    } else {
      rules.push_back(metrics::parse_rule(a.rule));
    }
    for (auto r : rules) rows.push_back(metrics::count_macs(cfg, a.ts, r, trace ? &*trace : nullptr));
    text << metrics::format_mac_table(rows, cfg);
    text << "reported for the trained model (MMAC/s):";
    for (const auto& f : metrics::kReportedMmacs) text << "  " << f.what << " " << f.value;
    text << "\n\n";
    for (const auto& r : rows) {
      j["macs"][metrics::rule_name(r.rule)] = {{"time_steps", r.time_steps},
                                               {"per_layer", r.per_layer},
                                               {"per_frame", r.per_frame()},
                                               {"mmac_per_second", r.per_second() / 1e6}};
    }
  }

  if (a.access) {
    std::vector<metrics::AccessStrategy> strategies;
    if (a.strategy == "all") {
      strategies = {metrics::AccessStrategy::layer_based, metrics::AccessStrategy::full_unfolding,
                    metrics::AccessStrategy::ts_unfolding};
    } else {
      strategies.push_back(metrics::parse_strategy(a.strategy));
    }
    text << "weight accesses  rnn_dim=" << cfg.rnn_dim << " ts=" << a.ts << "\n"
         << std::left << std::setw(16) << "strategy" << std::right << std::setw(12) << "per frame"
         << std::setw(10) << "M/s" << "\n";
    for (auto s : strategies) {
      const auto r = metrics::count_weight_accesses(cfg, a.ts, s);
      text << std::left << std::setw(16) << metrics::strategy_name(s) << std::right << std::setw(12)
           << r.per_frame() << std::setw(10) << std::fixed << std::setprecision(3) << r.millions()
           << "\n";
      j["access"][metrics::strategy_name(s)] = {{"per_frame", r.per_frame()},
                                                {"per_layer", r.per_layer},
                                                {"millions", r.millions()}};
    }
    text << "\n";
  }

  if (a.size) {
    ModelConfig base = cfg;
    base.rnn_dim = a.model.empty() ? a.baseline_dim : cfg.rnn_dim;
    const auto stages = metrics::model_size_report({base, a.target_dim, a.fc_sparsity, a.bits});
    text << metrics::format_size_table(stages);
    ModelConfig p = base;
    p.rnn_dim = a.target_dim;
    int64_t used = p.input_dim + 3 * int64_t{p.rnn_dim} + int64_t{p.fc_dim / accel::kLanes} * p.rnn_dim;
    text << "weight buffers: " << used << " words used, capacity "
         << accel::total_capacity_bytes() << " B\n\n";
    for (const auto& s : stages) {
      j["size"].push_back({{"stage", s.name}, {"parameters", s.parameters}, {"bits", s.bits},
                           {"bytes", s.bytes}, {"megabytes", s.megabytes()}});
    }
    j["buffers"] = {{"words_used", used}, {"capacity_bytes", accel::total_capacity_bytes()}};
  }

  if (a.sparsity) {
    if (!trace) throw Error(ErrorCode::missing_trace, "--sparsity needs --trace");
    const auto r = metrics::sparsity_from_trace(*trace);
    text << "sparsity (zero fraction)\n" << std::fixed << std::setprecision(3)
         << std::left << std::setw(8) << "input" << r.input_bit_zero_fraction << "\n";
    j["sparsity"]["input_bits"] = r.input_bit_zero_fraction;
    for (const auto& e : r.taps) {
      text << std::setw(8) << e.tap << e.zero_fraction << "\n";
      j["sparsity"][e.tap] = e.zero_fraction;
    }
    text << std::right << "\n";
  }

  if (a.cycles) {
    if (!trace) throw Error(ErrorCode::missing_trace, "--cycles needs --trace");
    const accel::SimOptions opt{!a.no_skip, !a.no_merge, trace->time_steps};
    const auto st = accel::replay_trace(model ? *model : accel::timing_model(cfg), *trace, opt);
    text << "cycles/frame " << std::fixed << std::setprecision(2) << st.cycles_per_frame()
         << " (skip " << opt.skip_enable << ", merge " << opt.merge_enable << ", ts "
         << opt.time_steps << ")\n";
    for (LayerId id : kAllLayers) {
      text << "  " << std::left << std::setw(16) << layer_name(id) << std::right
           << static_cast<double>(st.layer(id).cycles) / static_cast<double>(st.frames) << "\n";
    }
    text << "reported for the trained model:";
    for (const auto& f : metrics::kReportedCycles) text << "  " << f.what << " " << f.value;
    text << "\n\n";
    j["cycles"] = json::parse(accel::stats_to_json(st));
  }

  if (a.cross) {
    if (!trace) throw Error(ErrorCode::missing_trace, "--cross-check needs --trace");
    if (a.stats.empty()) throw UsageError("--cross-check needs --stats");
    const auto st = accel::stats_from_json(read_text(a.stats));
    const auto cc = metrics::cross_check(st, cfg, *trace);
    text << cc.describe() << "\n";
    j["cross_check"] = {{"ok", cc.ok()}};
    for (const auto& d : cc.diffs) {
      j["cross_check"]["diffs"].push_back({{"term", d.term}, {"expected", d.expected}, {"actual", d.actual}});
    }
    if (!cc.ok()) rc = kExitMismatch;
  }

  std::cout << (a.as_json ? j.dump(2) + "\n" : text.str());
  return rc;
}

int exit_code_for(ErrorCode c) {
  return c == ErrorCode::invalid_argument ? kExitUsage : kExitIo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RSNN accelerator simulator and accounting tools"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a calibrated random model");
  g->add_option("--seed", gen.seed);
  g->add_option("--dim", gen.dim, "recurrent width")->check(CLI::PositiveNumber);
  g->add_option("--input-dim", gen.input_dim)->check(CLI::PositiveNumber);
  g->add_option("--fc-dim", gen.fc_dim)->check(CLI::PositiveNumber);
  g->add_option("--ts", gen.ts)->check(CLI::Range(1, 2));
  g->add_option("--density", gen.density, "target spike rate at time step 1");
  g->add_option("--fc-sparsity", gen.fc_sparsity, "fraction of FC weights to prune")
      ->check(CLI::Range(0.0, 0.999999));
  g->add_option("--out", gen.out)->required();

  FeatArgs feat;
  auto* f = app.add_subcommand("features", "generate a feature file");
  f->add_option("--seed", feat.seed);
  f->add_option("--frames", feat.frames)->check(CLI::NonNegativeNumber);
  f->add_option("--dim", feat.dim)->check(CLI::PositiveNumber);
  f->add_option("--bit-density", feat.bit_density)->check(CLI::Range(0.0, 1.0));
  f->add_flag("--dense", feat.dense, "every byte 0xFF");
  f->add_flag("--zero", feat.zero, "every byte 0x00");
  f->add_option("--out", feat.out)->required();

  CompressArgs comp;
  auto* c = app.add_subcommand("compress", "prune and quantize a model");
  c->add_option("--in", comp.in, "model file to compress (default: random float baseline)");
  c->add_option("--baseline-seed", comp.baseline_seed);
  c->add_option("--baseline-dim", comp.baseline_dim)->check(CLI::PositiveNumber);
  c->add_option("--target-dim", comp.target_dim)->check(CLI::PositiveNumber);
  c->add_option("--fc-sparsity", comp.fc_sparsity)->check(CLI::Range(0.0, 0.999999));
  c->add_option("--bits", comp.bits)->check(CLI::Range(2, 8));
  c->add_option("--out", comp.out);

  RunArgs run;
  auto* r = app.add_subcommand("run", "run the golden model and/or the simulator");
  r->add_option("--model", run.model)->required();
  r->add_option("--features", run.features)->required();
  r->add_option("--utt-len", run.utt_len, "frames per utterance, 0 = one utterance");
  r->add_option("--ts", run.ts, "time steps (default: from model)")->check(CLI::Range(1, 2));
  r->add_flag("--no-skip", run.no_skip);
  r->add_flag("--no-merge", run.no_merge);
  r->add_option("--engine", run.engine, "golden, sim or both");
  r->add_option("--out-dir", run.out_dir)->required();
  r->add_option("--jobs", run.jobs, "threads across utterances");
  r->add_flag("--dequantize", run.dequantize, "also write logits in real units");
  r->add_option("--event-log", run.event_log, "per-cycle simulator event log");
  r->add_flag("--cross-check", run.cross_check, "check simulator counts against accounting");

  std::string cmp_a, cmp_b;
  auto* cm = app.add_subcommand("compare", "compare two logit files");
  cm->add_option("a", cmp_a)->required();
  cm->add_option("b", cmp_b)->required();

  ReportArgs rep;
  auto* rp = app.add_subcommand("report", "complexity, access, size, sparsity and cycle tables");
  rp->add_flag("--macs", rep.macs);
  rp->add_flag("--access", rep.access);
  rp->add_flag("--size", rep.size);
  rp->add_flag("--sparsity", rep.sparsity);
  rp->add_flag("--cycles", rep.cycles);
  rp->add_flag("--cross-check", rep.cross);
  rp->add_flag("--json", rep.as_json);
  rp->add_option("--model", rep.model);
  rp->add_option("--trace", rep.trace);
  rp->add_option("--stats", rep.stats);
  rp->add_option("--dim", rep.dim)->check(CLI::PositiveNumber);
  rp->add_option("--input-dim", rep.input_dim)->check(CLI::PositiveNumber);
  rp->add_option("--fc-dim", rep.fc_dim)->check(CLI::PositiveNumber);
  rp->add_option("--ts", rep.ts)->check(CLI::Range(1, 2));
  rp->add_option("--rule", rep.rule, "dense, post_skip, post_merge or all");
  rp->add_option("--strategy", rep.strategy, "layer_based, full_unfolding, ts_unfolding or all");
  rp->add_option("--target-dim", rep.target_dim)->check(CLI::PositiveNumber);
  rp->add_option("--baseline-dim", rep.baseline_dim)->check(CLI::PositiveNumber);
  rp->add_option("--fc-sparsity", rep.fc_sparsity)->check(CLI::Range(0.0, 0.999999));
  rp->add_option("--bits", rep.bits)->check(CLI::Range(2, 32));
  rp->add_flag("--no-skip", rep.no_skip);
  rp->add_flag("--no-merge", rep.no_merge);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*f) return cmd_features(feat);
    if (*c) return cmd_compress(comp);
    if (*r) return cmd_run(run);
    if (*cm) return cmd_compare(cmp_a, cmp_b);
    if (*rp) return cmd_report(rep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
