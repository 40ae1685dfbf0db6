#include "rsnn/accel/stats.hpp"

#include <json.hpp>

#include "rsnn/error.hpp"

namespace rsnn::accel {

using nlohmann::json;

void SimOptions::validate() const {
  if (time_steps != 1 && time_steps != 2) {
    throw Error(ErrorCode::invalid_argument, "time_steps must be 1 or 2");
  }
}

LayerStats& LayerStats::operator+=(const LayerStats& o) {
  cycles += o.cycles;
  for (std::size_t s = 0; s < 2; ++s) set_cycles[s] += o.set_cycles[s];
  word_reads += o.word_reads;
  element_reads += o.element_reads;
  events_processed += o.events_processed;
  events_idle += o.events_idle;
  events_skipped += o.events_skipped;
  return *this;
}

namespace {

template <typename F>
int64_t sum_layers(const RunStats& s, F f) {
  int64_t n = 0;
  for (const auto& l : s.layers) n += f(l);
  return n;
}

}  // namespace

int64_t RunStats::cycles_total() const {
  return sum_layers(*this, [](const LayerStats& l) { return l.cycles; });
}
int64_t RunStats::word_reads() const {
  return sum_layers(*this, [](const LayerStats& l) { return l.word_reads; });
}
int64_t RunStats::element_reads() const {
  return sum_layers(*this, [](const LayerStats& l) { return l.element_reads; });
}
int64_t RunStats::events_processed() const {
  return sum_layers(*this, [](const LayerStats& l) { return l.events_processed; });
}
int64_t RunStats::events_skipped() const {
  return sum_layers(*this, [](const LayerStats& l) { return l.events_skipped; });
}

double RunStats::cycles_per_frame() const {
  return frames ? static_cast<double>(cycles_total()) / static_cast<double>(frames) : 0.0;
}

RunStats& RunStats::operator+=(const RunStats& o) {
  if (frames == 0 && rnn_dim == 0) {
    *this = o;
    return *this;
  }
  if (!(o.options == options) || o.rnn_dim != rnn_dim || o.input_dim != input_dim) {
    throw Error(ErrorCode::invalid_argument, "cannot merge stats from different configurations");
  }
  frames += o.frames;
  for (std::size_t l = 0; l < kNumLayers; ++l) layers[l] += o.layers[l];
  drain_cycles += o.drain_cycles;
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) spikes[a][b] += o.spikes[a][b];
  }
  input_bits_set += o.input_bits_set;
  return *this;
}

std::string stats_to_json(const RunStats& s, int indent) {
  json per_layer = json::object();
  json reads_layer = json::object();
  json events_layer = json::object();
  for (LayerId id : kAllLayers) {
    const auto& l = s.layer(id);
    const std::string name(layer_name(id));
    per_layer[name] = {{"total", l.cycles}, {"set0", l.set_cycles[0]}, {"set1", l.set_cycles[1]}};
    reads_layer[name] = {{"words", l.word_reads}, {"elements", l.element_reads}};
    events_layer[name] = {
        {"processed", l.events_processed}, {"idle", l.events_idle}, {"skipped", l.events_skipped}};
  }

  json density = json::object();
  const double slots = static_cast<double>(s.frames) * s.rnn_dim;
  for (int layer = 0; layer < 2; ++layer) {
    json per_ts = json::array();
    for (int ts = 0; ts < s.options.time_steps; ++ts) {
      const auto n = s.spikes[static_cast<std::size_t>(layer)][static_cast<std::size_t>(ts)];
      per_ts.push_back({{"spikes", n}, {"density", slots > 0 ? static_cast<double>(n) / slots : 0.0}});
    }
    density["layer" + std::to_string(layer)] = per_ts;
  }
  const double bit_slots = static_cast<double>(s.frames) * s.input_dim * 8;

  json j = {
      {"options",
       {{"skip_enable", s.options.skip_enable},
        {"merge_enable", s.options.merge_enable},
        {"time_steps", s.options.time_steps}}},
      {"rnn_dim", s.rnn_dim},
      {"input_dim", s.input_dim},
      {"frames", s.frames},
      {"cycles",
       {{"total", s.cycles_total()},
        {"per_frame", s.cycles_per_frame()},
        {"per_layer", per_layer},
        {"drain", s.drain_cycles}}},
      {"weight_reads", {{"words", s.word_reads()}, {"elements", s.element_reads()}, {"per_layer", reads_layer}}},
      {"events",
       {{"processed", s.events_processed()}, {"skipped", s.events_skipped()}, {"per_layer", events_layer}}},
      {"input_bits", {{"set", s.input_bits_set},
                      {"density", bit_slots > 0 ? static_cast<double>(s.input_bits_set) / bit_slots : 0.0}}},
      {"spike_density", density},
  };
  return j.dump(indent) + "\n";
}

RunStats stats_from_json(const std::string& text) {
  RunStats s;
  try {
    const json j = json::parse(text);
    s.options.skip_enable = j.at("options").at("skip_enable").get<bool>();
    s.options.merge_enable = j.at("options").at("merge_enable").get<bool>();
    s.options.time_steps = j.at("options").at("time_steps").get<int>();
    s.options.validate();
    s.rnn_dim = j.at("rnn_dim").get<int>();
    s.input_dim = j.at("input_dim").get<int>();
    s.frames = j.at("frames").get<int64_t>();
    s.drain_cycles = j.at("cycles").at("drain").get<int64_t>();
    for (LayerId id : kAllLayers) {
      const std::string name(layer_name(id));
      auto& l = s.layer(id);
      const auto& c = j.at("cycles").at("per_layer").at(name);
      l.cycles = c.at("total").get<int64_t>();
      l.set_cycles = {c.at("set0").get<int64_t>(), c.at("set1").get<int64_t>()};
      const auto& r = j.at("weight_reads").at("per_layer").at(name);
      l.word_reads = r.at("words").get<int64_t>();
      l.element_reads = r.at("elements").get<int64_t>();
      const auto& e = j.at("events").at("per_layer").at(name);
      l.events_processed = e.at("processed").get<int64_t>();
      l.events_idle = e.at("idle").get<int64_t>();
      l.events_skipped = e.at("skipped").get<int64_t>();
    }
    for (int layer = 0; layer < 2; ++layer) {
      const auto& per_ts = j.at("spike_density").at("layer" + std::to_string(layer));
      for (int ts = 0; ts < s.options.time_steps; ++ts) {
        s.spikes[static_cast<std::size_t>(layer)][static_cast<std::size_t>(ts)] =
            per_ts.at(static_cast<std::size_t>(ts)).at("spikes").get<int64_t>();
      }
    }
    s.input_bits_set = j.at("input_bits").at("set").get<int64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("bad stats json: ") + e.what());
  }
  return s;
}

}  // namespace rsnn::accel
