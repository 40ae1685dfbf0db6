#include "rsnn/trace.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "rsnn/error.hpp"

namespace rsnn {

namespace {

constexpr char kHex[] = "0123456789abcdef";

std::string bytes_to_hex(std::span<const uint8_t> bytes) {
  std::string s;
  s.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0x0F]);
  }
  return s;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw Error(ErrorCode::parse, std::string("bad hex digit '") + c + "'");
}

std::vector<uint8_t> hex_to_bytes(const std::string& hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::parse, "odd-length hex string");
  std::vector<uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<uint8_t>(hex_digit(hex[2 * i]) << 4 | hex_digit(hex[2 * i + 1]));
  }
  return out;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

SpikeVector SpikeTrace::previous(std::size_t frame, int layer, int ts) const {
  if (frame >= frames.size() || frames[frame].utterance_start || frame == 0) {
    return SpikeVector(rnn_dim);
  }
  return frames[frame - 1].spikes[static_cast<std::size_t>(layer)][static_cast<std::size_t>(ts)];
}

void SpikeTrace::append(const SpikeTrace& other) {
  if (frames.empty() && rnn_dim == 0) {
    *this = other;
    return;
  }
  if (other.rnn_dim != rnn_dim || other.input_dim != input_dim ||
      other.time_steps != time_steps) {
    throw Error(ErrorCode::dim_mismatch, "cannot append traces of different shapes");
  }
  frames.insert(frames.end(), other.frames.begin(), other.frames.end());
}

std::string spikes_to_hex(const SpikeVector& v) {
  std::vector<uint8_t> bytes(static_cast<std::size_t>((v.size() + 7) / 8));
  for (std::size_t s = 0; s < bytes.size(); ++s) bytes[s] = v.slice(static_cast<int>(s));
  return bytes_to_hex(bytes);
}

SpikeVector spikes_from_hex(const std::string& hex, int size) {
  const auto bytes = hex_to_bytes(hex);
  if (static_cast<int>(bytes.size()) != (size + 7) / 8) {
    throw Error(ErrorCode::parse, "spike hex length does not match width");
  }
  SpikeVector v(size);
  for (int i = 0; i < size; ++i) v.set(i, (bytes[static_cast<std::size_t>(i / 8)] >> (i % 8)) & 1);
  return v;
}

void write_trace(std::ostream& out, const SpikeTrace& trace) {
  out << "rsnn-trace 1 " << trace.rnn_dim << ' ' << trace.input_dim << ' ' << trace.time_steps
      << ' ' << trace.frames.size() << '\n';
  for (std::size_t f = 0; f < trace.frames.size(); ++f) {
    const auto& fr = trace.frames[f];
    out << "F " << f << ' ' << (fr.utterance_start ? 1 : 0) << ' ' << bytes_to_hex(fr.input)
        << '\n';
    for (int layer = 0; layer < 2; ++layer) {
      const auto& per_ts = fr.spikes[static_cast<std::size_t>(layer)];
      for (std::size_t ts = 0; ts < per_ts.size(); ++ts) {
        out << "S " << f << ' ' << layer << ' ' << ts << ' ' << spikes_to_hex(per_ts[ts]) << '\n';
      }
    }
  }
}

SpikeTrace read_trace(std::istream& in) {
  SpikeTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::parse, "empty trace stream");
  std::size_t n_frames = 0;
  {
    std::istringstream hs(line);
    std::string magic;
    int version = 0;
    if (!(hs >> magic >> version >> trace.rnn_dim >> trace.input_dim >> trace.time_steps >>
          n_frames) ||
        magic != "rsnn-trace") {
      throw Error(ErrorCode::parse, "bad trace header");
    }
    if (version != 1) throw Error(ErrorCode::version_mismatch, "unsupported trace version");
    if (trace.time_steps != 1 && trace.time_steps != 2) {
      throw Error(ErrorCode::parse, "trace time_steps must be 1 or 2");
    }
  }
  trace.frames.resize(n_frames);
  for (auto& fr : trace.frames) {
    for (auto& layer : fr.spikes) {
      layer.assign(static_cast<std::size_t>(trace.time_steps), SpikeVector(trace.rnn_dim));
    }
  }

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    char kind = 0;
    std::size_t f = 0;
    ls >> kind >> f;
    if (!ls || f >= n_frames) throw Error(ErrorCode::parse, "bad trace record: " + line);
    auto& fr = trace.frames[f];
    if (kind == 'F') {
      int start = 0;
      std::string hex;
      if (!(ls >> start >> hex)) throw Error(ErrorCode::parse, "bad frame record: " + line);
      fr.utterance_start = start != 0;
      fr.input = hex_to_bytes(hex);
      if (static_cast<int>(fr.input.size()) != trace.input_dim) {
        throw Error(ErrorCode::parse, "input row width mismatch");
      }
    } else if (kind == 'S') {
      int layer = 0;
      int ts = 0;
      std::string hex;
      if (!(ls >> layer >> ts >> hex) || layer < 0 || layer > 1 || ts < 0 ||
          ts >= trace.time_steps) {
        throw Error(ErrorCode::parse, "bad spike record: " + line);
      }
      fr.spikes[static_cast<std::size_t>(layer)][static_cast<std::size_t>(ts)] =
          spikes_from_hex(hex, trace.rnn_dim);
    } else {
      throw Error(ErrorCode::parse, "unknown trace record: " + line);
    }
  }
  return trace;
}

SpikeTrace synthesize_trace(const SyntheticProfile& p) {
  if (p.time_steps != 1 && p.time_steps != 2) {
    throw Error(ErrorCode::invalid_argument, "time_steps must be 1 or 2");
  }
  std::mt19937_64 rng(p.seed);
  SpikeTrace trace;
  trace.rnn_dim = p.rnn_dim;
  trace.input_dim = p.input_dim;
  trace.time_steps = p.time_steps;
  trace.frames.resize(static_cast<std::size_t>(p.frames));

  for (std::size_t f = 0; f < trace.frames.size(); ++f) {
    auto& fr = trace.frames[f];
    fr.utterance_start = f == 0;
    fr.input.resize(static_cast<std::size_t>(p.input_dim));
    for (auto& byte : fr.input) {
      byte = 0;
      for (int b = 0; b < 8; ++b) {
        if (unit(rng) < p.input_bit_density) byte |= static_cast<uint8_t>(1u << b);
      }
    }
    for (int layer = 0; layer < 2; ++layer) {
      const double d = p.layer_density[static_cast<std::size_t>(layer)];
      const double given_silent =
          d < 1.0 ? std::clamp((d - p.ts_overlap * d) / (1.0 - d), 0.0, 1.0) : 1.0;
      auto& per_ts = fr.spikes[static_cast<std::size_t>(layer)];
      per_ts.assign(static_cast<std::size_t>(p.time_steps), SpikeVector(p.rnn_dim));
      for (int i = 0; i < p.rnn_dim; ++i) {
        const bool first = unit(rng) < d;
        per_ts[0].set(i, first);
        if (p.time_steps == 2) per_ts[1].set(i, unit(rng) < (first ? p.ts_overlap : given_silent));
      }
    }
  }
  return trace;
}

}  // namespace rsnn
