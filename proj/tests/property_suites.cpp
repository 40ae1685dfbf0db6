#include "property_suites.hpp"

#include <array>
#include <random>
#include <sstream>

#include "rsnn/accel/accelerator.hpp"
#include "rsnn/accel/lif_hw.hpp"
#include "rsnn/accel/zero_skip.hpp"
#include "rsnn/fixed_point.hpp"
#include "rsnn/fixtures.hpp"
#include "rsnn/golden.hpp"

namespace rsnn::props {
namespace {

using accel::EventStream;

constexpr std::size_t kMaxReported = 5;

void fail(SuiteResult& r, const std::string& what) {
  if (r.failures.size() < kMaxReported) r.failures.push_back(what);
}

using Weights8 = std::array<int, 8>;

Weights8 random_weights(std::mt19937_64& rng) {
  Weights8 w{};
  for (auto& v : w) v = static_cast<int>(rng() % 16) - 8;
  return w;
}

int64_t stream_sum(const EventStream& s, const Weights8& w, bool bit_indexed) {
  int64_t acc = 0;
  for (const auto& e : s) {
    if (!e.active) continue;
    // Type A streams index the weight by input, not by bit; the caller passes
    // the single weight replicated.
    const int weight = bit_indexed ? w[0] : w[e.index];
    acc += int64_t{weight} * (int64_t{1} << e.shift);
  }
  return acc;
}

bool check_a(uint8_t byte, const Weights8& w, bool skip) {
  const auto s = accel::zskip_type_a(byte, skip);
  return stream_sum(s.low, w, true) + stream_sum(s.high, w, true) == int64_t{w[0]} * byte;
}

bool check_b(uint8_t spikes, const Weights8& w, bool skip) {
  int64_t dense = 0;
  for (int k = 0; k < 8; ++k) dense += ((spikes >> k) & 1) * w[static_cast<std::size_t>(k)];
  return stream_sum(accel::zskip_type_b(spikes, skip), w, false) == dense;
}

bool check_c(uint8_t a, uint8_t b, const Weights8& w, bool skip) {
  int64_t dense = 0;
  for (int k = 0; k < 8; ++k) {
    dense += (((a >> k) & 1) + ((b >> k) & 1)) * w[static_cast<std::size_t>(k)];
  }
  return stream_sum(accel::zskip_type_c(a, b, skip), w, false) == dense;
}

std::string hex(int v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

}  // namespace

SuiteResult zero_skip_random(uint64_t seed, int cases) {
  std::mt19937_64 rng(seed);
  SuiteResult r;
  for (int i = 0; i < cases; ++i) {
    const auto w = random_weights(rng);
    const auto a = static_cast<uint8_t>(rng());
    const auto b = static_cast<uint8_t>(rng());
    const bool skip = (rng() & 1) != 0;
    if (!check_a(a, w, skip)) fail(r, "type A byte " + hex(a));
    if (!check_b(a, w, skip)) fail(r, "type B spikes " + hex(a));
    if (!check_c(a, b, w, skip)) fail(r, "type C pair " + hex(a) + "," + hex(b));
    r.cases += 3;
  }
  return r;
}

SuiteResult zero_skip_type_a_exhaustive(uint64_t seed) {
  std::mt19937_64 rng(seed);
  SuiteResult r;
  for (int v = 0; v < 256; ++v) {
    const auto w = random_weights(rng);
    for (bool skip : {false, true}) {
      if (!check_a(static_cast<uint8_t>(v), w, skip)) fail(r, "type A byte " + hex(v));
    }
    ++r.cases;
  }
  return r;
}

SuiteResult zero_skip_type_c_exhaustive(uint64_t seed) {
  std::mt19937_64 rng(seed);
  SuiteResult r;
  for (int a = 0; a < 256; ++a) {
    for (int b = 0; b < 256; ++b) {
      const auto w = random_weights(rng);
      if (!check_c(static_cast<uint8_t>(a), static_cast<uint8_t>(b), w, true) ||
          !check_c(static_cast<uint8_t>(a), static_cast<uint8_t>(b), w, false)) {
        fail(r, "type C pair " + hex(a) + "," + hex(b));
      }
      ++r.cases;
    }
  }
  return r;
}

SuiteResult lif_exhaustive() {
  // Membrane grid: extremes, values around every power of two, and zero.
  std::vector<int32_t> grid = {-2048, -2047, -1, 0, 1, 2046, 2047};
  for (int k = 0; k <= 11; ++k) {
    for (int d : {-1, 0, 1}) {
      grid.push_back((1 << k) + d);
      grid.push_back(-(1 << k) + d);
    }
  }
  SuiteResult r;
  for (int th = 0; th <= LifParams::kMaxThresholdLog2; ++th) {
    for (int beta = 0; beta <= 3; ++beta) {
      const auto p = LifParams::from_log2(beta, th);
      for (int32_t stim = kAccMin; stim <= kAccMax; ++stim) {
        for (int32_t mem : grid) {
          if (!in_acc_range(mem)) continue;
          for (bool spk : {false, true}) {
            const auto hw = accel::lif_hw(stim, mem, spk, p);
            const auto ref = golden::lif_update(stim, mem, spk, p);
            if (hw.membrane != ref.membrane || hw.spike != ref.spike) {
              fail(r, "stim " + std::to_string(stim) + " mem " + std::to_string(mem) + " th 2^" +
                          std::to_string(th));
            }
            ++r.cases;
          }
        }
      }
    }
  }
  return r;
}

SuiteResult merged_fc(uint64_t seed, int cases) {
  std::mt19937_64 rng(seed);
  const Model m = gen_random_model(seed, build_pruned_config(), 0.35).model;
  accel::Accelerator merged(m, accel::SimOptions{true, true, 2});
  accel::Accelerator split(m, accel::SimOptions{true, false, 2});
  const int dim = m.config.rnn_dim;
  SuiteResult r;
  for (int i = 0; i < cases; ++i) {
    FrameTrace ft;
    ft.utterance_start = true;
    ft.input.assign(static_cast<std::size_t>(m.config.input_dim), 0);
    const auto density = static_cast<int>(rng() % 101);
    for (auto& layer : ft.spikes) {
      layer.assign(2, SpikeVector(dim));
      for (auto& v : layer) {
        for (int j = 0; j < dim; ++j) v.set(j, static_cast<int>(rng() % 100) < density);
      }
    }
    const auto a = merged.replay_frame(ft);
    const auto b = split.replay_frame(ft);
    const auto ref = golden::fc_forward(ft.spikes[1], m.layer(LayerId::fc));
    if (!(a == b) || !(a == ref)) fail(r, "instance " + std::to_string(i));
    ++r.cases;
  }
  return r;
}

}  // namespace rsnn::props
