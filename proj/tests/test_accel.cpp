#include <gtest/gtest.h>

#include <sstream>

#include "rsnn/error.hpp"
#include "rsnn/accel/accelerator.hpp"
#include "rsnn/accel/buffers.hpp"
#include "rsnn/accel/lif_hw.hpp"
#include "rsnn/fixtures.hpp"
#include "rsnn/golden.hpp"

using namespace rsnn;
using namespace rsnn::accel;

namespace {

const Model& fixture_model() {
  static const Model m = gen_random_model(21, build_pruned_config(), 0.35).model;
  return m;
}

// Every input byte 0xFF and every spike set, for `frames` frames.
SpikeTrace dense_trace(int ts, int frames) {
  SpikeTrace tr;
  tr.rnn_dim = 128;
  tr.input_dim = 40;
  tr.time_steps = ts;
  SpikeVector ones(128);
  for (int i = 0; i < 128; ++i) ones.set(i, true);
  for (int f = 0; f < frames; ++f) {
    FrameTrace ft;
    ft.utterance_start = f == 0;
    ft.input.assign(40, 0xFF);
    for (auto& layer : ft.spikes) layer.assign(static_cast<std::size_t>(ts), ones);
    tr.frames.push_back(ft);
  }
  return tr;
}

}  // namespace

TEST(Buffers, CapacityAndOccupancy) {
  EXPECT_EQ(total_capacity_bytes(), 150528);
  const auto b = WeightBuffers::load(fixture_model());
  EXPECT_EQ(b.words_used(), 40 + 3 * 128 + 15 * 128);
  EXPECT_EQ(b.words_used(), 2344);
  EXPECT_EQ(b.words_used(BufferId::input), 40);
  EXPECT_EQ(b.words_used(BufferId::rec0) + b.words_used(BufferId::rec1), 384);
  EXPECT_EQ(b.words_used(BufferId::fc0), 960);
  EXPECT_EQ(b.words_used(BufferId::fc1), 960);
}

TEST(Buffers, BaselineDoesNotFit) {
  try {
    check_fits(build_baseline_config());
    FAIL() << "expected capacity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::capacity);
  }
}

TEST(Buffers, FcWidthMustBeLaneMultiple) {
  auto c = build_pruned_config();
  c.rnn_dim = 64;  // at width 128 the config check already rejects this
  c.fc_dim = 1900;
  try {
    check_fits(c);
    FAIL() << "expected unsupported_shape";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsupported_shape);
  }
}

TEST(Buffers, WordReadbackMatchesMatrix) {
  const Model& m = fixture_model();
  const auto b = WeightBuffers::load(m);
  for (LayerId l : kAllLayers) {
    const auto& w = m.layer(l);
    const int groups = l == LayerId::fc ? 15 : 1;
    for (int i = 0; i < w.rows(); i += 7) {
      for (int g = 0; g < groups; ++g) {
        const auto lanes = b.lanes(l, i, g);
        const auto unpacked = unpack_word(b.word(l, i, g));
        ASSERT_EQ(lanes, unpacked);
        for (int k = 0; k < kLanes; ++k) {
          ASSERT_EQ(lanes[static_cast<std::size_t>(k)], w.at(i, g * kLanes + k));
        }
      }
    }
  }
}

TEST(Buffers, PackUnpackRoundTrip) {
  WordLanes lanes{};
  for (int k = 0; k < kLanes; ++k) lanes[static_cast<std::size_t>(k)] = static_cast<int8_t>(k % 16 - 8);
  EXPECT_EQ(unpack_word(pack_word(lanes)), lanes);
  EXPECT_EQ(pack_word(lanes)[0], 0x98);  // lane 0 = -8 low, lane 1 = -7 high
}

TEST(Buffers, AddressSplit) {
  const auto c = build_pruned_config();
  EXPECT_EQ(word_address(c, LayerId::l0_recurrent, 0, 0).buffer, BufferId::rec0);
  const auto a = word_address(c, LayerId::l1_feedforward, 64, 0);  // flat 192
  EXPECT_EQ(a.buffer, BufferId::rec1);
  EXPECT_EQ(a.word, 0);
  const auto f = word_address(c, LayerId::fc, 0, 8);  // flat 1024
  EXPECT_EQ(f.buffer, BufferId::fc1);
  EXPECT_EQ(f.word, 64);
}

TEST(LifHw, MatchesReferenceOnGrid) {
  for (int th = 0; th <= 11; ++th) {
    for (int beta = 0; beta <= 3; ++beta) {
      const auto p = LifParams::from_log2(beta, th);
      for (int stim = -2048; stim <= 2047; stim += 37) {
        for (int mem = -2048; mem <= 2047; mem += 53) {
          for (bool spk : {false, true}) {
            const auto hw = lif_hw(stim, mem, spk, p);
            const auto ref = golden::lif_update(stim, mem, spk, p);
            ASSERT_EQ(hw.membrane, ref.membrane);
            ASSERT_EQ(hw.spike, ref.spike);
          }
        }
      }
    }
  }
}

TEST(DenseTiming, OneTimeStep) {
  const auto st = replay_trace(timing_model(build_pruned_config()), dense_trace(1, 2),
                               SimOptions{false, true, 1});
  EXPECT_DOUBLE_EQ(st.cycles_per_frame(), 1312.0);
  EXPECT_EQ(st.layer(LayerId::l0_input).cycles, 2 * 160);
  EXPECT_EQ(st.layer(LayerId::l0_recurrent).cycles, 2 * 64);
  EXPECT_EQ(st.layer(LayerId::fc).cycles, 2 * 960);
}

TEST(DenseTiming, TwoTimeSteps) {
  const auto model = timing_model(build_pruned_config());
  const auto off = replay_trace(model, dense_trace(2, 2), SimOptions{false, false, 2});
  EXPECT_DOUBLE_EQ(off.cycles_per_frame(), 2464.0);
  const auto on = replay_trace(model, dense_trace(2, 2), SimOptions{false, true, 2});
  EXPECT_DOUBLE_EQ(on.cycles_per_frame(), 1504.0);
  for (LayerId l : {LayerId::l0_recurrent, LayerId::l1_feedforward, LayerId::l1_recurrent}) {
    EXPECT_EQ(on.layer(l).cycles, 2 * 128);
    EXPECT_EQ(on.layer(l).word_reads, 2 * 128);
  }
}

TEST(DenseTiming, SkipDoesNotChangeDenseFramesAfterTheFirst) {
  // Frame 0 has a zero carry, so only later frames are fully dense.
  const auto model = timing_model(build_pruned_config());
  for (int ts : {1, 2}) {
    for (bool merge : {false, true}) {
      const auto skip = replay_trace(model, dense_trace(ts, 3), SimOptions{true, merge, ts});
      const auto noskip = replay_trace(model, dense_trace(ts, 3), SimOptions{false, merge, ts});
      EXPECT_LE(skip.cycles_total(), noskip.cycles_total());
    }
  }
}

TEST(Timing, InputLayerExtremes) {
  Accelerator a(fixture_model(), SimOptions{true, true, 2});
  a.load_input(FeatureFrame{std::vector<uint8_t>(40, 0xFF)});
  a.run_layer_input();
  EXPECT_EQ(a.frame_stats().layer(LayerId::l0_input).cycles, 160);
  a.end_frame();
  a.reset_stats();
  a.load_input(FeatureFrame{std::vector<uint8_t>(40, 0)});
  a.run_layer_input();
  EXPECT_EQ(a.frame_stats().layer(LayerId::l0_input).cycles, 0);
}

TEST(Timing, InputRegisterMatchesGolden) {
  const Model& m = fixture_model();
  Accelerator a(m, SimOptions{});
  for (const auto& f : random_features(5, 4, 40)) {
    a.load_input(f);
    a.run_layer_input();
    const auto ref = golden::input_stimulus(f, m.layer(LayerId::l0_input));
    ASSERT_TRUE(std::equal(ref.begin(), ref.end(), a.input_register().begin()));
    a.reset_stats();
  }
}

TEST(Timing, SparserInputNeverCostsMore) {
  const Model model = timing_model(build_pruned_config());
  SpikeTrace tr = dense_trace(2, 2);
  const auto base = replay_trace(model, tr, SimOptions{});
  tr.frames[1].input[3] = 0;
  tr.frames[1].spikes[1][1].set(5, false);
  tr.frames[1].spikes[1][0].set(9, false);
  const auto sparser = replay_trace(model, tr, SimOptions{});
  EXPECT_LE(sparser.cycles_total(), base.cycles_total());
}

TEST(Differential, SimulatorMatchesGolden) {
  for (uint64_t seed = 30; seed < 34; ++seed) {
    const Model m = gen_random_model(seed, build_pruned_config(), 0.35).model;
    const auto frames = random_features(seed * 7, 10, 40);
    for (int ts : {1, 2}) {
      const auto ref = golden::run_utterance(frames, m, ts);
      for (bool skip : {false, true}) {
        for (bool merge : {false, true}) {
          Accelerator a(m, SimOptions{skip, merge, ts});
          SpikeTrace tr;
          for (std::size_t f = 0; f < frames.size(); ++f) {
            FrameTrace ft;
            ASSERT_EQ(a.run_frame(frames[f], &ft), ref.outputs[f])
                << "seed " << seed << " ts " << ts << " skip " << skip << " merge " << merge;
            ASSERT_EQ(ft.spikes, ref.trace.frames[f].spikes);
          }
        }
      }
    }
  }
}

TEST(Differential, ResetCarryStartsFreshUtterance) {
  const Model& m = fixture_model();
  const auto frames = random_features(8, 6, 40);
  Accelerator a(m, SimOptions{});
  for (int f = 0; f < 3; ++f) a.run_frame(frames[static_cast<std::size_t>(f)]);
  a.reset_carry();
  const auto ref = golden::run_utterance(std::span(frames).subspan(3), m, 2);
  for (std::size_t f = 3; f < frames.size(); ++f) EXPECT_EQ(a.run_frame(frames[f]), ref.outputs[f - 3]);
}

TEST(Modes, IllegalModeRejected) {
  Accelerator a(fixture_model(), SimOptions{true, true, 2});
  a.load_input(random_features(1, 1, 40)[0]);
  a.run_layer_input();
  EXPECT_THROW(a.run_layer_recurrent(LayerId::l0_recurrent, ZeroSkipMode::B), Error);
  EXPECT_THROW(a.run_layer_recurrent(LayerId::l0_recurrent, ZeroSkipMode::A), Error);
  EXPECT_THROW(a.run_layer_recurrent(LayerId::fc), Error);
}

TEST(Modes, FcMergeChoiceDoesNotChangeLogits) {
  const Model& m = fixture_model();
  const auto frames = random_features(9, 5, 40);
  Accelerator merged(m, SimOptions{true, true, 2});
  Accelerator split(m, SimOptions{true, false, 2});
  for (const auto& f : frames) EXPECT_EQ(merged.run_frame(f), split.run_frame(f));
  EXPECT_LE(merged.stats().layer(LayerId::fc).cycles, split.stats().layer(LayerId::fc).cycles);
}

TEST(Options, Validation) {
  EXPECT_THROW((SimOptions{true, true, 3}.validate()), Error);
  EXPECT_NO_THROW((SimOptions{true, true, 1}.validate()));
}

TEST(Replay, Errors) {
  const Model model = timing_model(build_pruned_config());
  EXPECT_THROW(replay_trace(model, SpikeTrace{}, SimOptions{}), Error);
  auto tr = dense_trace(1, 1);
  EXPECT_THROW(replay_trace(model, tr, SimOptions{true, true, 2}), Error);
}

TEST(EventLogTest, OneLinePerSlotAndHeader) {
  const Model& m = fixture_model();
  Accelerator a(m, SimOptions{true, true, 2});
  EventLog log;
  a.set_event_log(&log);
  a.run_frame(random_features(3, 1, 40)[0]);
  const auto& st = a.stats();
  int64_t slots = 0;
  for (const auto& l : st.layers) slots += l.events_processed + l.events_idle;
  EXPECT_EQ(static_cast<int64_t>(log.records().size()), slots);
  std::ostringstream os;
  log.write(os);
  EXPECT_EQ(os.str().rfind("# frame cycle layer set unit index group shift active\n", 0), 0u);
}

TEST(StatsJson, RoundTrip) {
  Accelerator a(fixture_model(), SimOptions{});
  for (const auto& f : random_features(4, 3, 40)) a.run_frame(f);
  EXPECT_EQ(stats_from_json(stats_to_json(a.stats())), a.stats());
}

TEST(StatsInvariants, TotalsSkipsAndBalance) {
  const Model& m = fixture_model();
  const auto frames = random_features(12, 6, 40);
  for (int ts : {1, 2}) {
    for (bool skip : {false, true}) {
      for (bool merge : {false, true}) {
        Accelerator a(m, SimOptions{skip, merge, ts});
        for (const auto& f : frames) {
          a.run_frame(f);
          // Within one frame a layer takes as long as its slower set.
          for (const auto& l : a.frame_stats().layers) {
            EXPECT_EQ(l.cycles, std::max(l.set_cycles[0], l.set_cycles[1]));
          }
        }
        const auto& st = a.stats();
        int64_t sum = 0;
        for (const auto& l : st.layers) sum += l.cycles;
        EXPECT_EQ(st.cycles_total(), sum);
        if (!skip) {
          EXPECT_EQ(st.events_skipped(), 0);
        }
      }
    }
  }
}

TEST(StatsInvariants, DenseSetsAreBalanced) {
  const Model model = timing_model(build_pruned_config());
  for (int ts : {1, 2}) {
    for (bool merge : {false, true}) {
      const auto st = replay_trace(model, dense_trace(ts, 2), SimOptions{false, merge, ts});
      for (LayerId l : kAllLayers) {
        const auto& ls = st.layer(l);
        EXPECT_EQ(ls.set_cycles[0], ls.set_cycles[1]) << layer_name(l) << " ts " << ts;
      }
    }
  }
}
