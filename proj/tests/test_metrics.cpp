#include <gtest/gtest.h>

#include <cmath>

#include "rsnn/error.hpp"
#include "rsnn/accel/accelerator.hpp"
#include "rsnn/fixtures.hpp"
#include "rsnn/golden.hpp"
#include "rsnn/metrics.hpp"

using namespace rsnn;
using namespace rsnn::metrics;

namespace {

// Dense MACs from first principles: 8 bit-serial passes for the input layer,
// then one op per weight per time step for the rest.
int64_t dense_macs_oracle(const ModelConfig& c, int ts) {
  const int64_t h = c.rnn_dim;
  return 8LL * c.input_dim * h + ts * (3 * h * h + h * c.fc_dim);
}

SpikeTrace golden_trace(uint64_t seed, int ts, int frames) {
  const Model m = gen_random_model(seed, build_pruned_config(), 0.35).model;
  return golden::run_utterance(random_features(seed + 100, frames, 40), m, ts).trace;
}

}  // namespace

TEST(Macs, DenseCounts) {
  const auto base = build_baseline_config();
  const auto pruned = build_pruned_config();
  EXPECT_EQ(count_macs(base, 2, MacRule::dense).total(), 1458176);
  EXPECT_EQ(count_macs(pruned, 2, MacRule::dense).total(), 630784);
  EXPECT_EQ(count_macs(pruned, 1, MacRule::dense).total(), 335872);
  for (int ts : {1, 2}) {
    EXPECT_EQ(count_macs(base, ts, MacRule::dense).total(), dense_macs_oracle(base, ts));
    EXPECT_EQ(count_macs(pruned, ts, MacRule::dense).total(), dense_macs_oracle(pruned, ts));
  }
  EXPECT_NEAR(count_macs(base, 2, MacRule::dense).per_second() / 1e6, 145.82, 0.005);
}

TEST(Macs, TraceRulesNeedTrace) {
  try {
    count_macs(build_pruned_config(), 2, MacRule::post_skip);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::missing_trace);
  }
}

TEST(Macs, RuleOrdering) {
  const auto c = build_pruned_config();
  for (uint64_t seed : {1, 2, 3}) {
    for (int ts : {1, 2}) {
      const auto tr = golden_trace(seed, ts, 12);
      const double dense = count_macs(c, ts, MacRule::dense).per_frame();
      const double skip = count_macs(c, ts, MacRule::post_skip, &tr).per_frame();
      const double merge = count_macs(c, ts, MacRule::post_merge, &tr).per_frame();
      EXPECT_LE(merge, skip);
      EXPECT_LE(skip, dense);
      if (ts == 1) {
        EXPECT_EQ(merge, skip);
      }
    }
  }
}

TEST(Macs, AllOnesTraceEqualsDense) {
  const auto c = build_pruned_config();
  SpikeTrace tr;
  tr.rnn_dim = 128;
  tr.input_dim = 40;
  tr.time_steps = 1;
  SpikeVector ones(128);
  for (int i = 0; i < 128; ++i) ones.set(i, true);
  FrameTrace f;
  f.input.assign(40, 0xFF);
  for (auto& l : f.spikes) l = {ones};
  f.utterance_start = true;
  tr.frames = {f, f};
  tr.frames[1].utterance_start = false;
  // Frame 0 has no previous-frame spikes, so both recurrent layers are idle.
  const auto r = count_macs(c, 1, MacRule::post_skip, &tr);
  EXPECT_EQ(r.total(), 2 * 335872 - 2 * 128 * 128);
  EXPECT_EQ(r.per_layer[index_of(LayerId::fc)], 2 * 128 * 1920);
}

TEST(Accesses, Strategies) {
  const auto base = build_baseline_config();
  EXPECT_EQ(count_weight_accesses(base, 2, AccessStrategy::layer_based).per_frame(), 1458176);
  EXPECT_EQ(count_weight_accesses(base, 2, AccessStrategy::ts_unfolding).per_frame(), 770048);
  EXPECT_NEAR(count_weight_accesses(base, 2, AccessStrategy::ts_unfolding).millions(), 0.770, 0.0005);
  // Unfolding removes exactly the repeated recurrent and FC fetches.
  const int64_t h = base.rnn_dim;
  EXPECT_EQ(count_weight_accesses(base, 2, AccessStrategy::layer_based).per_frame() -
                count_weight_accesses(base, 2, AccessStrategy::ts_unfolding).per_frame(),
            3 * h * h + h * base.fc_dim);
  EXPECT_EQ(count_weight_accesses(base, 1, AccessStrategy::layer_based).per_frame(),
            count_weight_accesses(base, 1, AccessStrategy::ts_unfolding).per_frame());
  EXPECT_EQ(parse_strategy("ts_unfolding"), AccessStrategy::ts_unfolding);
  EXPECT_THROW(parse_strategy("nope"), Error);
}

TEST(Sizes, PipelineStages) {
  CompressionPlan plan{build_baseline_config()};
  const auto s = model_size_report(plan);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].parameters, 698368);
  EXPECT_EQ(s[1].parameters, 300032);
  EXPECT_EQ(s[2].parameters, 201728);
  EXPECT_EQ(s[3].bytes, 100864);
  const double mb[] = {2.79, 1.20, 0.81, 0.10};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(s[i].megabytes(), mb[i], 0.005) << s[i].name;
  }
  EXPECT_EQ(size_bytes(3, 4), 2);
  EXPECT_THROW(size_bytes(1, 0), Error);
}

TEST(Sparsity, InputBitsAndTaps) {
  SpikeTrace tr;
  tr.rnn_dim = 8;
  tr.input_dim = 4;
  tr.time_steps = 2;
  FrameTrace f;
  f.utterance_start = true;
  f.input.assign(4, 0x55);
  SpikeVector half(8);
  for (int i = 0; i < 8; i += 2) half.set(i, true);
  for (auto& l : f.spikes) l = {half, SpikeVector(8)};
  tr.frames = {f, f};
  tr.frames[1].utterance_start = false;
  const auto r = sparsity_from_trace(tr);
  EXPECT_DOUBLE_EQ(r.input_bit_zero_fraction, 0.5);
  EXPECT_DOUBLE_EQ(r.tap("L1T1F"), 0.5);
  EXPECT_DOUBLE_EQ(r.tap("L1T2F"), 1.0);
  // Recurrent taps see zeros for frame 0 and the stored spikes for frame 1.
  EXPECT_DOUBLE_EQ(r.tap("L0T1R"), 0.75);
  EXPECT_THROW(r.tap("bogus"), Error);
}

TEST(Sparsity, AllZeroTrace) {
  SpikeTrace tr;
  tr.rnn_dim = 16;
  tr.input_dim = 4;
  tr.time_steps = 1;
  FrameTrace f;
  f.utterance_start = true;
  f.input.assign(4, 0);
  for (auto& l : f.spikes) l = {SpikeVector(16)};
  tr.frames = {f};
  const auto r = sparsity_from_trace(tr);
  EXPECT_DOUBLE_EQ(r.input_bit_zero_fraction, 1.0);
  for (const auto& e : r.taps) EXPECT_DOUBLE_EQ(e.zero_fraction, 1.0) << e.tap;
}

TEST(Sparsity, EmptyTraceRejected) {
  try {
    sparsity_from_trace(SpikeTrace{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_trace);
  }
}

TEST(CrossCheck, AgreesWithSimulator) {
  for (uint64_t seed : {4, 5}) {
    const Model m = gen_random_model(seed, build_pruned_config(), 0.35).model;
    const auto frames = random_features(seed, 8, 40);
    for (int ts : {1, 2}) {
      for (bool skip : {false, true}) {
        for (bool merge : {false, true}) {
          accel::Accelerator a(m, accel::SimOptions{skip, merge, ts});
          SpikeTrace tr{128, 40, ts, {}};
          for (std::size_t f = 0; f < frames.size(); ++f) {
            FrameTrace ft;
            a.run_frame(frames[f], &ft);
            tr.frames.push_back(ft);
          }
          const auto res = cross_check(a.stats(), m.config, tr);
          EXPECT_TRUE(res.ok()) << res.describe();
        }
      }
    }
  }
}

TEST(CrossCheck, CorruptedStatsNameTheLayer) {
  const Model m = gen_random_model(6, build_pruned_config(), 0.35).model;
  accel::Accelerator a(m, accel::SimOptions{});
  SpikeTrace tr{128, 40, 2, {}};
  for (const auto& f : random_features(6, 4, 40)) {
    FrameTrace ft;
    a.run_frame(f, &ft);
    tr.frames.push_back(ft);
  }
  auto st = a.stats();
  st.layer(LayerId::l1_feedforward).word_reads += 1;
  const auto res = cross_check(st, m.config, tr);
  ASSERT_FALSE(res.ok());
  EXPECT_NE(res.describe().find("l1_feedforward.word_reads"), std::string::npos);
}

TEST(Formatting, MacTableShowsRate) {
  const auto base = build_baseline_config();
  const auto text = format_mac_table({count_macs(base, 2, MacRule::dense)}, base);
  EXPECT_NE(text.find("145.82"), std::string::npos);
}
