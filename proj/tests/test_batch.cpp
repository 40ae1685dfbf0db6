#include <gtest/gtest.h>

#include "rsnn/batch.hpp"
#include "rsnn/fixtures.hpp"

using namespace rsnn;

TEST(Batch, SplitUtterances) {
  using R = std::vector<std::pair<std::size_t, std::size_t>>;
  EXPECT_EQ(split_utterances(10, 4), (R{{0, 4}, {4, 8}, {8, 10}}));
  EXPECT_EQ(split_utterances(10, 0), (R{{0, 10}}));
  EXPECT_EQ(split_utterances(0, 4), R{});
}

TEST(Batch, ParallelMatchesSerial) {
  const Model m = gen_random_model(40, build_pruned_config(), 0.35).model;
  const auto frames = random_features(41, 37, 40);
  for (Engine e : {Engine::golden, Engine::sim}) {
    for (int ts : {1, 2}) {
      const accel::SimOptions opt{true, true, ts};
      const auto serial = run_batch_serial(m, frames, 8, e, opt);
      for (int jobs : {1, 2, 4}) {
        EXPECT_EQ(run_batch_parallel(m, frames, 8, e, opt, jobs), serial);
      }
    }
  }
}

TEST(Batch, EnginesAgree) {
  const Model m = gen_random_model(42, build_pruned_config(), 0.35).model;
  const auto frames = random_features(43, 20, 40);
  const accel::SimOptions opt{};
  const auto g = run_batch_serial(m, frames, 5, Engine::golden, opt);
  const auto s = run_batch_serial(m, frames, 5, Engine::sim, opt);
  EXPECT_EQ(g.outputs, s.outputs);
  EXPECT_EQ(g.trace, s.trace);
  EXPECT_EQ(s.stats.frames, 20);
  int starts = 0;
  for (const auto& f : s.trace.frames) starts += f.utterance_start;
  EXPECT_EQ(starts, 4);
}
