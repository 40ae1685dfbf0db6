#include <gtest/gtest.h>

#include "property_suites.hpp"

using namespace rsnn::props;

namespace {

std::string first(const SuiteResult& r) { return r.failures.empty() ? "" : r.failures.front(); }

}  // namespace

TEST(ZeroSkipProperty, RandomStreamsMatchDense) {
  const auto r = zero_skip_random(11, 10000);
  EXPECT_EQ(r.cases, 30000);
  EXPECT_TRUE(r.ok()) << first(r);
}

TEST(ZeroSkipProperty, TypeAExhaustive) {
  const auto r = zero_skip_type_a_exhaustive(12);
  EXPECT_EQ(r.cases, 256);
  EXPECT_TRUE(r.ok()) << first(r);
}

TEST(ZeroSkipProperty, TypeCExhaustive) {
  const auto r = zero_skip_type_c_exhaustive(13);
  EXPECT_EQ(r.cases, 65536);
  EXPECT_TRUE(r.ok()) << first(r);
}

TEST(LifProperty, HardwareMatchesReference) {
  const auto r = lif_exhaustive();
  EXPECT_GT(r.cases, 12 * 4 * 4096);
  EXPECT_TRUE(r.ok()) << first(r);
}

TEST(MergedFcProperty, MatchesPerTimeStep) {
  const auto r = merged_fc(14, 1000);
  EXPECT_EQ(r.cases, 1000);
  EXPECT_TRUE(r.ok()) << first(r);
}
