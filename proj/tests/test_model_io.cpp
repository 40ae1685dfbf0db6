#include <gtest/gtest.h>

#include <sstream>

#include "rsnn/error.hpp"
#include "rsnn/fixtures.hpp"
#include "rsnn/golden.hpp"
#include "rsnn/model_io.hpp"
#include "rsnn/trace.hpp"

using namespace rsnn;

namespace {

ErrorCode decode_error(const std::vector<uint8_t>& bytes) {
  try {
    deserialize_model(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "stream decoded";
  return ErrorCode::io;
}

Model small_model(uint64_t seed) {
  ModelConfig c = build_pruned_config();
  c.rnn_dim = 16;
  c.input_dim = 8;
  c.fc_dim = 128;
  return gen_random_model(seed, c, 0.35).model;
}

}  // namespace

TEST(ModelFile, RoundTripIsIdentity) {
  for (uint64_t seed : {1, 2, 3}) {
    const Model m = small_model(seed);
    const auto bytes = serialize_model(m);
    const Model back = deserialize_model(bytes);
    EXPECT_EQ(back, m);
    EXPECT_EQ(serialize_model(back), bytes);
  }
}

TEST(ModelFile, HeaderLayout) {
  const Model m = small_model(4);
  const auto b = serialize_model(m);
  ASSERT_GE(b.size(), kModelHeaderBytes);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "RSNN");
  EXPECT_EQ(b[4] | b[5] << 8, 1);
  EXPECT_EQ(b[6] | b[7] << 8, 16);
  EXPECT_EQ(b[8] | b[9] << 8, 8);
  EXPECT_EQ(b[10] | b[11] << 8, 128);
  EXPECT_EQ(b[12], 2);
  EXPECT_EQ(b[18], m.config.lif[0].beta_shift);
  EXPECT_EQ(b[19], m.config.lif[0].v_th_log2());
  EXPECT_EQ(b.size(), kModelHeaderBytes + model_payload_bytes(m.config));
  // First payload byte: W_x[0][0] low nibble, W_x[0][1] high nibble.
  const auto& w = m.layer(LayerId::l0_input);
  EXPECT_EQ(b[kModelHeaderBytes], (to_nibble(w.at(0, 1)) << 4) | to_nibble(w.at(0, 0)));
}

TEST(ModelFile, PrunedPayloadSize) {
  // Dense packed payload of the pruned shape; the 4-bit FC sparsity is not
  // exploited by the file format.
  EXPECT_EQ(model_payload_bytes(build_pruned_config()), 150016u);
}

TEST(ModelFile, DistinctErrors) {
  const auto good = serialize_model(small_model(5));

  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(decode_error(bad_magic), ErrorCode::bad_magic);

  auto bad_version = good;
  bad_version[4] = 2;
  EXPECT_EQ(decode_error(bad_version), ErrorCode::version_mismatch);

  EXPECT_EQ(decode_error(std::vector<uint8_t>(good.begin(), good.begin() + 10)), ErrorCode::truncated);
  EXPECT_EQ(decode_error(std::vector<uint8_t>(good.begin(), good.end() - 1)), ErrorCode::truncated);

  auto longer = good;
  longer.push_back(0);
  EXPECT_EQ(decode_error(longer), ErrorCode::dim_mismatch);

  auto zero_dim = good;
  zero_dim[6] = 0;
  zero_dim[7] = 0;
  EXPECT_EQ(decode_error(zero_dim), ErrorCode::dim_mismatch);
}

TEST(FeatureFile, RoundTripAndErrors) {
  const auto frames = random_features(9, 5, 40);
  const auto bytes = serialize_features(frames, 40);
  EXPECT_EQ(bytes.size(), 12u + 5 * 40);
  const auto back = deserialize_features(bytes);
  ASSERT_EQ(back.size(), frames.size());
  for (std::size_t f = 0; f < back.size(); ++f) EXPECT_EQ(back[f].values, frames[f].values);

  auto cut = bytes;
  cut.pop_back();
  try {
    deserialize_features(cut);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::truncated);
  }
  auto wrong = bytes;
  wrong[0] = 'X';
  EXPECT_THROW(deserialize_features(wrong), Error);
}

TEST(LogitFile, RoundTripSignedValues) {
  std::vector<golden::FrameOutput> outs(2);
  outs[0].logits = {-2048, 0, 2047};
  outs[1].logits = {-1, 1, 5};
  const auto bytes = serialize_logits(outs, 3);
  const auto back = deserialize_logits(bytes);
  EXPECT_EQ(back.fc_dim, 3);
  EXPECT_EQ(back.frames, outs);
}

TEST(TraceText, RoundTrip) {
  const Model m = small_model(6);
  const auto frames = random_features(7, 4, m.config.input_dim);
  const auto run = golden::run_utterance(frames, m, 2);
  std::ostringstream out;
  write_trace(out, run.trace);
  std::istringstream in(out.str());
  EXPECT_EQ(read_trace(in), run.trace);
}

TEST(TraceText, HexBitOrder) {
  SpikeVector v(16);
  v.set(0, true);
  v.set(12, true);
  EXPECT_EQ(spikes_to_hex(v), "0110");
  EXPECT_EQ(spikes_from_hex("0110", 16), v);
  EXPECT_THROW(spikes_from_hex("01", 16), Error);
  EXPECT_THROW(spikes_from_hex("0g10", 16), Error);
}

TEST(TraceText, RejectsGarbage) {
  std::istringstream bad("not-a-trace 1 2 3\n");
  EXPECT_THROW(read_trace(bad), Error);
  std::istringstream bad_record("rsnn-trace 1 8 1 1 1\nQ 0 0\n");
  EXPECT_THROW(read_trace(bad_record), Error);
}
