#pragma once

// Binary file formats. All multi-byte integers are little-endian.
//
// Model:    "RSNN" | u16 version=1 | u16 rnn_dim | u16 input_dim | u16 fc_dim |
//           u8 time_steps | i8 scale_shift x5 | (u8 beta_shift, u8 v_th_log2) x2 |
//           weights in layer order, each row-major packed 4-bit, low nibble first.
// Features: "FEAT" | u16 version=1 | u16 input_dim | u32 n_frames | u8 rows.
// Logits:   "LOGT" | u16 version=1 | u16 fc_dim | u32 n_frames | i16 values.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rsnn/golden.hpp"
#include "rsnn/model.hpp"

namespace rsnn {

inline constexpr uint16_t kFormatVersion = 1;
inline constexpr std::size_t kModelHeaderBytes = 22;

std::vector<uint8_t> serialize_model(const Model& model);
Model deserialize_model(std::span<const uint8_t> bytes);

// Packed weight bytes a model of this shape carries.
std::size_t model_payload_bytes(const ModelConfig& config);

std::vector<uint8_t> serialize_features(std::span<const FeatureFrame> frames, int input_dim);
std::vector<FeatureFrame> deserialize_features(std::span<const uint8_t> bytes);

std::vector<uint8_t> serialize_logits(std::span<const golden::FrameOutput> outputs, int fc_dim);

struct LogitsFile {
  int fc_dim = 0;
  std::vector<golden::FrameOutput> frames;
};
LogitsFile deserialize_logits(std::span<const uint8_t> bytes);

std::vector<uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const uint8_t> bytes);

}  // namespace rsnn
