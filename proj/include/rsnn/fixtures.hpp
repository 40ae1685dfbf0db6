#pragma once

// Deterministic random models and features for differential testing.

#include <array>
#include <cstdint>
#include <vector>

#include "rsnn/model.hpp"

namespace rsnn {

struct Calibration {
  std::array<double, 2> ts1_rate{};      // measured per recurrent layer
  std::array<double, 2> keep_fraction{};  // fraction of recurrent-path weights left nonzero
};

struct GeneratedModel {
  Model model;
  Calibration calibration;
};

inline constexpr int kCalibrationFrames = 64;
// Absolute tolerance on the measured time-step-1 spike rate.
inline constexpr double kCalibrationTolerance = 0.15;

// Weight codes are uniform over [-8, 7]. Each recurrent layer's threshold and
// the fraction of its incoming weights left nonzero are searched so the rate
// at time step 1 over kCalibrationFrames uniform random frames lands near the
// hint. FC weights stay dense.
GeneratedModel gen_random_model(uint64_t seed, const ModelConfig& config,
                                double spike_density_hint);

std::vector<FeatureFrame> random_features(uint64_t seed, int frames, int input_dim);
// Each bit set independently with the given probability.
std::vector<FeatureFrame> random_features_bits(uint64_t seed, int frames, int input_dim,
                                               double bit_density);
std::vector<FeatureFrame> constant_features(int frames, int input_dim, uint8_t value);

// Dense random real weights for a float baseline.
RealWeights random_real_weights(uint64_t seed, const ModelConfig& config);

}  // namespace rsnn
