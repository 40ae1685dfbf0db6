#include "rsnn/fixtures.hpp"

#include <cmath>
#include <random>

#include "rsnn/error.hpp"
#include "rsnn/golden.hpp"

namespace rsnn {

namespace {

constexpr std::array<double, 8> kKeepGrid = {1.0, 0.75, 0.5, 0.375, 0.25, 0.1875, 0.125, 0.0625};
constexpr int kMaxCalibratedThresholdLog2 = 10;
constexpr double kGoodEnough = 0.02;
constexpr uint64_t kCalibrationStream = 0x9e3779b97f4a7c15ULL;

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Draw {
  std::vector<int8_t> codes;
  std::vector<double> keep_key;  // element survives when keep_key < keep fraction
};

Draw draw_layer(std::mt19937_64& rng, int64_t n, bool masked) {
  Draw d;
  d.codes.resize(static_cast<std::size_t>(n));
  for (auto& c : d.codes) c = static_cast<int8_t>(static_cast<int>(rng() >> 60) - 8);
  if (masked) {
    d.keep_key.resize(static_cast<std::size_t>(n));
    for (auto& k : d.keep_key) k = unit(rng);
  }
  return d;
}

QuantizedMatrix masked_matrix(const Draw& d, const LayerShape& shape, double keep, int scale) {
  QuantizedMatrix m(shape.rows, shape.cols, scale);
  for (int64_t k = 0; k < shape.elements(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    const bool kept = d.keep_key.empty() || d.keep_key[i] < keep;
    m.set_flat(k, kept ? d.codes[i] : 0);
  }
  return m;
}

// Rate at time step 1 of a layer driven by per-frame feedforward stimulus,
// carrying its own ts-1 spikes from frame to frame.
double ts1_rate(const std::vector<golden::AccVector>& ff, const QuantizedMatrix& w_rec,
                const LifParams& lif, std::vector<SpikeVector>* spikes_out) {
  const int dim = w_rec.cols();
  SpikeVector h(dim);
  int64_t fired = 0;
  if (spikes_out) spikes_out->clear();
  for (const auto& stim : ff) {
    golden::LayerMembrane mem(dim);
    h = golden::recurrent_layer_step(stim, h, w_rec, mem, lif);
    fired += h.count();
    if (spikes_out) spikes_out->push_back(h);
  }
  return static_cast<double>(fired) / (static_cast<double>(ff.size()) * dim);
}

struct LayerChoice {
  double keep = 1.0;
  int v_th_log2 = 0;
  double rate = 0.0;
  double error = 1e9;
};

// Thresholds are tried from high to low so the calibrated layer keeps real
// membrane dynamics; with v_th = 1 the second time step just repeats the first.
template <typename MakeFeedforward>
LayerChoice calibrate_layer(const Draw& ff_draw, const Draw& rec_draw, LayerShape ff_shape,
                            LayerShape rec_shape, int beta_shift, double hint,
                            MakeFeedforward make_ff) {
  std::array<std::vector<golden::AccVector>, kKeepGrid.size()> ff;
  std::array<QuantizedMatrix, kKeepGrid.size()> w_rec;
  LayerChoice best;
  for (int log2 = kMaxCalibratedThresholdLog2; log2 >= 0; --log2) {
    for (std::size_t k = 0; k < kKeepGrid.size(); ++k) {
      const double keep = kKeepGrid[k];
      if (ff[k].empty()) {
        ff[k] = make_ff(masked_matrix(ff_draw, ff_shape, keep, 0));
        w_rec[k] = masked_matrix(rec_draw, rec_shape, keep, 0);
      }
      const double rate = ts1_rate(ff[k], w_rec[k], LifParams::from_log2(beta_shift, log2), nullptr);
      const double err = std::abs(rate - hint);
      if (err < best.error) best = {keep, log2, rate, err};
      if (best.error <= kGoodEnough) return best;
    }
  }
  return best;
}

}  // namespace

GeneratedModel gen_random_model(uint64_t seed, const ModelConfig& config,
                                double spike_density_hint) {
  config.validate();
  if (!(spike_density_hint > 0.0 && spike_density_hint < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "spike density hint must be in (0, 1)");
  }

  std::mt19937_64 rng(seed);
  std::array<Draw, kNumLayers> draws;
  for (LayerId id : kAllLayers) {
    draws[index_of(id)] = draw_layer(rng, config.layer_shape(id).elements(), id != LayerId::fc);
  }
  std::array<int, 2> beta{};
  for (auto& b : beta) b = 1 + static_cast<int>(rng() % 3);

  const auto frames = random_features(seed ^ kCalibrationStream, kCalibrationFrames, config.input_dim);
  const auto shape = [&](LayerId id) { return config.layer_shape(id); };

  const LayerChoice l0 = calibrate_layer(
      draws[index_of(LayerId::l0_input)], draws[index_of(LayerId::l0_recurrent)],
      shape(LayerId::l0_input), shape(LayerId::l0_recurrent), beta[0], spike_density_hint,
      [&](const QuantizedMatrix& w_x) {
        std::vector<golden::AccVector> ff;
        for (const auto& f : frames) ff.push_back(golden::input_stimulus(f, w_x));
        return ff;
      });

  const LifParams lif0 = LifParams::from_log2(beta[0], l0.v_th_log2);
  std::vector<SpikeVector> h0;
  ts1_rate(
      [&] {
        std::vector<golden::AccVector> ff;
        const auto w_x = masked_matrix(draws[index_of(LayerId::l0_input)],
                                       shape(LayerId::l0_input), l0.keep, 0);
        for (const auto& f : frames) ff.push_back(golden::input_stimulus(f, w_x));
        return ff;
      }(),
      masked_matrix(draws[index_of(LayerId::l0_recurrent)], shape(LayerId::l0_recurrent),
                    l0.keep, 0),
      lif0, &h0);

  const LayerChoice l1 = calibrate_layer(
      draws[index_of(LayerId::l1_feedforward)], draws[index_of(LayerId::l1_recurrent)],
      shape(LayerId::l1_feedforward), shape(LayerId::l1_recurrent), beta[1], spike_density_hint,
      [&](const QuantizedMatrix& w_ff) {
        std::vector<golden::AccVector> ff;
        for (const auto& h : h0) ff.push_back(golden::spike_product(h, w_ff));
        return ff;
      });

  for (const auto* c : {&l0, &l1}) {
    if (c->error > kCalibrationTolerance) {
      throw Error(ErrorCode::calibration,
                  "cannot reach spike density " + std::to_string(spike_density_hint) +
                      " (closest " + std::to_string(c->rate) + ")");
    }
  }

  GeneratedModel out;
  Model& m = out.model;
  m.config = config;
  m.config.lif = {lif0, LifParams::from_log2(beta[1], l1.v_th_log2)};
  m.config.weight_scale_shift.fill(3);
  const std::array<double, kNumLayers> keep = {l0.keep, l0.keep, l1.keep, l1.keep, 1.0};
  for (LayerId id : kAllLayers) {
    const auto l = index_of(id);
    m.weights[l] = masked_matrix(draws[l], shape(id), keep[l], m.config.weight_scale_shift[l]);
  }
  out.calibration.ts1_rate = {l0.rate, l1.rate};
  out.calibration.keep_fraction = {l0.keep, l1.keep};
  return out;
}

std::vector<FeatureFrame> random_features(uint64_t seed, int frames, int input_dim) {
  std::mt19937_64 rng(seed);
  std::vector<FeatureFrame> out(static_cast<std::size_t>(frames));
  for (auto& f : out) {
    f.values.resize(static_cast<std::size_t>(input_dim));
    for (auto& v : f.values) v = static_cast<uint8_t>(rng() >> 56);
  }
  return out;
}

std::vector<FeatureFrame> random_features_bits(uint64_t seed, int frames, int input_dim,
                                               double bit_density) {
  std::mt19937_64 rng(seed);
  std::vector<FeatureFrame> out(static_cast<std::size_t>(frames));
  for (auto& f : out) {
    f.values.resize(static_cast<std::size_t>(input_dim));
    for (auto& v : f.values) {
      v = 0;
      for (int b = 0; b < 8; ++b) {
        if (unit(rng) < bit_density) v |= static_cast<uint8_t>(1u << b);
      }
    }
  }
  return out;
}

std::vector<FeatureFrame> constant_features(int frames, int input_dim, uint8_t value) {
  return std::vector<FeatureFrame>(
      static_cast<std::size_t>(frames),
      FeatureFrame{std::vector<uint8_t>(static_cast<std::size_t>(input_dim), value)});
}

RealWeights random_real_weights(uint64_t seed, const ModelConfig& config) {
  std::mt19937_64 rng(seed);
  RealWeights w;
  for (LayerId id : kAllLayers) {
    const auto shape = config.layer_shape(id);
    RealMatrix m(shape.rows, shape.cols);
    for (auto& v : m.values) v = 2.0 * unit(rng) - 1.0;
    w[index_of(id)] = std::move(m);
  }
  return w;
}

}  // namespace rsnn
