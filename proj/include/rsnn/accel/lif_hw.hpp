#pragma once

#include <cstdint>

#include "rsnn/model.hpp"

namespace rsnn::accel {

struct LifHwOut {
  int32_t membrane = 0;
  bool spike = false;
};

// Datapath of one LIF unit: beta shifter on the membrane register, gate by the
// spike register, saturating adder, threshold comparator, reset multiplexer.
// The comparator exploits the power-of-two threshold: U >= 2^k iff U is
// non-negative and has a set bit at position k or above.
LifHwOut lif_hw(int32_t stimulus, int32_t membrane_reg, bool spike_reg, const LifParams& params);

}  // namespace rsnn::accel
