#include "rsnn/accel/lif_hw.hpp"

#include <cassert>

#include "rsnn/fixed_point.hpp"

namespace rsnn::accel {

LifHwOut lif_hw(int32_t stimulus, int32_t membrane_reg, bool spike_reg, const LifParams& params) {
  assert(in_acc_range(stimulus) && in_acc_range(membrane_reg));
  const int32_t shifted = membrane_reg >> params.beta_shift;
  const int32_t gated = spike_reg ? 0 : shifted;
  const int32_t sum = sat12(int64_t{stimulus} + gated);

  const auto bits = static_cast<uint32_t>(sum) & ((1u << kAccBits) - 1);
  const bool negative = (bits >> (kAccBits - 1)) & 1;
  const bool fire = !negative && (bits >> params.v_th_log2()) != 0;
  return {fire ? 0 : sum, fire};
}

}  // namespace rsnn::accel
