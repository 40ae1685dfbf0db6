#include "rsnn/accel/zero_skip.hpp"

namespace rsnn::accel {

char mode_letter(ZeroSkipMode m) noexcept { return static_cast<char>('A' + static_cast<int>(m)); }

int EventStream::active_count() const {
  int n = 0;
  for (const auto& e : *this) n += e.active;
  return n;
}

NibbleStreams zskip_type_a(uint8_t byte, bool skip_enable) {
  NibbleStreams s;
  for (int b = 0; b < 8; ++b) {
    const bool bit = (byte >> b) & 1;
    if (!bit && skip_enable) continue;
    const SkipEvent e{static_cast<uint8_t>(b), static_cast<uint8_t>(b), bit};
    (b < 4 ? s.low : s.high).push(e);
  }
  return s;
}

EventStream zskip_type_b(uint8_t spikes, bool skip_enable) {
  EventStream s;
  for (int i = 0; i < 8; ++i) {
    const bool bit = (spikes >> i) & 1;
    if (bit || !skip_enable) s.push({static_cast<uint8_t>(i), 0, bit});
  }
  return s;
}

EventStream zskip_type_c(uint8_t spikes_a, uint8_t spikes_b, bool skip_enable) {
  const uint8_t any = spikes_a | spikes_b;
  const uint8_t both = spikes_a & spikes_b;
  EventStream s;
  for (int i = 0; i < 8; ++i) {
    const bool nz = (any >> i) & 1;
    if (nz || !skip_enable) {
      s.push({static_cast<uint8_t>(i), static_cast<uint8_t>((both >> i) & 1), nz});
    }
  }
  return s;
}

SkipEvent zskip_type_d(bool spike) { return {0, 0, spike}; }

bool mode_legal(ZeroSkipMode mode, LayerId layer, int time_steps, bool merge_enable) {
  const bool recurrent = layer == LayerId::l0_recurrent || layer == LayerId::l1_feedforward ||
                         layer == LayerId::l1_recurrent;
  switch (mode) {
    case ZeroSkipMode::A:
      return layer == LayerId::l0_input;
    case ZeroSkipMode::B:
      return (time_steps == 1 && (recurrent || layer == LayerId::fc)) ||
             (time_steps == 2 && layer == LayerId::fc && !merge_enable);
    case ZeroSkipMode::C:
      return time_steps == 2 && layer == LayerId::fc && merge_enable;
    case ZeroSkipMode::D:
      return time_steps == 2 && recurrent;
  }
  return false;
}

ZeroSkipMode default_mode(LayerId layer, int time_steps, bool merge_enable) {
  if (layer == LayerId::l0_input) return ZeroSkipMode::A;
  if (time_steps == 1) return ZeroSkipMode::B;
  if (layer == LayerId::fc) return merge_enable ? ZeroSkipMode::C : ZeroSkipMode::B;
  return ZeroSkipMode::D;
}

}  // namespace rsnn::accel
