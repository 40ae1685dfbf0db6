#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "rsnn/model.hpp"

namespace rsnn::accel {

enum class ZeroSkipMode : uint8_t { A, B, C, D };

char mode_letter(ZeroSkipMode m) noexcept;

// One slot of a zero-skip unit. An inactive event still costs its cycle and
// its weight fetch but accumulates nothing; it only appears with skipping off.
struct SkipEvent {
  uint8_t index = 0;  // bit or spike position within the 8-wide group
  uint8_t shift = 0;  // left shift applied to the fetched weight
  bool active = true;

  bool operator==(const SkipEvent&) const = default;
};

class EventStream {
 public:
  void push(SkipEvent e) { events_[size_++] = e; }
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const SkipEvent& operator[](int k) const { return events_[static_cast<std::size_t>(k)]; }
  const SkipEvent* begin() const { return events_.data(); }
  const SkipEvent* end() const { return events_.data() + size_; }
  int active_count() const;

 private:
  std::array<SkipEvent, 8> events_{};
  int size_ = 0;
};

struct NibbleStreams {
  EventStream low;   // set 0, shifts 0..3
  EventStream high;  // set 1, shifts 4..7
};

// Bit-serial input: each set bit of the byte becomes an event whose shift is
// its bit position.
NibbleStreams zskip_type_a(uint8_t byte, bool skip_enable = true);

// Single time step: nonzero spike positions in ascending order, shift 0.
EventStream zskip_type_b(uint8_t spikes, bool skip_enable = true);

// Merged spikes of two time steps: events where a|b, shift = a&b.
EventStream zskip_type_c(uint8_t spikes_a, uint8_t spikes_b, bool skip_enable = true);

// Two-time-step recurrent broadcast: one slot per position, never skipped.
SkipEvent zskip_type_d(bool spike);

// A: L0-input. B: single-ts recurrent or FC, and two-ts FC when merging is
// off. C: two-ts FC with merging. D: two-ts recurrent.
bool mode_legal(ZeroSkipMode mode, LayerId layer, int time_steps, bool merge_enable);
ZeroSkipMode default_mode(LayerId layer, int time_steps, bool merge_enable);

}  // namespace rsnn::accel
