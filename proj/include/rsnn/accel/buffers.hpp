#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "rsnn/model.hpp"

namespace rsnn::accel {

inline constexpr int kLanes = 128;  // PEs per set, weights per word
inline constexpr int kSets = 2;
inline constexpr std::size_t kWordBytes = kLanes / 2;

inline constexpr int kInputBufWords = 48;
inline constexpr int kRecBufWords = 192;
inline constexpr int kFcBufWords = 960;
inline constexpr int kInputEntries = 48;  // 8-bit in-buffer depth

enum class BufferId : uint8_t { input, rec0, rec1, fc0, fc1 };
inline constexpr std::size_t kNumBuffers = 5;

std::string_view buffer_name(BufferId id) noexcept;
int buffer_words(BufferId id) noexcept;
int64_t total_capacity_bytes() noexcept;

// 512-bit word: lane k in nibble k, low nibble first.
using WeightWord = std::array<uint8_t, kWordBytes>;
using WordLanes = std::array<int8_t, kLanes>;

WordLanes unpack_word(const WeightWord& w) noexcept;
WeightWord pack_word(const WordLanes& lanes);

struct WordAddress {
  BufferId buffer = BufferId::input;
  int word = 0;
};

// Where each layer's words live.
//   L0-input:  input buffer, word i.
//   recurrent: flat index offset + i across rec0|rec1, offsets 0, rnn_dim,
//              2*rnn_dim for L0-recurrent, L1-feedforward, L1-recurrent.
//   FC:        flat index g*rnn_dim + i across fc0|fc1.
// Word (layer, i, g) holds W[i][g*128 .. g*128+127]; lanes past the matrix
// width are zero.
WordAddress word_address(const ModelConfig& config, LayerId layer, int input, int group);

class WeightBuffers {
 public:
  // Throws capacity (naming the buffer) or unsupported_shape.
  static WeightBuffers load(const Model& model);

  const WeightWord& word(WordAddress a) const;
  // Decoded copy of the same word, kept so the simulator does not unpack on
  // every event.
  const WordLanes& lanes(WordAddress a) const;

  const WeightWord& word(LayerId layer, int input, int group = 0) const {
    return word(word_address(config_, layer, input, group));
  }
  const WordLanes& lanes(LayerId layer, int input, int group = 0) const {
    return lanes(word_address(config_, layer, input, group));
  }

  int words_used(BufferId id) const { return used_[static_cast<std::size_t>(id)]; }
  int words_used() const;
  int64_t bytes_used() const { return int64_t{words_used()} * static_cast<int64_t>(kWordBytes); }
  const ModelConfig& config() const { return config_; }

 private:
  ModelConfig config_;
  std::array<std::vector<WeightWord>, kNumBuffers> words_;
  std::array<std::vector<WordLanes>, kNumBuffers> lanes_;
  std::array<int, kNumBuffers> used_{};
};

// Shape checks load() applies, exposed for callers that only have a config.
void check_fits(const ModelConfig& config);

}  // namespace rsnn::accel
