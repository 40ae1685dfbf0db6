#include "rsnn/accel/buffers.hpp"

#include <string>

#include "rsnn/error.hpp"

namespace rsnn::accel {

namespace {

constexpr std::array<int, kNumBuffers> kWords = {kInputBufWords, kRecBufWords, kRecBufWords,
                                                 kFcBufWords, kFcBufWords};
constexpr std::array<std::string_view, kNumBuffers> kNames = {"input_buf", "rec_buf0",
                                                              "rec_buf1", "fc_buf0", "fc_buf1"};

std::size_t idx(BufferId id) { return static_cast<std::size_t>(id); }

void capacity_error(const std::string& buffer, int64_t needed, int64_t have) {
  throw Error(ErrorCode::capacity, buffer + " needs " + std::to_string(needed) +
                                       " words but holds " + std::to_string(have));
}

}  // namespace

std::string_view buffer_name(BufferId id) noexcept { return kNames[idx(id)]; }
int buffer_words(BufferId id) noexcept { return kWords[idx(id)]; }

int64_t total_capacity_bytes() noexcept {
  int64_t words = 0;
  for (int w : kWords) words += w;
  return words * static_cast<int64_t>(kWordBytes);
}

WordLanes unpack_word(const WeightWord& w) noexcept {
  WordLanes out{};
  for (int k = 0; k < kLanes; ++k) {
    const uint8_t byte = w[static_cast<std::size_t>(k / 2)];
    out[static_cast<std::size_t>(k)] = from_nibble((k & 1) ? byte >> 4 : byte);
  }
  return out;
}

WeightWord pack_word(const WordLanes& lanes) {
  WeightWord w{};
  for (int k = 0; k < kLanes; ++k) {
    const int v = lanes[static_cast<std::size_t>(k)];
    if (v < -8 || v > 7) throw Error(ErrorCode::invalid_argument, "lane value outside 4-bit range");
    w[static_cast<std::size_t>(k / 2)] |= static_cast<uint8_t>(to_nibble(v) << ((k & 1) ? 4 : 0));
  }
  return w;
}

void check_fits(const ModelConfig& config) {
  config.validate();
  if (config.input_dim > kInputEntries) {
    throw Error(ErrorCode::capacity, "in-buffer holds " + std::to_string(kInputEntries) +
                                         " features, model has " + std::to_string(config.input_dim));
  }
  if (config.input_dim > kInputBufWords) {
    capacity_error("input_buf", config.input_dim, kInputBufWords);
  }
  if (config.rnn_dim > kLanes) {
    capacity_error("rec_buf", 3 * int64_t{config.rnn_dim}, 2 * kRecBufWords);
  }
  if (config.fc_dim % kLanes != 0) {
    throw Error(ErrorCode::unsupported_shape,
                "fc_dim " + std::to_string(config.fc_dim) + " is not a multiple of 128");
  }
  const int64_t fc_words = int64_t{config.fc_dim / kLanes} * config.rnn_dim;
  if (fc_words > 2 * kFcBufWords) capacity_error("fc_buf", fc_words, 2 * kFcBufWords);
}

WordAddress word_address(const ModelConfig& c, LayerId layer, int input, int group) {
  const int rows = c.layer_shape(layer).rows;
  if (input < 0 || input >= rows) throw Error(ErrorCode::invalid_argument, "word input index out of range");
  switch (layer) {
    case LayerId::l0_input:
      if (group != 0) break;
      return {BufferId::input, input};
    case LayerId::l0_recurrent:
    case LayerId::l1_feedforward:
    case LayerId::l1_recurrent: {
      if (group != 0) break;
      const int offset = (static_cast<int>(layer) - static_cast<int>(LayerId::l0_recurrent)) * c.rnn_dim;
      const int flat = offset + input;
      return {flat < kRecBufWords ? BufferId::rec0 : BufferId::rec1, flat % kRecBufWords};
    }
    case LayerId::fc: {
      if (group < 0 || group >= c.fc_dim / kLanes) break;
      const int flat = group * c.rnn_dim + input;
      return {flat < kFcBufWords ? BufferId::fc0 : BufferId::fc1, flat % kFcBufWords};
    }
  }
  throw Error(ErrorCode::invalid_argument, "word group index out of range");
}

WeightBuffers WeightBuffers::load(const Model& model) {
  model.validate();
  const auto& c = model.config;
  check_fits(c);

  WeightBuffers b;
  b.config_ = c;
  for (std::size_t k = 0; k < kNumBuffers; ++k) {
    b.words_[k].assign(static_cast<std::size_t>(kWords[k]), WeightWord{});
    b.lanes_[k].assign(static_cast<std::size_t>(kWords[k]), WordLanes{});
  }

  for (LayerId id : kAllLayers) {
    const auto& w = model.layer(id);
    const int groups = id == LayerId::fc ? c.fc_dim / kLanes : 1;
    for (int g = 0; g < groups; ++g) {
      for (int i = 0; i < w.rows(); ++i) {
        WordLanes lanes{};
        for (int k = 0; k < kLanes; ++k) {
          const int col = g * kLanes + k;
          if (col < w.cols()) lanes[static_cast<std::size_t>(k)] = w.at(i, col);
        }
        const WordAddress a = word_address(c, id, i, g);
        const auto bi = idx(a.buffer);
        const auto wi = static_cast<std::size_t>(a.word);
        b.words_[bi][wi] = pack_word(lanes);
        b.lanes_[bi][wi] = lanes;
        b.used_[bi] = std::max(b.used_[bi], a.word + 1);
      }
    }
  }
  return b;
}

const WeightWord& WeightBuffers::word(WordAddress a) const {
  return words_[idx(a.buffer)].at(static_cast<std::size_t>(a.word));
}

const WordLanes& WeightBuffers::lanes(WordAddress a) const {
  return lanes_[idx(a.buffer)].at(static_cast<std::size_t>(a.word));
}

int WeightBuffers::words_used() const {
  int n = 0;
  for (int u : used_) n += u;
  return n;
}

}  // namespace rsnn::accel
