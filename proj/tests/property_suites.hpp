#pragma once

// Randomized and exhaustive property checks shared by the unit tests and the
// acceptance binary. Each returns the number of cases checked and appends a
// description of the first few failures.

#include <cstdint>
#include <string>
#include <vector>

namespace rsnn::props {

struct SuiteResult {
  int64_t cases = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Event stream accumulated with random weights equals the dense dot product.
SuiteResult zero_skip_random(uint64_t seed, int cases);
SuiteResult zero_skip_type_a_exhaustive(uint64_t seed);
SuiteResult zero_skip_type_c_exhaustive(uint64_t seed);

// Hardware LIF against the reference over every 12-bit stimulus.
SuiteResult lif_exhaustive();

// Merged FC in the simulator against per-time-step FC and the reference.
SuiteResult merged_fc(uint64_t seed, int cases);

}  // namespace rsnn::props
