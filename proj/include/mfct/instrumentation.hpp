#pragma once

#include <atomic>
#include <cstdint>

namespace mfct::instrument {

// Cheap call counters used by tests to prove that the baseline protocols
// never touch the grey election or the fog-tree merge path.
inline std::atomic<std::uint64_t> grey_rank_calls{0};
inline std::atomic<std::uint64_t> merge_calls{0};

inline void reset() {
    grey_rank_calls.store(0);
    merge_calls.store(0);
}

}  // namespace mfct::instrument
