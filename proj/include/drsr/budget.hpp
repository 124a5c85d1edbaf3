#pragma once

#include <cstdint>

namespace drsr {

// Global fitness-evaluation budget. Every evaluation of a tree against the
// full dataset consumes exactly one unit; work units are only started when
// they fit, so `used` never exceeds `limit`.
struct EvalBudget {
    std::uint64_t limit = UINT64_MAX;
    std::uint64_t used = 0;

    bool can(std::uint64_t k) const { return used + k <= limit; }
    void consume(std::uint64_t k = 1) { used += k; }
};

} // namespace drsr
