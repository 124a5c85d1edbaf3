#pragma once

#include <optional>
#include <vector>

#include "drsr/archive.hpp"

namespace drsr {

// Descriptor-box filter for expert-guided archive inspection.
struct QueryFilter {
    int rep_lo = 1;
    int rep_hi = 20;
    int trans_lo = 0;
    int trans_hi = 4;
    std::optional<std::vector<int>> clusters; // empty optional: all clusters
    int top_k = 6;
};

// Records inside the box, sorted by fitness descending with ties broken by
// fewer nodes and then by expression text, truncated to top_k.
std::vector<ArchiveRecord> query_records(std::vector<ArchiveRecord> records,
                                         const QueryFilter& filter);

} // namespace drsr
