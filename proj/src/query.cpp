#include "drsr/query.hpp"

#include <algorithm>

namespace drsr {

std::vector<ArchiveRecord> query_records(std::vector<ArchiveRecord> records,
                                         const QueryFilter& filter) {
    std::erase_if(records, [&](const ArchiveRecord& r) {
        if (r.rep_power < filter.rep_lo || r.rep_power > filter.rep_hi) return true;
        if (r.trans_count < filter.trans_lo || r.trans_count > filter.trans_hi) return true;
        if (filter.clusters &&
            std::find(filter.clusters->begin(), filter.clusters->end(), r.out_cluster) ==
                filter.clusters->end())
            return true;
        return false;
    });
    std::sort(records.begin(), records.end(), [](const ArchiveRecord& a, const ArchiveRecord& b) {
        if (a.fitness != b.fitness) return a.fitness > b.fitness;
        if (a.rep_power != b.rep_power) return a.rep_power < b.rep_power;
        return a.expr < b.expr;
    });
    if (records.size() > static_cast<std::size_t>(filter.top_k))
        records.resize(static_cast<std::size_t>(filter.top_k));
    return records;
}

} // namespace drsr
