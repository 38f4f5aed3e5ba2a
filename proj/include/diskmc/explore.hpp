#pragma once

#include <cstdint>
#include <vector>

#include "diskmc/files.hpp"
#include "diskmc/model.hpp"

namespace diskmc {

struct ExplorationReport {
    uint32_t partition_count = 0;
    uint64_t states_total = 0;
    std::vector<uint32_t> partition_states; // index 0 = partition 1
    uint32_t n_max = 0;                     // largest partition, in states
    uint32_t s_max = 0;                     // largest successor set
    uint64_t cross_edges = 0;               // cross-partition branch records
    uint64_t c_max = 0;                     // most queue appends into one partition
    uint32_t outer_iterations = 0;          // executed passes of the outer loop
    uint64_t peak_resident_states = 0;      // most explicit states held at once
    uint64_t matrix_bytes_raw = 0;          // final matrix bytes before compression
    uint64_t matrix_bytes_disk = 0;         // final matrix bytes on disk
    double seconds = 0.0;
};

// Builds the partitioned matrix files for the model's reachable state space
// in `wd`, partition by partition. The initial state must map to partition 1.
// On return every matrix is fully index-corrected, every queue is drained and
// the meta table is written.
ExplorationReport explore(const TypedModel& model, const PartitionDecl& partition,
                          const Expr& target, Workdir& wd);

} // namespace diskmc
