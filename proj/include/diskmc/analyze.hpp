#pragma once

#include <cstdint>
#include <vector>

#include "diskmc/explore.hpp"
#include "diskmc/files.hpp"
#include "diskmc/model.hpp"
#include "diskmc/reference.hpp"

namespace diskmc {

struct AnalysisReport {
    double value = 0.0;            // +infinity for an unreachable reward target
    uint32_t outer_iterations = 0; // outer passes that still observed error >= epsilon
    uint64_t inner_sweeps = 0;     // total sweeps over any partition
    double seconds = 0.0;
};

// One bit per state, grouped by partition; index 0 holds partition 1. This is
// the only per-state structure the analyzer keeps for the whole state space.
using BitVectorPartitioned = std::vector<std::vector<char>>;

// States whose reachability probability is exactly 0 resp. 1 under the
// optimizing direction, computed block-iteratively over the matrix files.
BitVectorPartitioned prob0_partitioned(Workdir& wd, const WorkdirMeta& meta, Direction dir);
BitVectorPartitioned prob1_partitioned(Workdir& wd, const WorkdirMeta& meta, Direction dir);

// Block value iteration for reachability probabilities over an explored
// workdir. Initializes the values files from the matrices, then sweeps
// partitions in descending id order until no partition moves by epsilon.
AnalysisReport value_iteration_partitioned(Workdir& wd, const WorkdirMeta& meta, Direction dir,
                                           const ConvergenceConfig& cfg = {});

// Expected accumulated reward until the target. States that may miss the
// target (against the adversarial direction) are pinned to +infinity.
AnalysisReport expected_reward_partitioned(Workdir& wd, const WorkdirMeta& meta, Direction dir,
                                           const ConvergenceConfig& cfg = {});

struct CheckResult {
    ExplorationReport exploration;
    AnalysisReport analysis;
};

// Full pipeline: explore into wd, then run the analysis the property asks
// for. wd must be empty.
CheckResult check(const TypedModel& model, const PartitionDecl& partition,
                  const PropertyDecl& property, Workdir& wd, const ConvergenceConfig& cfg = {});

} // namespace diskmc
