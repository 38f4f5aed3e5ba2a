#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "diskmc/isq.hpp"
#include "diskmc/model.hpp"
#include "diskmc/semantics.hpp"

namespace diskmc {

// Shared convergence knobs for the iterative engines. outer caps the
// outermost loop (sweeps for the in-memory engine, partition passes for the
// partitioned one); exceeding it raises ConvergenceError.
struct ConvergenceConfig {
    double epsilon = 1e-6;
    uint64_t max_outer_iterations = 1u << 20;
    bool check_monotonic = true;
    // Called after every completed sweep with the partition id (always 1 for
    // the in-memory engine) and the value vector as of that sweep.
    std::function<void(uint32_t partition, std::span<const double>)> sweep_observer;
};

// Whole-model MDP held in memory, the oracle the partitioned pipeline is
// checked against. Branch entries carry partition = 1 and index = global
// state index. State 0 is the initial state.
struct InMemoryMdp {
    std::vector<ExplicitState> states;
    std::vector<StateEntry> state_entries;
    std::vector<TransitionEntry> transitions;
    std::vector<BranchEntry> branches;

    uint32_t state_count() const { return static_cast<uint32_t>(state_entries.size()); }
    bool is_target(uint32_t s) const { return state_entries[s].is_target != 0; }
};

// Plain breadth-first exploration; throws ModelError if the reachable state
// space exceeds max_states.
InMemoryMdp build_in_memory(const TypedModel& model, const Expr& target,
                            uint32_t max_states = 1u << 22);

// Gauss-Seidel value iteration for min/max reachability probabilities over
// the whole state space. Returns the full value vector.
std::vector<double> value_iteration_reference(const InMemoryMdp& mdp, Direction dir,
                                              const ConvergenceConfig& cfg = {});

// States with reachability probability exactly 0 resp. 1 under the best
// (Max) or worst (Min) scheduler, via the classic graph fixpoints.
std::vector<char> prob0_in_memory(const InMemoryMdp& mdp, Direction dir);
std::vector<char> prob1_in_memory(const InMemoryMdp& mdp, Direction dir);

// Expected accumulated reward until the target. States that miss the target
// with positive probability under the optimizing scheduler get +infinity.
std::vector<double> expected_reward_reference(const InMemoryMdp& mdp, Direction dir,
                                              const ConvergenceConfig& cfg = {});

} // namespace diskmc
