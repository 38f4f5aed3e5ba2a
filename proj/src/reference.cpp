#include "diskmc/reference.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "diskmc/diagnostics.hpp"

namespace diskmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pick(Direction dir, double a, double b) {
    return dir == Direction::Max ? std::max(a, b) : std::min(a, b);
}

double worst(Direction dir) {
    return dir == Direction::Max ? -kInf : kInf;
}

} // namespace

InMemoryMdp build_in_memory(const TypedModel& model, const Expr& target, uint32_t max_states) {
    InMemoryMdp mdp;
    IndexedStateSet seen(model.width());
    seen.add(initial_state(model));
    for (uint32_t s = 0; s < seen.size(); ++s) {
        if (seen.size() > max_states)
            throw ModelError("state space exceeds " + std::to_string(max_states) + " states");
        ExplicitState state(seen.state(s).begin(), seen.state(s).end());
        auto expanded = enabled_transitions(model, state);
        StateEntry entry;
        entry.first_transition = static_cast<uint32_t>(mdp.transitions.size());
        entry.transition_count = static_cast<uint32_t>(expanded.size());
        entry.is_target = state_satisfies(target, state) ? 1 : 0;
        for (const ExpandedTransition& tr : expanded) {
            TransitionEntry te;
            te.first_branch = static_cast<uint32_t>(mdp.branches.size());
            te.branch_count = static_cast<uint32_t>(tr.branches.size());
            for (const ExpandedBranch& br : tr.branches) {
                BranchEntry be;
                be.probability = br.probability;
                be.reward = br.reward;
                be.partition = 1;
                be.index = static_cast<int32_t>(seen.add(br.target).first);
                mdp.branches.push_back(be);
            }
            mdp.transitions.push_back(te);
        }
        mdp.state_entries.push_back(entry);
        mdp.states.push_back(std::move(state));
    }
    return mdp;
}

std::vector<double> value_iteration_reference(const InMemoryMdp& mdp, Direction dir,
                                              const ConvergenceConfig& cfg) {
    uint32_t n = mdp.state_count();
    // Precomputed certainty sets; iteration only works the strictly interior
    // states, so values that are exactly 0 or 1 come out exact.
    std::vector<char> ones = prob1_in_memory(mdp, dir);
    std::vector<char> zeros = prob0_in_memory(mdp, dir);
    std::vector<double> values(n);
    for (uint32_t s = 0; s < n; ++s)
        values[s] = mdp.is_target(s) || ones[s] ? 1.0 : 0.0;
    uint64_t sweeps = 0;
    double error;
    do {
        error = 0.0;
        for (uint32_t s = 0; s < n; ++s) {
            const StateEntry& se = mdp.state_entries[s];
            if (se.is_target || se.transition_count == 0 || ones[s] || zeros[s])
                continue;
            double v = worst(dir);
            for (uint32_t t = 0; t < se.transition_count; ++t) {
                const TransitionEntry& te = mdp.transitions[se.first_transition + t];
                double sum = 0.0;
                for (uint32_t b = 0; b < te.branch_count; ++b) {
                    const BranchEntry& be = mdp.branches[te.first_branch + b];
                    sum += be.probability * values[be.index];
                }
                v = pick(dir, v, sum);
            }
            double old = values[s];
            if (cfg.check_monotonic && v < old)
                throw InternalCheckError("value iteration not monotone at state " +
                                         std::to_string(s) + ": " + std::to_string(old) +
                                         " -> " + std::to_string(v));
            if (v > 0.0)
                error = std::max(error, std::abs(v - old) / std::max(old, v));
            values[s] = v;
        }
        ++sweeps;
        if (cfg.sweep_observer)
            cfg.sweep_observer(1, values);
        if (error >= cfg.epsilon && sweeps >= cfg.max_outer_iterations)
            throw ConvergenceError("no convergence after " + std::to_string(sweeps) + " sweeps");
    } while (error >= cfg.epsilon);
    return values;
}

namespace {

// One forward pass of a monotone set operation; returns true if the set grew
// or shrank. keep/grow decide membership from the current set.
template <typename Fn>
bool sweep_set(const InMemoryMdp& mdp, std::vector<char>& set, Fn update) {
    bool changed = false;
    for (uint32_t s = 0; s < mdp.state_count(); ++s) {
        char next = update(s, set);
        if (next != set[s]) {
            set[s] = next;
            changed = true;
        }
    }
    return changed;
}

bool some_branch_in(const InMemoryMdp& mdp, const TransitionEntry& te,
                    const std::vector<char>& set) {
    for (uint32_t b = 0; b < te.branch_count; ++b)
        if (set[mdp.branches[te.first_branch + b].index])
            return true;
    return false;
}

bool all_branches_in(const InMemoryMdp& mdp, const TransitionEntry& te,
                     const std::vector<char>& set) {
    for (uint32_t b = 0; b < te.branch_count; ++b)
        if (!set[mdp.branches[te.first_branch + b].index])
            return false;
    return true;
}

} // namespace

std::vector<char> prob0_in_memory(const InMemoryMdp& mdp, Direction dir) {
    uint32_t n = mdp.state_count();
    if (dir == Direction::Max) {
        // Least fixpoint of "target or some branch reaches the set"; the
        // complement cannot reach the target under any scheduler.
        std::vector<char> reach(n, 0);
        while (sweep_set(mdp, reach, [&](uint32_t s, const std::vector<char>& cur) -> char {
            if (cur[s])
                return 1;
            const StateEntry& se = mdp.state_entries[s];
            if (se.is_target)
                return 1;
            for (uint32_t t = 0; t < se.transition_count; ++t)
                if (some_branch_in(mdp, mdp.transitions[se.first_transition + t], cur))
                    return 1;
            return 0;
        })) {
        }
        for (char& c : reach)
            c = !c;
        return reach;
    }
    // Greatest fixpoint: non-target states with a transition staying inside
    // the set (or no transition at all) can avoid the target forever.
    std::vector<char> avoid(n, 0);
    for (uint32_t s = 0; s < n; ++s)
        avoid[s] = mdp.is_target(s) ? 0 : 1;
    while (sweep_set(mdp, avoid, [&](uint32_t s, const std::vector<char>& cur) -> char {
        if (!cur[s])
            return 0;
        const StateEntry& se = mdp.state_entries[s];
        if (se.transition_count == 0)
            return 1;
        for (uint32_t t = 0; t < se.transition_count; ++t)
            if (all_branches_in(mdp, mdp.transitions[se.first_transition + t], cur))
                return 1;
        return 0;
    })) {
    }
    return avoid;
}

std::vector<char> prob1_in_memory(const InMemoryMdp& mdp, Direction dir) {
    uint32_t n = mdp.state_count();
    if (dir == Direction::Min) {
        // Grow from prob0-min: any state that can step into the grown set
        // with positive probability misses the target under some scheduler.
        std::vector<char> below = prob0_in_memory(mdp, Direction::Min);
        while (sweep_set(mdp, below, [&](uint32_t s, const std::vector<char>& cur) -> char {
            if (cur[s])
                return 1;
            const StateEntry& se = mdp.state_entries[s];
            if (se.is_target)
                return 0;
            for (uint32_t t = 0; t < se.transition_count; ++t)
                if (some_branch_in(mdp, mdp.transitions[se.first_transition + t], cur))
                    return 1;
            return 0;
        })) {
        }
        for (char& c : below)
            c = !c;
        return below;
    }
    // Greatest fixpoint over Y of a least fixpoint over X: a transition must
    // keep all mass in Y while moving some of it toward X.
    std::vector<char> outer(n, 1);
    for (;;) {
        std::vector<char> inner(n, 0);
        while (sweep_set(mdp, inner, [&](uint32_t s, const std::vector<char>& cur) -> char {
            if (cur[s])
                return 1;
            const StateEntry& se = mdp.state_entries[s];
            if (se.is_target)
                return 1;
            for (uint32_t t = 0; t < se.transition_count; ++t) {
                const TransitionEntry& te = mdp.transitions[se.first_transition + t];
                if (all_branches_in(mdp, te, outer) && some_branch_in(mdp, te, cur))
                    return 1;
            }
            return 0;
        })) {
        }
        if (inner == outer)
            return outer;
        outer = std::move(inner);
    }
}

std::vector<double> expected_reward_reference(const InMemoryMdp& mdp, Direction dir,
                                              const ConvergenceConfig& cfg) {
    uint32_t n = mdp.state_count();
    // The reward demands the target almost surely, against the adversarial
    // direction of the optimization.
    std::vector<char> certain = prob1_in_memory(mdp, dir == Direction::Max ? Direction::Min
                                                                           : Direction::Max);
    std::vector<double> values(n);
    for (uint32_t s = 0; s < n; ++s)
        values[s] = mdp.is_target(s) ? 0.0 : (certain[s] ? 0.0 : kInf);
    uint64_t sweeps = 0;
    double error;
    do {
        error = 0.0;
        for (uint32_t s = 0; s < n; ++s) {
            const StateEntry& se = mdp.state_entries[s];
            if (se.is_target || !certain[s] || se.transition_count == 0)
                continue;
            double v = worst(dir);
            for (uint32_t t = 0; t < se.transition_count; ++t) {
                const TransitionEntry& te = mdp.transitions[se.first_transition + t];
                double sum = 0.0;
                for (uint32_t b = 0; b < te.branch_count; ++b) {
                    const BranchEntry& be = mdp.branches[te.first_branch + b];
                    sum += be.probability * (be.reward + values[be.index]);
                }
                v = pick(dir, v, sum);
            }
            double old = values[s];
            if (cfg.check_monotonic && v < old)
                throw InternalCheckError("reward iteration not monotone at state " +
                                         std::to_string(s) + ": " + std::to_string(old) +
                                         " -> " + std::to_string(v));
            if (v > 0.0)
                error = std::max(error, std::abs(v - old) / std::max(old, v));
            values[s] = v;
        }
        ++sweeps;
        if (cfg.sweep_observer)
            cfg.sweep_observer(1, values);
        if (error >= cfg.epsilon && sweeps >= cfg.max_outer_iterations)
            throw ConvergenceError("no convergence after " + std::to_string(sweeps) + " sweeps");
    } while (error >= cfg.epsilon);
    return values;
}

} // namespace diskmc
