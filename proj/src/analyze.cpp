#include "diskmc/analyze.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "diskmc/diagnostics.hpp"
#include "diskmc/isq.hpp"

namespace diskmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pick(Direction dir, double a, double b) {
    return dir == Direction::Max ? std::max(a, b) : std::min(a, b);
}

double worst(Direction dir) {
    return dir == Direction::Max ? -kInf : kInf;
}

RandomAccessPartition load_matrix(Workdir& wd, uint32_t i) {
    return load_partition(wd.source(FileKind::Matrix, i));
}

// Streams the matrices once and hands every state's target flag to fn, in
// index order per partition.
template <typename Fn>
void for_each_state(Workdir& wd, const WorkdirMeta& meta, Fn fn) {
    for (uint32_t i = 1; i <= meta.count(); ++i) {
        IsqReader in(wd.source(FileKind::Matrix, i));
        uint32_t k = 0;
        while (auto rec = in.next())
            if (rec->kind == IsqRecord::Kind::StateEnd)
                fn(i, k++, rec->is_target);
        if (k != meta.partitions[i - 1].state_count)
            throw FormatError("partition " + std::to_string(i) + " matrix holds " +
                              std::to_string(k) + " states, meta says " +
                              std::to_string(meta.partitions[i - 1].state_count));
    }
}

BitVectorPartitioned sized_bits(const WorkdirMeta& meta, char fill) {
    BitVectorPartitioned bits(meta.count());
    for (uint32_t i = 0; i < meta.count(); ++i)
        bits[i].assign(meta.partitions[i].state_count, fill);
    return bits;
}

// Chaotic iteration of a monotone set operator: descending partition sweeps,
// each partition iterated locally until stable, repeated until a full pass
// changes nothing. update(i, rap, k, bits) returns the state's new bit.
template <typename Update>
void block_fixpoint(Workdir& wd, const WorkdirMeta& meta, BitVectorPartitioned& bits,
                    Update update) {
    bool changed;
    do {
        changed = false;
        for (uint32_t i = meta.count(); i >= 1; --i) {
            if (meta.partitions[i - 1].state_count == 0)
                continue;
            RandomAccessPartition rap = load_matrix(wd, i);
            bool local;
            do {
                local = false;
                for (uint32_t k = 0; k < rap.states.size(); ++k) {
                    char next = update(i, rap, k, bits);
                    if (next != bits[i - 1][k]) {
                        bits[i - 1][k] = next;
                        local = true;
                        changed = true;
                    }
                }
            } while (local);
        }
    } while (changed);
}

bool bit_at(const BitVectorPartitioned& bits, const BranchEntry& br) {
    return bits[static_cast<uint32_t>(br.partition) - 1][static_cast<uint32_t>(br.index)] != 0;
}

bool some_branch_in(const RandomAccessPartition& rap, const TransitionEntry& te,
                    const BitVectorPartitioned& bits) {
    for (uint32_t b = 0; b < te.branch_count; ++b)
        if (bit_at(bits, rap.branches[te.first_branch + b]))
            return true;
    return false;
}

bool all_branches_in(const RandomAccessPartition& rap, const TransitionEntry& te,
                     const BitVectorPartitioned& bits) {
    for (uint32_t b = 0; b < te.branch_count; ++b)
        if (!bit_at(bits, rap.branches[te.first_branch + b]))
            return false;
    return true;
}

} // namespace

BitVectorPartitioned prob0_partitioned(Workdir& wd, const WorkdirMeta& meta, Direction dir) {
    if (dir == Direction::Max) {
        // Complement of "some scheduler reaches the target".
        BitVectorPartitioned reach = sized_bits(meta, 0);
        block_fixpoint(wd, meta, reach,
                       [](uint32_t i, const RandomAccessPartition& rap, uint32_t k,
                          const BitVectorPartitioned& cur) -> char {
                           if (cur[i - 1][k])
                               return 1;
                           const StateEntry& se = rap.states[k];
                           if (se.is_target)
                               return 1;
                           for (uint32_t t = 0; t < se.transition_count; ++t)
                               if (some_branch_in(rap, rap.transitions[se.first_transition + t],
                                                  cur))
                                   return 1;
                           return 0;
                       });
        for (auto& block : reach)
            for (char& c : block)
                c = !c;
        return reach;
    }
    // Greatest set of non-target states that can avoid the target forever:
    // deadlock, or some transition keeps all mass inside the set.
    BitVectorPartitioned avoid = sized_bits(meta, 0);
    for_each_state(wd, meta,
                   [&](uint32_t i, uint32_t k, bool is_target) { avoid[i - 1][k] = !is_target; });
    block_fixpoint(wd, meta, avoid,
                   [](uint32_t i, const RandomAccessPartition& rap, uint32_t k,
                      const BitVectorPartitioned& cur) -> char {
                       if (!cur[i - 1][k])
                           return 0;
                       const StateEntry& se = rap.states[k];
                       if (se.transition_count == 0)
                           return 1;
                       for (uint32_t t = 0; t < se.transition_count; ++t)
                           if (all_branches_in(rap, rap.transitions[se.first_transition + t], cur))
                               return 1;
                       return 0;
                   });
    return avoid;
}

BitVectorPartitioned prob1_partitioned(Workdir& wd, const WorkdirMeta& meta, Direction dir) {
    if (dir == Direction::Min) {
        // Grow prob0-min by "some branch enters the set": from any of those
        // states some scheduler misses the target with positive probability.
        BitVectorPartitioned below = prob0_partitioned(wd, meta, Direction::Min);
        block_fixpoint(wd, meta, below,
                       [](uint32_t i, const RandomAccessPartition& rap, uint32_t k,
                          const BitVectorPartitioned& cur) -> char {
                           if (cur[i - 1][k])
                               return 1;
                           const StateEntry& se = rap.states[k];
                           if (se.is_target)
                               return 0;
                           for (uint32_t t = 0; t < se.transition_count; ++t)
                               if (some_branch_in(rap, rap.transitions[se.first_transition + t],
                                                  cur))
                                   return 1;
                           return 0;
                       });
        for (auto& block : below)
            for (char& c : block)
                c = !c;
        return below;
    }
    // Greatest fixpoint over Y of a least fixpoint over X: some transition
    // keeps all mass in Y while moving some of it toward X.
    BitVectorPartitioned outer = sized_bits(meta, 1);
    for (;;) {
        BitVectorPartitioned inner = sized_bits(meta, 0);
        block_fixpoint(wd, meta, inner,
                       [&outer](uint32_t i, const RandomAccessPartition& rap, uint32_t k,
                                const BitVectorPartitioned& cur) -> char {
                           if (cur[i - 1][k])
                               return 1;
                           const StateEntry& se = rap.states[k];
                           if (se.is_target)
                               return 1;
                           for (uint32_t t = 0; t < se.transition_count; ++t) {
                               const TransitionEntry& te = rap.transitions[se.first_transition + t];
                               if (all_branches_in(rap, te, outer) && some_branch_in(rap, te, cur))
                                   return 1;
                           }
                           return 0;
                       });
        if (inner == outer)
            return outer;
        outer = std::move(inner);
    }
}

namespace {

// Shared block value iteration. Probability mode pins the prob0/prob1 sets
// at their exact values, reward mode pins the states outside `certain` at
// +infinity; pinned states are never recomputed.
AnalysisReport run_block_vi(Workdir& wd, const WorkdirMeta& meta, Direction dir,
                            const ConvergenceConfig& cfg, bool rewards,
                            const BitVectorPartitioned* ones, const BitVectorPartitioned* zeros,
                            const BitVectorPartitioned* certain) {
    auto t0 = std::chrono::steady_clock::now();
    for (uint32_t i = 1; i <= meta.count(); ++i) {
        IsqReader in(wd.source(FileKind::Matrix, i));
        F64Writer out(wd.sink(FileKind::Values, i, OpenMode::Truncate));
        uint32_t k = 0;
        while (auto rec = in.next()) {
            if (rec->kind != IsqRecord::Kind::StateEnd)
                continue;
            double v;
            if (rewards)
                v = rec->is_target ? 0.0 : ((*certain)[i - 1][k] ? 0.0 : kInf);
            else
                v = rec->is_target || (*ones)[i - 1][k] ? 1.0 : 0.0;
            out.append(v);
            ++k;
        }
        out.close();
        if (k != meta.partitions[i - 1].state_count)
            throw FormatError("partition " + std::to_string(i) + " matrix holds " +
                              std::to_string(k) + " states, meta says " +
                              std::to_string(meta.partitions[i - 1].state_count));
    }

    AnalysisReport report;
    uint64_t executed = 0;
    bool changed;
    do {
        changed = false;
        for (uint32_t i = meta.count(); i >= 1; --i) {
            const PartitionMeta& pm = meta.partitions[i - 1];
            if (pm.state_count == 0)
                continue;
            RandomAccessPartition rap = load_matrix(wd, i);
            auto src = wd.source(FileKind::Values, i);
            std::vector<double> vals = read_all_f64(*src, "values");
            if (vals.size() != pm.state_count)
                throw FormatError("partition " + std::to_string(i) + " values file holds " +
                                  std::to_string(vals.size()) + " entries, meta says " +
                                  std::to_string(pm.state_count));
            std::map<uint32_t, std::vector<double>> succ;
            for (uint32_t j : pm.successors) {
                auto ssrc = wd.source(FileKind::Values, j);
                succ.emplace(j, read_all_f64(*ssrc, "successor values"));
            }
            double error;
            do {
                error = 0.0;
                for (uint32_t k = 0; k < rap.states.size(); ++k) {
                    const StateEntry& se = rap.states[k];
                    if (se.is_target || se.transition_count == 0)
                        continue;
                    if (rewards && std::isinf(vals[k]))
                        continue;
                    if (!rewards && ((*ones)[i - 1][k] || (*zeros)[i - 1][k]))
                        continue;
                    double v = worst(dir);
                    for (uint32_t t = 0; t < se.transition_count; ++t) {
                        const TransitionEntry& te = rap.transitions[se.first_transition + t];
                        double sum = 0.0;
                        for (uint32_t b = 0; b < te.branch_count; ++b) {
                            const BranchEntry& br = rap.branches[te.first_branch + b];
                            double tv;
                            if (br.partition == static_cast<int32_t>(i)) {
                                tv = vals[br.index];
                            } else {
                                auto it = succ.find(static_cast<uint32_t>(br.partition));
                                if (it == succ.end() ||
                                    static_cast<size_t>(br.index) >= it->second.size())
                                    throw InternalCheckError(
                                        "branch into partition " + std::to_string(br.partition) +
                                        " index " + std::to_string(br.index) +
                                        " is outside the successor tables of partition " +
                                        std::to_string(i));
                                tv = it->second[br.index];
                            }
                            sum += rewards ? br.probability * (br.reward + tv)
                                           : br.probability * tv;
                        }
                        v = pick(dir, v, sum);
                    }
                    double old = vals[k];
                    if (cfg.check_monotonic && v < old)
                        throw InternalCheckError(
                            "value iteration not monotone in partition " + std::to_string(i) +
                            " at state " + std::to_string(k) + ": " + std::to_string(old) +
                            " -> " + std::to_string(v));
                    if (v > 0.0)
                        error = std::max(error, std::abs(v - old) / std::max(old, v));
                    vals[k] = v;
                }
                ++report.inner_sweeps;
                if (cfg.sweep_observer)
                    cfg.sweep_observer(i, vals);
                if (error >= cfg.epsilon)
                    changed = true;
            } while (error >= cfg.epsilon);
            F64Writer out(wd.tmp_sink(FileKind::Values, i));
            for (double v : vals)
                out.append(v);
            out.close();
            wd.commit_tmp(FileKind::Values, i);
        }
        ++executed;
        if (changed) {
            ++report.outer_iterations;
            if (executed >= cfg.max_outer_iterations)
                throw ConvergenceError("no convergence after " + std::to_string(executed) +
                                       " partition passes");
        }
    } while (changed);

    auto src = wd.source(FileKind::Values, 1);
    std::vector<double> first = read_all_f64(*src, "values");
    if (first.empty())
        throw FormatError("partition 1 values file is empty");
    report.value = first[0];
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace

AnalysisReport value_iteration_partitioned(Workdir& wd, const WorkdirMeta& meta, Direction dir,
                                           const ConvergenceConfig& cfg) {
    // Precomputed certainty sets; iteration only works the strictly interior
    // states, so values that are exactly 0 or 1 come out exact.
    BitVectorPartitioned ones = prob1_partitioned(wd, meta, dir);
    BitVectorPartitioned zeros = prob0_partitioned(wd, meta, dir);
    return run_block_vi(wd, meta, dir, cfg, false, &ones, &zeros, nullptr);
}

AnalysisReport expected_reward_partitioned(Workdir& wd, const WorkdirMeta& meta, Direction dir,
                                           const ConvergenceConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    // The reward demands the target almost surely against the adversarial
    // direction of the optimization.
    BitVectorPartitioned certain =
        prob1_partitioned(wd, meta, dir == Direction::Max ? Direction::Min : Direction::Max);
    if (meta.count() == 0 || meta.partitions[0].state_count == 0)
        throw FormatError("workdir has no explored states");
    if (!certain[0][0]) {
        AnalysisReport report;
        report.value = kInf;
        report.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return report;
    }
    AnalysisReport report = run_block_vi(wd, meta, dir, cfg, true, nullptr, nullptr, &certain);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

CheckResult check(const TypedModel& model, const PartitionDecl& partition,
                  const PropertyDecl& property, Workdir& wd, const ConvergenceConfig& cfg) {
    CheckResult result;
    result.exploration = explore(model, partition, *property.target, wd);
    WorkdirMeta meta = read_meta(wd);
    if (property.kind == PropertyKind::Probability)
        result.analysis = value_iteration_partitioned(wd, meta, property.direction, cfg);
    else
        result.analysis = expected_reward_partitioned(wd, meta, property.direction, cfg);
    return result;
}

} // namespace diskmc
