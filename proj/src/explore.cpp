#include "diskmc/explore.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "diskmc/diagnostics.hpp"
#include "diskmc/isq.hpp"
#include "diskmc/semantics.hpp"

namespace diskmc {

namespace {

class Explorer {
public:
    Explorer(const TypedModel& model, const PartitionDecl& part, const Expr& target, Workdir& wd)
        : model_(model), part_(part), target_(target), wd_(wd) {}

    ExplorationReport run();

private:
    struct Partition {
        uint32_t state_count = 0;     // entries in p<i>.states
        uint64_t qlen = 0;            // queue appends since the last drain
        uint64_t appends_total = 0;   // lifetime queue appends
        uint64_t matrix_logical = 0;  // current matrix bytes before compression
        std::set<uint32_t> successors;
    };

    // Growing at the end of a deque keeps references to earlier partitions
    // valid; expand_partition holds one across runtime() calls.
    Partition& runtime(uint32_t id) {
        if (id > parts_.size())
            parts_.resize(id);
        return parts_[id - 1];
    }

    StateWriter& queue_out(uint32_t id) {
        auto it = queue_out_.find(id);
        if (it == queue_out_.end())
            it = queue_out_
                     .emplace(id, StateWriter(wd_.sink(FileKind::Queue, id, OpenMode::Append),
                                              model_.width()))
                     .first;
        return it->second;
    }

    void close_queue_writers() {
        for (auto& [id, w] : queue_out_)
            w.close();
        queue_out_.clear();
    }

    void note_residency(uint64_t resident) {
        peak_resident_ = std::max(peak_resident_, resident);
    }

    void correct_indices(uint32_t i);
    void expand_partition(uint32_t i, bool& changed);

    const TypedModel& model_;
    const PartitionDecl& part_;
    const Expr& target_;
    Workdir& wd_;
    std::deque<Partition> parts_;
    std::map<uint32_t, StateWriter> queue_out_;
    uint32_t outer_ = 0;
    uint64_t peak_resident_ = 0;
};

// Phase 1: rewrite partition i's matrix, replacing each preliminary cross
// reference -k into partition j by the final index recorded at position k-1
// of j's updates table.
void Explorer::correct_indices(uint32_t i) {
    if (!wd_.exists(FileKind::Matrix, i))
        return;
    Partition& p = runtime(i);
    if (p.successors.empty())
        return; // purely local matrix, nothing preliminary in it
    std::map<uint32_t, std::vector<uint32_t>> updates;
    for (uint32_t j : p.successors) {
        auto src = wd_.source(FileKind::Updates, j);
        updates.emplace(j, read_all_u32(*src, "updates table"));
    }
    wd_.rename_to_old(FileKind::Matrix, i);
    IsqReader in(wd_.old_source(FileKind::Matrix, i));
    IsqWriter out(wd_.sink(FileKind::Matrix, i, OpenMode::Truncate));
    while (auto rec = in.next()) {
        if (rec->kind == IsqRecord::Kind::Branch && rec->index < 0) {
            auto it = updates.find(static_cast<uint32_t>(rec->partition));
            size_t k = static_cast<size_t>(-static_cast<int64_t>(rec->index)) - 1;
            if (it == updates.end() || k >= it->second.size())
                throw InternalCheckError(
                    "no updates entry for preliminary reference " + std::to_string(rec->index) +
                    " into partition " + std::to_string(rec->partition));
            rec->index = static_cast<int32_t>(it->second[k]);
        }
        out.append(*rec);
    }
    out.close();
    wd_.remove_old(FileKind::Matrix, i);
    p.matrix_logical = out.logical_bytes();
}

// Phase 2: drain partition i's queue, expanding every state not expanded in
// an earlier pass. Local successors get final indices immediately; cross
// successors are appended to their partition's queue and referenced by the
// append's position.
void Explorer::expand_partition(uint32_t i, bool& changed) {
    Partition& p = runtime(i);
    p.qlen = 0;
    U32Writer updates(wd_.sink(FileKind::Updates, i, OpenMode::Truncate));

    IndexedStateSet states(model_.width());
    {
        StateReader in(wd_.source(FileKind::States, i), model_.width());
        ExplicitState s;
        while (in.next(s)) {
            if (!states.add(s).second)
                throw FormatError("duplicate state in partition " + std::to_string(i) +
                                  " states file");
            note_residency(states.size() + 1);
        }
    }
    if (states.size() != p.state_count)
        throw InternalCheckError("partition " + std::to_string(i) + " has " +
                                 std::to_string(states.size()) + " states on disk, expected " +
                                 std::to_string(p.state_count));

    StateWriter states_out(wd_.sink(FileKind::States, i, OpenMode::Append), model_.width());
    IsqWriter matrix(wd_.sink(FileKind::Matrix, i, OpenMode::Append));

    // Load the queue. Fresh states enter the index (and the states file) in
    // queue order, which keeps index order aligned with matrix stream order.
    std::vector<uint32_t> queue;
    std::vector<char> done(states.size(), 1);
    if (wd_.rename_to_old(FileKind::Queue, i)) {
        StateReader in(wd_.old_source(FileKind::Queue, i), model_.width());
        ExplicitState s;
        while (in.next(s)) {
            auto [idx, fresh] = states.add(s);
            if (fresh) {
                states_out.append(s);
                done.push_back(0);
            }
            queue.push_back(idx);
            note_residency(states.size() + 1);
        }
        wd_.remove_old(FileKind::Queue, i);
    }

    size_t head = 0;
    ExplicitState cur;
    while (head < queue.size()) {
        uint32_t idx = queue[head++];
        updates.append(idx);
        if (done[idx])
            continue;
        done[idx] = 1;
        changed = true;
        cur.assign(states.state(idx).begin(), states.state(idx).end());
        if (partition_of(model_, part_, cur) != static_cast<int32_t>(i))
            throw InternalCheckError("state " + state_to_string(model_, cur) +
                                     " queued to partition " + std::to_string(i) +
                                     " but maps elsewhere");
        auto transitions = enabled_transitions(model_, cur);
        uint64_t in_flight = 1;
        for (const ExpandedTransition& tr : transitions)
            in_flight += tr.branches.size();
        note_residency(states.size() + in_flight);
        for (const ExpandedTransition& tr : transitions) {
            for (const ExpandedBranch& br : tr.branches) {
                int32_t j = partition_of(model_, part_, br.target);
                if (j == static_cast<int32_t>(i)) {
                    auto [tidx, fresh] = states.add(br.target);
                    if (fresh) {
                        states_out.append(br.target);
                        done.push_back(0);
                        queue.push_back(tidx);
                    }
                    matrix.branch(br.probability, br.reward, j, static_cast<int32_t>(tidx));
                } else {
                    Partition& t = runtime(static_cast<uint32_t>(j));
                    p.successors.insert(static_cast<uint32_t>(j));
                    queue_out(static_cast<uint32_t>(j)).append(br.target);
                    ++t.qlen;
                    ++t.appends_total;
                    if (t.qlen > static_cast<uint64_t>(std::numeric_limits<int32_t>::max()))
                        throw InternalCheckError("queue counter overflow for partition " +
                                                 std::to_string(j));
                    matrix.branch(br.probability, br.reward, j, -static_cast<int32_t>(t.qlen));
                }
            }
            matrix.transition_end();
        }
        matrix.state_end(state_satisfies(target_, cur));
    }

    updates.close();
    states_out.close();
    matrix.close();
    p.matrix_logical += matrix.logical_bytes();
    p.state_count = states.size();
}

ExplorationReport Explorer::run() {
    auto t0 = std::chrono::steady_clock::now();
    ExplicitState s0 = initial_state(model_);
    int32_t first = partition_of(model_, part_, s0);
    if (first != 1)
        throw ModelError("initial state " + state_to_string(model_, s0) +
                         " maps to partition " + std::to_string(first) + ", expected 1");
    {
        StateWriter seed(wd_.sink(FileKind::Queue, 1, OpenMode::Truncate), model_.width());
        seed.append(s0);
        seed.close();
    }
    runtime(1);
    bool changed;
    do {
        changed = false;
        for (uint32_t i = 1; i <= parts_.size(); ++i) {
            correct_indices(i);
            expand_partition(i, changed);
            close_queue_writers();
        }
        ++outer_;
    } while (changed);

    WorkdirMeta meta;
    ExplorationReport report;
    for (uint32_t i = 1; i <= parts_.size(); ++i) {
        Partition& p = runtime(i);
        if (p.qlen != 0)
            throw InternalCheckError("partition " + std::to_string(i) +
                                     " queue not drained at end of exploration");
        PartitionMeta pm;
        pm.state_count = p.state_count;
        pm.qlen = 0;
        pm.successors.assign(p.successors.begin(), p.successors.end());
        meta.partitions.push_back(std::move(pm));

        report.partition_states.push_back(p.state_count);
        report.cross_edges += p.appends_total;
        report.c_max = std::max(report.c_max, p.appends_total);
        report.matrix_bytes_raw += p.matrix_logical;
        report.matrix_bytes_disk += wd_.disk_bytes(FileKind::Matrix, i);
    }
    write_meta(wd_, meta);
    report.partition_count = meta.count();
    report.states_total = meta.states_total();
    report.n_max = meta.n_max();
    report.s_max = meta.s_max();
    report.outer_iterations = outer_;
    report.peak_resident_states = peak_resident_;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace

ExplorationReport explore(const TypedModel& model, const PartitionDecl& partition,
                          const Expr& target, Workdir& wd) {
    Explorer ex(model, partition, target, wd);
    return ex.run();
}

} // namespace diskmc
