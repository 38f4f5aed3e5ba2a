#include "diskmc/isq.hpp"

#include <string>

#include "diskmc/diagnostics.hpp"

namespace diskmc {

bool IsqRecord::operator==(const IsqRecord& o) const {
    if (kind != o.kind)
        return false;
    switch (kind) {
    case Kind::Branch:
        return probability == o.probability && reward == o.reward && partition == o.partition &&
               index == o.index;
    case Kind::TransitionEnd:
        return true;
    case Kind::StateEnd:
        return is_target == o.is_target;
    }
    return false;
}

void IsqWriter::append(const IsqRecord& rec) {
    uint8_t buf[kBranchBytes];
    switch (rec.kind) {
    case IsqRecord::Kind::Branch:
        buf[0] = kTagBranch;
        store_le_f64(buf + 1, rec.probability);
        store_le_f64(buf + 9, rec.reward);
        store_le_i32(buf + 17, rec.partition);
        store_le_i32(buf + 21, rec.index);
        sink_->write(buf, kBranchBytes);
        ++branches_;
        break;
    case IsqRecord::Kind::TransitionEnd:
        buf[0] = kTagTransitionEnd;
        sink_->write(buf, kTransitionEndBytes);
        ++transitions_;
        break;
    case IsqRecord::Kind::StateEnd:
        buf[0] = kTagStateEnd;
        buf[1] = rec.is_target ? 1 : 0;
        sink_->write(buf, kStateEndBytes);
        ++states_;
        break;
    }
}

std::optional<IsqRecord> IsqReader::next() {
    uint8_t tag;
    size_t got = source_->read(&tag, 1);
    if (got == 0)
        return std::nullopt;
    uint64_t at = offset_;
    ++offset_;
    uint8_t buf[kBranchBytes - 1];
    IsqRecord rec;
    switch (tag) {
    case kTagBranch: {
        std::string ctx = "branch record at offset " + std::to_string(at);
        source_->read_exact(buf, kBranchBytes - 1, ctx.c_str());
        offset_ += kBranchBytes - 1;
        rec.kind = IsqRecord::Kind::Branch;
        rec.probability = load_le_f64(buf);
        rec.reward = load_le_f64(buf + 8);
        rec.partition = load_le_i32(buf + 16);
        rec.index = load_le_i32(buf + 20);
        return rec;
    }
    case kTagTransitionEnd:
        rec.kind = IsqRecord::Kind::TransitionEnd;
        return rec;
    case kTagStateEnd: {
        std::string ctx = "state record at offset " + std::to_string(at);
        source_->read_exact(buf, 1, ctx.c_str());
        ++offset_;
        if (buf[0] > 1)
            throw FormatError("invalid target flag " + std::to_string(int(buf[0])) +
                              " at offset " + std::to_string(at));
        rec.kind = IsqRecord::Kind::StateEnd;
        rec.is_target = buf[0] != 0;
        return rec;
    }
    case kTagReserved:
        throw FormatError("reserved record tag 0x04 at offset " + std::to_string(at));
    default:
        throw FormatError("unknown record tag " + std::to_string(int(tag)) + " at offset " +
                          std::to_string(at));
    }
}

RandomAccessPartition load_partition(std::unique_ptr<ByteSource> source) {
    IsqReader in(std::move(source));
    RandomAccessPartition rap;
    uint32_t pending_branches = 0;
    uint32_t pending_transitions = 0;
    uint64_t record = 0;
    while (auto rec = in.next()) {
        switch (rec->kind) {
        case IsqRecord::Kind::Branch: {
            if (rec->index < 0)
                throw FormatError("preliminary index " + std::to_string(rec->index) +
                                  " in record " + std::to_string(record) +
                                  ": stream has not been corrected");
            if (rec->partition < 1)
                throw FormatError("invalid partition id " + std::to_string(rec->partition) +
                                  " in record " + std::to_string(record));
            BranchEntry b;
            b.probability = rec->probability;
            b.reward = rec->reward;
            b.partition = rec->partition;
            b.index = rec->index;
            rap.branches.push_back(b);
            ++pending_branches;
            break;
        }
        case IsqRecord::Kind::TransitionEnd: {
            TransitionEntry t;
            t.branch_count = pending_branches;
            t.first_branch = static_cast<uint32_t>(rap.branches.size()) - pending_branches;
            rap.transitions.push_back(t);
            pending_branches = 0;
            ++pending_transitions;
            break;
        }
        case IsqRecord::Kind::StateEnd: {
            if (pending_branches != 0)
                throw FormatError("state record " + std::to_string(record) +
                                  " closes a transition with dangling branches");
            StateEntry s;
            s.transition_count = pending_transitions;
            s.first_transition =
                static_cast<uint32_t>(rap.transitions.size()) - pending_transitions;
            s.is_target = rec->is_target ? 1 : 0;
            rap.states.push_back(s);
            pending_transitions = 0;
            break;
        }
        }
        ++record;
    }
    if (pending_branches != 0 || pending_transitions != 0)
        throw FormatError("stream ends inside a state: " + std::to_string(pending_branches) +
                          " open branches, " + std::to_string(pending_transitions) +
                          " open transitions");
    return rap;
}

void store_partition(const RandomAccessPartition& rap, IsqWriter& out) {
    for (const StateEntry& s : rap.states) {
        for (uint32_t t = 0; t < s.transition_count; ++t) {
            const TransitionEntry& tr = rap.transitions[s.first_transition + t];
            for (uint32_t b = 0; b < tr.branch_count; ++b) {
                const BranchEntry& br = rap.branches[tr.first_branch + b];
                out.branch(br.probability, br.reward, br.partition, br.index);
            }
            out.transition_end();
        }
        out.state_end(s.is_target != 0);
    }
}

} // namespace diskmc
