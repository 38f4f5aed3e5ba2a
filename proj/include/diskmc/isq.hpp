#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "diskmc/io.hpp"

namespace diskmc {

// Inverse-sequential matrix encoding. Children precede parents so the stream
// can be written in one pass while expanding: all branch records of a
// transition, then its TransitionEnd; all transitions of a state, then its
// StateEnd. The k-th StateEnd closes the state with index k.
//
//   Branch        := 0x01 probability(f64 LE) reward(f64 LE)
//                         partition(i32 LE) index(i32 LE)      (25 bytes)
//   TransitionEnd := 0x02                                      (1 byte)
//   StateEnd      := 0x03 is_target(u8 0/1)                    (2 bytes)
//
// A negative index is a preliminary cross reference: -k names the k-th append
// (1-based) to the target partition's queue since that partition's last
// expansion pass; index correction replaces it with updates[k-1]. Tag 0x04 is
// reserved for future extension records and rejected.

constexpr uint8_t kTagBranch = 0x01;
constexpr uint8_t kTagTransitionEnd = 0x02;
constexpr uint8_t kTagStateEnd = 0x03;
constexpr uint8_t kTagReserved = 0x04;

constexpr uint64_t kBranchBytes = 25;
constexpr uint64_t kTransitionEndBytes = 1;
constexpr uint64_t kStateEndBytes = 2;

inline uint64_t isq_stream_bytes(uint64_t branches, uint64_t transitions, uint64_t states) {
    return kBranchBytes * branches + kTransitionEndBytes * transitions +
           kStateEndBytes * states;
}

struct IsqRecord {
    enum class Kind : uint8_t { Branch, TransitionEnd, StateEnd };
    Kind kind = Kind::TransitionEnd;
    // Branch fields
    double probability = 0.0;
    double reward = 0.0;
    int32_t partition = 0;
    int32_t index = 0;
    // StateEnd field
    bool is_target = false;

    static IsqRecord branch(double p, double r, int32_t partition, int32_t index) {
        IsqRecord rec;
        rec.kind = Kind::Branch;
        rec.probability = p;
        rec.reward = r;
        rec.partition = partition;
        rec.index = index;
        return rec;
    }
    static IsqRecord transition_end() { return IsqRecord{}; }
    static IsqRecord state_end(bool is_target) {
        IsqRecord rec;
        rec.kind = Kind::StateEnd;
        rec.is_target = is_target;
        return rec;
    }

    bool operator==(const IsqRecord& o) const;
};

class IsqWriter {
public:
    explicit IsqWriter(std::unique_ptr<ByteSink> sink) : sink_(std::move(sink)) {}

    void append(const IsqRecord& rec);
    void branch(double p, double r, int32_t partition, int32_t index) {
        append(IsqRecord::branch(p, r, partition, index));
    }
    void transition_end() { append(IsqRecord::transition_end()); }
    void state_end(bool is_target) { append(IsqRecord::state_end(is_target)); }

    uint64_t branches() const { return branches_; }
    uint64_t transitions() const { return transitions_; }
    uint64_t states() const { return states_; }
    uint64_t logical_bytes() const { return sink_->logical_bytes(); }
    void close() { sink_->close(); }

private:
    std::unique_ptr<ByteSink> sink_;
    uint64_t branches_ = 0, transitions_ = 0, states_ = 0;
};

class IsqReader {
public:
    explicit IsqReader(std::unique_ptr<ByteSource> source) : source_(std::move(source)) {}

    // nullopt at clean end of stream; FormatError (with byte offset) on an
    // unknown tag or a record cut short.
    std::optional<IsqRecord> next();

private:
    std::unique_ptr<ByteSource> source_;
    uint64_t offset_ = 0;
};

// Random-access image of one partition's matrix. Entry sizes are part of the
// memory accounting: 12 bytes per state, 8 per transition, 24 per branch.
struct StateEntry {
    uint32_t transition_count = 0;
    uint32_t first_transition = 0;
    uint32_t is_target = 0;
};
struct TransitionEntry {
    uint32_t branch_count = 0;
    uint32_t first_branch = 0;
};
struct BranchEntry {
    double probability = 0.0;
    double reward = 0.0;
    int32_t partition = 0;
    int32_t index = 0;
};
static_assert(sizeof(StateEntry) == 12);
static_assert(sizeof(TransitionEntry) == 8);
static_assert(sizeof(BranchEntry) == 24);

struct RandomAccessPartition {
    std::vector<StateEntry> states;
    std::vector<TransitionEntry> transitions;
    std::vector<BranchEntry> branches;

    uint64_t memory_bytes() const {
        return sizeof(StateEntry) * states.size() + sizeof(TransitionEntry) * transitions.size() +
               sizeof(BranchEntry) * branches.size();
    }
};

// Builds the random-access image from a corrected record stream. Rejects
// preliminary (negative) indices, partition ids < 1 and streams that end
// inside a state.
RandomAccessPartition load_partition(std::unique_ptr<ByteSource> source);

// Inverse of load_partition: store_partition(load_partition(s)) reproduces s
// byte for byte.
void store_partition(const RandomAccessPartition& rap, IsqWriter& out);

} // namespace diskmc
