#pragma once

#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "diskmc/model.hpp"

namespace diskmc {

// A state is one 32-bit signed value per variable, in declaration order.
// On disk each value is stored little-endian, so a state occupies
// 4 * width bytes.
using ExplicitState = std::vector<int32_t>;

struct ExpandedBranch {
    double probability = 0.0; // in (0, 1]
    double reward = 0.0;
    ExplicitState target;
};

struct ExpandedTransition {
    std::vector<ExpandedBranch> branches;
};

ExplicitState initial_state(const TypedModel& m);

// All transitions enabled in s, one per command with a true guard, in
// declaration order. Branch probabilities of each transition must sum to 1
// within 1e-9; zero-probability branches are dropped, duplicate targets are
// kept as distinct branches. Throws ModelError on a negative probability, a
// bad sum, or an update leaving a variable's domain.
std::vector<ExpandedTransition> enabled_transitions(const TypedModel& m,
                                                    std::span<const int32_t> s);

// Partition id of s under the model's partitioning expression; always in
// 1..bound, otherwise ModelError.
int32_t partition_of(const TypedModel& m, const PartitionDecl& part,
                     std::span<const int32_t> s);

// Does s satisfy a boolean (target) expression?
bool state_satisfies(const Expr& target, std::span<const int32_t> s);

// "(x=0, y=3)" for error messages and traces.
std::string state_to_string(const TypedModel& m, std::span<const int32_t> s);

// Insertion-ordered set of explicit states with dense u32 indices. States
// live in one flat arena; the hash set stores indices only, so lookups never
// allocate. Index order is insertion order.
class IndexedStateSet {
public:
    explicit IndexedStateSet(size_t width);
    IndexedStateSet(const IndexedStateSet&) = delete;
    IndexedStateSet& operator=(const IndexedStateSet&) = delete;

    // Returns (index, true) when s was inserted, (existing index, false)
    // when it was already present.
    std::pair<uint32_t, bool> add(std::span<const int32_t> s);

    // Non-const: probes via a transient arena append.
    std::optional<uint32_t> find(std::span<const int32_t> s);

    uint32_t size() const { return static_cast<uint32_t>(count_); }
    size_t width() const { return width_; }
    std::span<const int32_t> state(uint32_t index) const {
        return {arena_.data() + static_cast<size_t>(index) * width_, width_};
    }

private:
    struct IndexHash {
        const IndexedStateSet* owner;
        size_t operator()(uint32_t idx) const { return owner->hash_at(idx); }
    };
    struct IndexEq {
        const IndexedStateSet* owner;
        bool operator()(uint32_t a, uint32_t b) const { return owner->equal_at(a, b); }
    };

    size_t hash_at(uint32_t idx) const;
    bool equal_at(uint32_t a, uint32_t b) const;

    size_t width_;
    size_t count_ = 0;
    std::vector<int32_t> arena_;
    std::unordered_set<uint32_t, IndexHash, IndexEq> set_;
};

} // namespace diskmc
