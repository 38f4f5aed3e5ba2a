#include "diskmc/semantics.hpp"

#include <cmath>

namespace diskmc {

ExplicitState initial_state(const TypedModel& m) {
    ExplicitState s(m.width());
    for (size_t k = 0; k < m.variables.size(); ++k) s[k] = m.variables[k].init;
    return s;
}

std::string state_to_string(const TypedModel& m, std::span<const int32_t> s) {
    std::string out = "(";
    for (size_t k = 0; k < m.variables.size(); ++k) {
        if (k) out += ", ";
        out += m.variables[k].name + "=" + std::to_string(s[k]);
    }
    out += ")";
    return out;
}

bool state_satisfies(const Expr& target, std::span<const int32_t> s) {
    return evaluate(target, s).b;
}

static constexpr double kSumTolerance = 1e-9;

std::vector<ExpandedTransition> enabled_transitions(const TypedModel& m,
                                                    std::span<const int32_t> s) {
    std::vector<ExpandedTransition> out;
    for (const auto& cmd : m.commands) {
        if (!evaluate(*cmd.guard, s).b) continue;

        ExpandedTransition tr;
        double sum = 0.0;
        for (const auto& alt : cmd.alternatives) {
            double p = alt.probability ? evaluate(*alt.probability, s).as_real() : 1.0;
            if (p < 0.0)
                throw ModelError("negative branch probability " + std::to_string(p) +
                                 " in state " + state_to_string(m, s));
            sum += p;
            if (p == 0.0) continue;

            ExpandedBranch br;
            br.probability = p;
            br.reward = alt.reward ? evaluate(*alt.reward, s).as_real() : 0.0;
            br.target.assign(s.begin(), s.end());
            for (const auto& u : alt.updates) {
                int64_t v = evaluate(*u.value, s).i;
                const auto& decl = m.variables[static_cast<size_t>(u.var_index)];
                if (v < decl.lower || v > decl.upper)
                    throw ModelError("update " + u.var + "' = " + std::to_string(v) +
                                     " leaves domain " + std::to_string(decl.lower) + ".." +
                                     std::to_string(decl.upper) + " in state " +
                                     state_to_string(m, s));
                br.target[static_cast<size_t>(u.var_index)] = static_cast<int32_t>(v);
            }
            tr.branches.push_back(std::move(br));
        }
        if (std::abs(sum - 1.0) > kSumTolerance)
            throw ModelError("branch probabilities sum to " + std::to_string(sum) +
                             " (not 1) in state " + state_to_string(m, s));
        out.push_back(std::move(tr));
    }
    return out;
}

int32_t partition_of(const TypedModel& m, const PartitionDecl& part,
                     std::span<const int32_t> s) {
    int64_t id = evaluate(*part.expr, s).i;
    if (id < 1 || id > part.bound)
        throw ModelError("partition id " + std::to_string(id) + " outside 1.." +
                         std::to_string(part.bound) + " for state " + state_to_string(m, s));
    return static_cast<int32_t>(id);
}

IndexedStateSet::IndexedStateSet(size_t width)
    : width_(width), set_(16, IndexHash{this}, IndexEq{this}) {}

size_t IndexedStateSet::hash_at(uint32_t idx) const {
    // FNV-1a over the state's bytes.
    const auto* p = reinterpret_cast<const unsigned char*>(
        arena_.data() + static_cast<size_t>(idx) * width_);
    uint64_t h = 1469598103934665603ull;
    for (size_t k = 0; k < width_ * sizeof(int32_t); ++k) {
        h ^= p[k];
        h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
}

bool IndexedStateSet::equal_at(uint32_t a, uint32_t b) const {
    const int32_t* pa = arena_.data() + static_cast<size_t>(a) * width_;
    const int32_t* pb = arena_.data() + static_cast<size_t>(b) * width_;
    return std::equal(pa, pa + width_, pb);
}

std::pair<uint32_t, bool> IndexedStateSet::add(std::span<const int32_t> s) {
    arena_.insert(arena_.end(), s.begin(), s.end());
    auto idx = static_cast<uint32_t>(count_);
    auto [it, inserted] = set_.insert(idx);
    if (!inserted) {
        arena_.resize(arena_.size() - width_);
        return {*it, false};
    }
    ++count_;
    return {idx, true};
}

std::optional<uint32_t> IndexedStateSet::find(std::span<const int32_t> s) {
    arena_.insert(arena_.end(), s.begin(), s.end());
    auto probe = static_cast<uint32_t>(count_);
    auto it = set_.find(probe);
    arena_.resize(arena_.size() - width_);
    if (it == set_.end()) return std::nullopt;
    return *it;
}

} // namespace diskmc
