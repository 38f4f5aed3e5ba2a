#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <unistd.h>

#include "diskmc/analyze.hpp"
#include "diskmc/diagnostics.hpp"
#include "diskmc/isq.hpp"
#include "diskmc/reference.hpp"
#include "diskmc/semantics.hpp"

namespace testutil {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;

    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() / ("diskmc-test-" + std::to_string(::getpid()) + "-" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

struct TempWorkdir {
    TempDir dir;
    diskmc::Workdir wd;

    explicit TempWorkdir(bool compress = false) : wd(dir.path, compress) {}
};

inline diskmc::TypedModel compile_model(const std::string& text) {
    diskmc::ParseResult parsed = diskmc::parse_model(text);
    if (!parsed.ast)
        throw diskmc::ModelError("test model does not parse: " + parsed.errors[0].to_string());
    diskmc::TypeCheckResult checked = diskmc::type_check(*parsed.ast);
    if (!checked.model)
        throw diskmc::ModelError("test model does not type-check: " +
                                 checked.errors[0].to_string());
    return std::move(*checked.model);
}

inline const diskmc::PropertyDecl& property_of(const diskmc::TypedModel& m,
                                               const std::string& name) {
    const diskmc::PropertyDecl* p = m.find_property(name);
    if (!p)
        throw diskmc::ModelError("test model has no property " + name);
    return *p;
}

// Reference answer for a property, computed on the in-memory oracle.
inline double reference_value(const diskmc::TypedModel& m, const diskmc::PropertyDecl& prop,
                              double epsilon) {
    diskmc::InMemoryMdp mdp = diskmc::build_in_memory(m, *prop.target);
    diskmc::ConvergenceConfig cfg;
    cfg.epsilon = epsilon;
    if (prop.kind == diskmc::PropertyKind::Probability)
        return diskmc::value_iteration_reference(mdp, prop.direction, cfg)[0];
    return diskmc::expected_reward_reference(mdp, prop.direction, cfg)[0];
}

inline diskmc::CheckResult run_check(const diskmc::TypedModel& m, diskmc::Workdir& wd,
                                     const diskmc::PropertyDecl& prop, double epsilon) {
    if (!m.partition)
        throw diskmc::ModelError("test model has no partition");
    diskmc::PartitionDecl part = diskmc::type_check_partition(m, *m.partition);
    diskmc::ConvergenceConfig cfg;
    cfg.epsilon = epsilon;
    return diskmc::check(m, part, prop, wd, cfg);
}

// Everything exploration left on disk, loaded back for inspection.
struct Snapshot {
    diskmc::WorkdirMeta meta;
    std::vector<std::vector<diskmc::ExplicitState>> states; // [partition][index]
    std::vector<diskmc::RandomAccessPartition> raps;
};

inline Snapshot load_snapshot(diskmc::Workdir& wd, size_t width) {
    Snapshot snap;
    snap.meta = diskmc::read_meta(wd);
    for (uint32_t i = 1; i <= snap.meta.count(); ++i) {
        snap.raps.push_back(diskmc::load_partition(wd.source(diskmc::FileKind::Matrix, i)));
        std::vector<diskmc::ExplicitState> block;
        diskmc::StateReader in(wd.source(diskmc::FileKind::States, i), width);
        diskmc::ExplicitState s;
        while (in.next(s))
            block.push_back(s);
        if (block.size() != snap.meta.partitions[i - 1].state_count ||
            block.size() != snap.raps.back().states.size())
            throw diskmc::FormatError("partition " + std::to_string(i) +
                                      " state count disagrees between files and meta");
        snap.states.push_back(std::move(block));
    }
    return snap;
}

// Structural equality of the partitioned state space against the in-memory
// oracle: same reachable states, and per state the same transitions, branch
// probabilities, rewards and branch targets. Returns a description of the
// first mismatch, or nullopt.
inline std::optional<std::string> compare_with_oracle(const diskmc::InMemoryMdp& oracle,
                                                      const Snapshot& snap) {
    std::map<diskmc::ExplicitState, uint32_t> index;
    for (uint32_t o = 0; o < oracle.state_count(); ++o)
        index[oracle.states[o]] = o;

    uint64_t total = 0;
    std::vector<char> seen(oracle.state_count(), 0);
    for (size_t i = 0; i < snap.states.size(); ++i) {
        for (size_t k = 0; k < snap.states[i].size(); ++k) {
            auto it = index.find(snap.states[i][k]);
            if (it == index.end())
                return "partition " + std::to_string(i + 1) + " state " + std::to_string(k) +
                       " is not reachable in the oracle";
            if (seen[it->second])
                return "state duplicated across partitions (oracle index " +
                       std::to_string(it->second) + ")";
            seen[it->second] = 1;
            ++total;
        }
    }
    if (total != oracle.state_count())
        return "explored " + std::to_string(total) + " states, oracle has " +
               std::to_string(oracle.state_count());

    for (size_t i = 0; i < snap.states.size(); ++i) {
        const diskmc::RandomAccessPartition& rap = snap.raps[i];
        for (size_t k = 0; k < snap.states[i].size(); ++k) {
            uint32_t o = index.at(snap.states[i][k]);
            const diskmc::StateEntry& sp = rap.states[k];
            const diskmc::StateEntry& so = oracle.state_entries[o];
            std::string where = "partition " + std::to_string(i + 1) + " state " +
                                std::to_string(k) + " (oracle " + std::to_string(o) + ")";
            if (sp.is_target != so.is_target)
                return where + ": target flag differs";
            if (sp.transition_count != so.transition_count)
                return where + ": transition count differs";
            for (uint32_t t = 0; t < sp.transition_count; ++t) {
                const diskmc::TransitionEntry& tp = rap.transitions[sp.first_transition + t];
                const diskmc::TransitionEntry& to = oracle.transitions[so.first_transition + t];
                if (tp.branch_count != to.branch_count)
                    return where + ": branch count differs in transition " + std::to_string(t);
                for (uint32_t b = 0; b < tp.branch_count; ++b) {
                    const diskmc::BranchEntry& bp = rap.branches[tp.first_branch + b];
                    const diskmc::BranchEntry& bo = oracle.branches[to.first_branch + b];
                    std::string at = where + ", transition " + std::to_string(t) + " branch " +
                                     std::to_string(b);
                    if (bp.probability != bo.probability)
                        return at + ": probability differs";
                    if (bp.reward != bo.reward)
                        return at + ": reward differs";
                    if (bp.partition < 1 ||
                        static_cast<size_t>(bp.partition) > snap.states.size())
                        return at + ": partition id out of range";
                    const auto& block = snap.states[bp.partition - 1];
                    if (static_cast<size_t>(bp.index) >= block.size())
                        return at + ": branch index out of range";
                    if (block[bp.index] != oracle.states[bo.index])
                        return at + ": branch target differs";
                }
            }
        }
    }
    return std::nullopt;
}

// Watches value iteration sweeps and records the first decrease, if any.
struct MonotonicObserver {
    std::map<uint32_t, std::vector<double>> last;
    uint64_t calls = 0;
    std::optional<std::string> violation;

    std::function<void(uint32_t, std::span<const double>)> hook() {
        return [this](uint32_t partition, std::span<const double> values) {
            ++calls;
            auto it = last.find(partition);
            if (it != last.end() && it->second.size() == values.size()) {
                for (size_t k = 0; k < values.size(); ++k) {
                    if (values[k] < it->second[k] && !violation) {
                        violation = "partition " + std::to_string(partition) + " state " +
                                    std::to_string(k) + " decreased";
                    }
                }
            }
            last[partition] = std::vector<double>(values.begin(), values.end());
        };
    }
};

// Random guarded-command models with exactly representable probabilities
// (eighths), clamped updates and a partitioning that maps the all-zero
// initial state to block 1. Declares all four property kinds over one
// target. The first command is biased toward staying enabled and updates
// drift upward, so most seeds reach well beyond the initial state.
inline std::string random_model(uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto ri = [&rng](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
    };
    static const char* kEighth[] = {"",    "0.125", "0.25", "0.375", "0.5",
                                    "0.625", "0.75",  "0.875", "1.0"};

    int nvars = ri(1, 3);
    static const char* kNames[] = {"x", "y", "z"};
    std::vector<int> hi(nvars);
    long product = 1;
    for (int v = 0; v < nvars; ++v) {
        hi[v] = ri(3, 12);
        while (product * (hi[v] + 1) > 4000 && hi[v] > 1)
            --hi[v];
        product *= hi[v] + 1;
    }

    std::string text;
    for (int v = 0; v < nvars; ++v)
        text += "var " + std::string(kNames[v]) + " : 0.." + std::to_string(hi[v]) + " init 0;\n";

    int ncmd = ri(2, 4);
    for (int c = 0; c < ncmd; ++c) {
        std::string guard;
        int kind = c == 0 ? ri(0, 3) : 3;
        if (kind == 0) {
            guard = std::string(kNames[0]) + " >= 0";
        } else if (kind == 1) {
            guard = std::string(kNames[0]) + " < " + std::to_string(hi[0]);
        } else {
            int nconj = ri(1, 2);
            for (int g = 0; g < nconj; ++g) {
                int v = ri(0, nvars - 1);
                static const char* kCmp[] = {"<", "<=", ">", ">=", "=", "!="};
                if (g)
                    guard += " & ";
                guard += std::string(kNames[v]) + " " + kCmp[ri(0, 5)] + " " +
                         std::to_string(ri(0, hi[v]));
            }
        }
        int nb = ri(1, 4);
        std::vector<int> w(nb, 1);
        for (int k = nb; k < 8; ++k)
            ++w[ri(0, nb - 1)];
        std::string cmd = "[] " + guard + " ->";
        for (int b = 0; b < nb; ++b) {
            std::string alt;
            if (nb > 1 || ri(0, 1) == 0) {
                if (ri(0, 1) == 0)
                    alt += std::string(kEighth[w[b]]) + " : ";
                else
                    alt += std::to_string(w[b]) + " / 8 : ";
            }
            std::string ups;
            for (int v = 0; v < nvars; ++v) {
                int mode = ri(0, 4);
                if (mode == 0)
                    continue;
                std::string name = kNames[v];
                std::string rhs;
                if (mode == 1)
                    rhs = std::to_string(ri(0, hi[v]));
                else if (mode == 2)
                    rhs = "max(" + name + " - " + std::to_string(ri(1, 2)) + ", 0)";
                else
                    rhs = "min(" + name + " + " + std::to_string(ri(1, 2)) + ", " +
                          std::to_string(hi[v]) + ")";
                if (!ups.empty())
                    ups += " & ";
                ups += "(" + name + "' = " + rhs + ")";
            }
            if (ups.empty())
                ups = "(" + std::string(kNames[0]) + "' = " + kNames[0] + ")";
            alt += ups;
            if (ri(0, 2) == 0)
                alt += " reward " + std::to_string(ri(1, 3));
            cmd += (b ? " + " : " ") + alt;
        }
        text += cmd + ";\n";
    }

    int tv = ri(0, nvars - 1);
    std::string target;
    switch (ri(0, 2)) {
    case 0: target = std::string(kNames[tv]) + " = " + std::to_string(hi[tv]); break;
    case 1: target = std::string(kNames[tv]) + " >= " + std::to_string(std::max(1, hi[tv] - 1)); break;
    default:
        target = std::string(kNames[tv]) + " >= 1";
        if (nvars > 1)
            target += " & " + std::string(kNames[(tv + 1) % nvars]) + " >= 1";
        break;
    }
    text += "property pmax = Pmax(" + target + ");\n";
    text += "property pmin = Pmin(" + target + ");\n";
    text += "property rmax = Rmax(" + target + ");\n";
    text += "property rmin = Rmin(" + target + ");\n";

    switch (ri(0, 2)) {
    case 0:
        text += "partition 1 bound 1;\n";
        break;
    case 1: {
        int blocks = std::min(hi[0] + 1, 8);
        text += "partition min(" + std::string(kNames[0]) + ", " + std::to_string(blocks - 1) +
                ") + 1 bound " + std::to_string(blocks) + ";\n";
        break;
    }
    default: {
        std::string expr = "1";
        int blocks = 1;
        for (int v = 0; v < nvars; ++v) {
            expr += " + (" + std::string(kNames[v]) + " > " + std::to_string(ri(0, hi[v])) +
                    " ? 1 : 0)";
            ++blocks;
        }
        text += "partition " + expr + " bound " + std::to_string(blocks) + ";\n";
        break;
    }
    }
    return text;
}

// Values match when both are infinite or within an absolute tolerance scaled
// up for large rewards.
inline bool values_match(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b))
        return std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0);
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

} // namespace testutil
