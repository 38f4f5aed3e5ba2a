// Acceptance gate. Runs the nine release criteria end to end and prints one
// pass/fail line per criterion; exits nonzero if any of them fails. Slower
// than the unit suites (it sweeps randomized corpora and a six-figure-state
// protocol model), so it lives in its own binary.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "diskmc/analyze.hpp"
#include "diskmc/corpus.hpp"
#include "diskmc/explore.hpp"
#include "diskmc/isq.hpp"
#include "diskmc/reference.hpp"
#include "helpers.hpp"

namespace {

using namespace diskmc;
namespace fs = std::filesystem;

constexpr uint64_t kRandomSeedBase = 1000;
constexpr int kRandomModels = 50;
constexpr uint64_t kResidencySlack = 32;

std::string fmt(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

std::vector<char> file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::vector<char>(std::istreambuf_iterator<char>(in),
                             std::istreambuf_iterator<char>());
}

// Results of the shared sweep over the randomized model corpus. Criteria 1,
// 2 and 8 all read from the same pass so every model is explored once per
// property at most.
struct RandomCorpus {
    bool ran = false;
    std::vector<std::string> value_failures;     // criterion 1
    std::vector<std::string> structure_failures; // criterion 2
    std::vector<std::string> residency_failures; // criterion 8
    double max_probability_delta = 0.0;
    int models = 0;
    int comparisons = 0;
    uint64_t states_total = 0;
};

RandomCorpus& random_corpus() {
    static RandomCorpus rc;
    if (rc.ran)
        return rc;
    rc.ran = true;

    for (int k = 0; k < kRandomModels; ++k) {
        uint64_t seed = kRandomSeedBase + static_cast<uint64_t>(k);
        std::string tag = "seed " + std::to_string(seed);
        try {
            TypedModel m = testutil::compile_model(testutil::random_model(seed));
            PartitionDecl part = type_check_partition(m, *m.partition);
            const PropertyDecl& pmax = testutil::property_of(m, "pmax");

            testutil::TempWorkdir t;
            ExplorationReport er = explore(m, part, *pmax.target, t.wd);
            rc.states_total += er.states_total;

            InMemoryMdp oracle = build_in_memory(m, *pmax.target);
            testutil::Snapshot snap = testutil::load_snapshot(t.wd, m.width());
            if (auto mismatch = testutil::compare_with_oracle(oracle, snap))
                rc.structure_failures.push_back(tag + ": " + *mismatch);
            for (uint32_t i = 1; i <= snap.meta.count(); ++i) {
                IsqReader in(t.wd.source(FileKind::Matrix, i));
                while (std::optional<IsqRecord> rec = in.next()) {
                    if (rec->kind == IsqRecord::Kind::Branch && rec->index < 0) {
                        rc.structure_failures.push_back(
                            tag + ": preliminary index survived in partition " +
                            std::to_string(i));
                        break;
                    }
                }
            }

            if (er.peak_resident_states > er.n_max + er.c_max + kResidencySlack)
                rc.residency_failures.push_back(
                    tag + ": " + std::to_string(er.peak_resident_states) +
                    " resident states, bound " + std::to_string(er.n_max) + " + " +
                    std::to_string(er.c_max) + " + " + std::to_string(kResidencySlack));

            for (const char* pname : {"pmax", "pmin", "rmax", "rmin"}) {
                const PropertyDecl& prop = testutil::property_of(m, pname);
                double want = testutil::reference_value(m, prop, 1e-8);
                testutil::TempWorkdir u;
                double got = testutil::run_check(m, u.wd, prop, 1e-8).analysis.value;
                ++rc.comparisons;
                if (prop.kind == PropertyKind::Probability) {
                    double delta = std::abs(got - want);
                    if (!(delta <= 1e-6)) {
                        rc.value_failures.push_back(tag + " " + pname + ": partitioned " +
                                                    fmt(got) + ", reference " + fmt(want));
                    } else {
                        rc.max_probability_delta = std::max(rc.max_probability_delta, delta);
                    }
                } else if (!testutil::values_match(got, want, 1e-6)) {
                    rc.value_failures.push_back(tag + " " + pname + ": partitioned " + fmt(got) +
                                                ", reference " + fmt(want));
                }
            }
            ++rc.models;
        } catch (const std::exception& e) {
            std::string what = tag + ": " + e.what();
            rc.value_failures.push_back(what);
            rc.structure_failures.push_back(what);
            rc.residency_failures.push_back(what);
        }
    }
    return rc;
}

struct Criterion {
    std::string what;                  // printed on the status line
    std::vector<std::string> failures; // empty means pass
    std::string note;                  // extra detail for a pass

    void fail(std::string detail) { failures.push_back(std::move(detail)); }
    void expect(bool ok, const std::string& detail) {
        if (!ok)
            fail(detail);
    }
};

void c1_value_equivalence(Criterion& c) {
    RandomCorpus& rc = random_corpus();
    c.failures = rc.value_failures;
    c.note = std::to_string(rc.models) + " models, " + std::to_string(rc.comparisons) +
             " properties, max probability delta " + fmt(rc.max_probability_delta);
}

void c2_exploration_equivalence(Criterion& c) {
    RandomCorpus& rc = random_corpus();
    c.failures = rc.structure_failures;
    c.note = std::to_string(rc.models) + " models, " + std::to_string(rc.states_total) +
             " states matched against breadth-first search";
}

void c3_exact_values(Criterion& c) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    struct Exact {
        std::string name;
        std::string model;
        const char* property;
        double expected;
        double tolerance;
    };
    for (const Exact& e : std::vector<Exact>{
             {"die", die_model(), "six", 1.0 / 6.0, 1e-6},
             {"die", die_model(), "six_min", 1.0 / 6.0, 1e-6},
             {"coin", coin_model(), "heads", 0.5, 1e-8},
             {"geometric", geometric_model(), "tries", 2.0, 1e-6},
             {"infinite", infinite_model(), "cost", kInf, 0.0},
         }) {
        TypedModel m = testutil::compile_model(e.model);
        testutil::TempWorkdir t;
        double got =
            testutil::run_check(m, t.wd, testutil::property_of(m, e.property), 1e-8)
                .analysis.value;
        if (std::isinf(e.expected))
            c.expect(std::isinf(got) && got > 0,
                     e.name + "/" + e.property + ": expected infinity, got " + fmt(got));
        else
            c.expect(std::abs(got - e.expected) <= e.tolerance,
                     e.name + "/" + e.property + ": expected " + fmt(e.expected) + ", got " +
                         fmt(got));
    }
    c.note = "die 1/6, coin 1/2, geometric 2, infinite reward unbounded";
}

void c4_iteration_laws(Criterion& c) {
    struct Law {
        std::string name;
        std::string model;
        const char* property;
    };
    for (const Law& l : std::vector<Law>{{"coin", coin_model(), "heads"},
                                         {"geometric", geometric_model(), "tries"},
                                         {"brp(16,3)", brp_model(16, 3), "all_sent"}}) {
        TypedModel m = testutil::compile_model(l.model);
        testutil::TempWorkdir t;
        CheckResult res =
            testutil::run_check(m, t.wd, testutil::property_of(m, l.property), 1e-8);
        c.expect(res.exploration.outer_iterations == 2,
                 l.name + ": exploration took " +
                     std::to_string(res.exploration.outer_iterations) +
                     " outer iterations, the forward-acyclic law says 2");
        c.expect(res.analysis.outer_iterations == 1,
                 l.name + ": analysis took " + std::to_string(res.analysis.outer_iterations) +
                     " outer iterations, the forward-acyclic law says 1");
    }
    c.note = "explore outer = 2 and check outer = 1 on every counter-partitioned model";
}

void c5_format_laws(Criterion& c) {
    testutil::TempDir dir;
    IoStats stats;
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> prob(0.0, 1.0);
    std::uniform_real_distribution<double> reward(-1000.0, 1000.0);

    // Free-form record stream: every tag sequence must survive the codec,
    // preliminary (negative) indices included.
    std::vector<IsqRecord> records;
    records.reserve(120000);
    for (int k = 0; k < 120000; ++k) {
        switch (rng() % 4) {
        case 0:
        case 1:
            records.push_back(IsqRecord::branch(prob(rng), reward(rng),
                                                static_cast<int32_t>(1 + rng() % 64),
                                                static_cast<int32_t>(rng() % 10001) - 5000));
            break;
        case 2: records.push_back(IsqRecord::transition_end()); break;
        default: records.push_back(IsqRecord::state_end(rng() % 2 == 0)); break;
        }
    }
    fs::path stream = dir.path / "stream";
    uint64_t expected_size = 0;
    {
        IsqWriter out(std::make_unique<FileSink>(stream, OpenMode::Truncate, stats));
        for (const IsqRecord& rec : records)
            out.append(rec);
        out.close();
        expected_size = isq_stream_bytes(out.branches(), out.transitions(), out.states());
    }
    c.expect(fs::file_size(stream) == expected_size,
             "stream is " + std::to_string(fs::file_size(stream)) + " bytes, size law says " +
                 std::to_string(expected_size));
    {
        IsqReader in(std::make_unique<FileSource>(stream, stats));
        size_t k = 0;
        while (std::optional<IsqRecord> rec = in.next()) {
            if (k >= records.size() || !(*rec == records[k])) {
                c.fail("decoded record " + std::to_string(k) + " differs");
                break;
            }
            ++k;
        }
        c.expect(k == records.size(), "decoded " + std::to_string(k) + " of " +
                                          std::to_string(records.size()) + " records");
    }

    // Well-formed partition images: load/store must be a byte identity and
    // the loader's accounting must land on 12/8/24 bytes per entry.
    uint64_t images = 0, image_records = 0;
    for (int iter = 0; iter < 50; ++iter) {
        fs::path a = dir.path / ("image" + std::to_string(iter));
        fs::path b = dir.path / ("copy" + std::to_string(iter));
        uint64_t states = 0, transitions = 0, branches = 0;
        {
            IsqWriter out(std::make_unique<FileSink>(a, OpenMode::Truncate, stats));
            uint64_t ns = 1 + rng() % 60;
            for (uint64_t s = 0; s < ns; ++s) {
                uint64_t nt = rng() % 4;
                for (uint64_t t = 0; t < nt; ++t) {
                    uint64_t nb = 1 + rng() % 3;
                    for (uint64_t bb = 0; bb < nb; ++bb) {
                        out.branch(prob(rng), reward(rng), static_cast<int32_t>(1 + rng() % 8),
                                   static_cast<int32_t>(rng() % 1000));
                        ++branches;
                    }
                    out.transition_end();
                    ++transitions;
                }
                out.state_end(rng() % 2 == 0);
                ++states;
            }
            out.close();
        }
        RandomAccessPartition rap =
            load_partition(std::make_unique<FileSource>(a, stats));
        uint64_t want = 12 * states + 8 * transitions + 24 * branches;
        c.expect(rap.memory_bytes() == want,
                 "image " + std::to_string(iter) + ": loader accounts " +
                     std::to_string(rap.memory_bytes()) + " bytes, layout says " +
                     std::to_string(want));
        {
            IsqWriter out(std::make_unique<FileSink>(b, OpenMode::Truncate, stats));
            store_partition(rap, out);
            out.close();
        }
        c.expect(file_bytes(a) == file_bytes(b),
                 "image " + std::to_string(iter) + ": store(load(s)) is not s");
        ++images;
        image_records += states + transitions + branches;
    }
    c.note = std::to_string(records.size()) + "-record codec identity, exact size law, " +
             std::to_string(images) + " store/load image identities (" +
             std::to_string(image_records) + " records)";
}

void c6_compression(Criterion& c) {
    TypedModel m = testutil::compile_model(brp_model(200, 499));
    const PropertyDecl& prop = testutil::property_of(m, "sends");
    testutil::TempWorkdir plain(false);
    testutil::TempWorkdir packed(true);
    CheckResult p = testutil::run_check(m, plain.wd, prop, 1e-6);
    CheckResult z = testutil::run_check(m, packed.wd, prop, 1e-6);

    c.expect(p.exploration.states_total >= 100000,
             "protocol model has only " + std::to_string(p.exploration.states_total) +
                 " states, wanted at least 100000");
    c.expect(p.exploration.matrix_bytes_raw == z.exploration.matrix_bytes_raw,
             "raw matrix bytes differ between the runs");
    c.expect(2 * z.exploration.matrix_bytes_disk <= z.exploration.matrix_bytes_raw,
             "compressed matrices take " + std::to_string(z.exploration.matrix_bytes_disk) +
                 " of " + std::to_string(z.exploration.matrix_bytes_raw) +
                 " raw bytes, wanted at most half");
    c.expect(std::bit_cast<uint64_t>(p.analysis.value) ==
                 std::bit_cast<uint64_t>(z.analysis.value),
             "values differ bitwise: plain " + fmt(p.analysis.value) + ", compressed " +
                 fmt(z.analysis.value));

    WorkdirMeta meta = read_meta(plain.wd);
    for (uint32_t i = 1; i <= meta.count(); ++i) {
        std::vector<double> a = read_all_f64(*plain.wd.source(FileKind::Values, i), "values");
        std::vector<double> b = read_all_f64(*packed.wd.source(FileKind::Values, i), "values");
        bool same = a.size() == b.size();
        for (size_t k = 0; same && k < a.size(); ++k)
            same = std::bit_cast<uint64_t>(a[k]) == std::bit_cast<uint64_t>(b[k]);
        c.expect(same, "values file of partition " + std::to_string(i) +
                           " differs between plain and compressed runs");
    }

    double ratio = z.exploration.matrix_bytes_raw == 0
                       ? 0.0
                       : static_cast<double>(z.exploration.matrix_bytes_disk) /
                             static_cast<double>(z.exploration.matrix_bytes_raw);
    c.note = std::to_string(p.exploration.states_total) + " states, disk/raw ratio " +
             fmt(ratio) + ", plain and compressed answers bitwise equal";
}

void c7_sequential_io(Criterion& c) {
    struct Run {
        std::string name;
        std::string model;
        const char* property;
    };
    uint64_t files = 0, read = 0, written = 0;
    for (const Run& r : std::vector<Run>{{"die", die_model(), "six"},
                                         {"consensus(2)", consensus_model(2), "win"},
                                         {"brp(16,3)", brp_model(16, 3), "sends"}}) {
        for (bool compress : {false, true}) {
            TypedModel m = testutil::compile_model(r.model);
            testutil::TempWorkdir t(compress);
            testutil::run_check(m, t.wd, testutil::property_of(m, r.property), 1e-8);
            IoStats stats = t.wd.total_stats();
            c.expect(stats.backward_seeks == 0,
                     r.name + (compress ? " compressed" : " plain") + ": " +
                         std::to_string(stats.backward_seeks) + " backward seeks");
            files += stats.files_opened;
            read += stats.bytes_read;
            written += stats.bytes_written;
        }
    }
    c.note = "0 backward seeks over 6 full runs (" + std::to_string(files) +
             " file opens, " + std::to_string(read) + " bytes read, " +
             std::to_string(written) + " written)";
}

void c8_residency(Criterion& c) {
    for (const CorpusCase& cc : builtin_corpus()) {
        TypedModel m = testutil::compile_model(cc.model);
        PartitionDecl part = type_check_partition(m, *m.partition);
        const PropertyDecl& prop = testutil::property_of(m, cc.property);
        testutil::TempWorkdir t;
        ExplorationReport er = explore(m, part, *prop.target, t.wd);
        c.expect(er.peak_resident_states <= er.n_max + er.c_max + kResidencySlack,
                 cc.name + ": " + std::to_string(er.peak_resident_states) +
                     " resident states, bound " + std::to_string(er.n_max) + " + " +
                     std::to_string(er.c_max) + " + " + std::to_string(kResidencySlack));
    }
    RandomCorpus& rc = random_corpus();
    for (const std::string& f : rc.residency_failures)
        c.fail(f);
    c.note = "peak resident states within n_max + c_max + " +
             std::to_string(kResidencySlack) + " on the built-in corpus and " +
             std::to_string(rc.models) + " random models";
}

void c9_monotone_sweeps(Criterion& c) {
    uint64_t sweeps = 0;
    for (const CorpusCase& cc : builtin_corpus()) {
        TypedModel m = testutil::compile_model(cc.model);
        const PropertyDecl& prop = testutil::property_of(m, cc.property);
        PartitionDecl part = type_check_partition(m, *m.partition);

        testutil::MonotonicObserver partitioned;
        ConvergenceConfig cfg;
        cfg.epsilon = 1e-8;
        cfg.sweep_observer = partitioned.hook();
        testutil::TempWorkdir t;
        check(m, part, prop, t.wd, cfg);
        c.expect(!partitioned.violation,
                 cc.name + " partitioned: " + partitioned.violation.value_or(""));

        testutil::MonotonicObserver reference;
        ConvergenceConfig rcfg;
        rcfg.epsilon = 1e-8;
        rcfg.sweep_observer = reference.hook();
        InMemoryMdp mdp = build_in_memory(m, *prop.target);
        if (prop.kind == PropertyKind::Probability)
            value_iteration_reference(mdp, prop.direction, rcfg);
        else
            expected_reward_reference(mdp, prop.direction, rcfg);
        c.expect(!reference.violation,
                 cc.name + " reference: " + reference.violation.value_or(""));
        sweeps += partitioned.calls + reference.calls;
    }
    c.note = "no componentwise decrease in " + std::to_string(sweeps) +
             " observed sweeps across both engines";
}

} // namespace

int main() {
    struct Entry {
        const char* id;
        const char* what;
        std::function<void(Criterion&)> run;
    };
    const std::vector<Entry> entries = {
        {"C1", "partitioned values match the in-memory reference on random models",
         c1_value_equivalence},
        {"C2", "partitioned exploration matches breadth-first search, no preliminary indices",
         c2_exploration_equivalence},
        {"C3", "closed-form corpus values are hit exactly", c3_exact_values},
        {"C4", "forward-acyclic iteration counts", c4_iteration_laws},
        {"C5", "record codec and partition image round-trips, exact size laws",
         c5_format_laws},
        {"C6", "compression halves the matrix footprint without changing the answer",
         c6_compression},
        {"C7", "every file is read and written strictly forward", c7_sequential_io},
        {"C8", "exploration keeps at most one partition plus one queue in memory",
         c8_residency},
        {"C9", "value iteration sweeps never decrease a component", c9_monotone_sweeps},
    };

    int failed = 0;
    for (const Entry& entry : entries) {
        Criterion crit;
        crit.what = entry.what;
        auto start = std::chrono::steady_clock::now();
        try {
            entry.run(crit);
        } catch (const std::exception& e) {
            crit.fail(std::string("unhandled exception: ") + e.what());
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count();
        std::ostringstream line;
        if (crit.failures.empty()) {
            line << "[PASS] " << entry.id << ": " << crit.what;
            if (!crit.note.empty())
                line << " (" << crit.note << ")";
        } else {
            ++failed;
            line << "[FAIL] " << entry.id << ": " << crit.what << " (" << crit.failures.size()
                 << " violations)";
        }
        line << " [" << fmt(seconds) << "s]";
        std::cout << line.str() << "\n";
        size_t shown = 0;
        for (const std::string& f : crit.failures) {
            if (shown++ == 5) {
                std::cout << "       ... " << crit.failures.size() - 5 << " more\n";
                break;
            }
            std::cout << "       " << f << "\n";
        }
        std::cout.flush();
    }

    if (failed == 0) {
        std::cout << "acceptance: all " << entries.size() << " criteria hold\n";
        return 0;
    }
    std::cout << "acceptance: " << failed << " of " << entries.size() << " criteria failed\n";
    return 1;
}
