#include "diskmc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <unistd.h>

#include <CLI11.hpp>

#include "diskmc/analyze.hpp"
#include "diskmc/corpus.hpp"
#include "diskmc/diagnostics.hpp"
#include "diskmc/explore.hpp"
#include "diskmc/isq.hpp"
#include "diskmc/semantics.hpp"

namespace fs = std::filesystem;

namespace diskmc {

namespace {

std::string fmt_value(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_seconds(double s) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", s);
    return buf;
}

// Either `key value` lines or prose, chosen by --format.
struct Printer {
    std::ostream& out;
    bool kv;

    void line(const std::string& key, const std::string& value, const std::string& prose) {
        if (kv)
            out << key << " " << value << "\n";
        else
            out << prose << "\n";
    }
};

struct CommonOpts {
    std::string model_path;
    std::string workdir;
    std::string property;
    std::string partition;
    std::string format = "text";
    double epsilon = 1e-6;
    uint64_t max_outer = 1u << 20;
    bool compress = false;
    bool force = false;
};

struct LoadedModel {
    ModelAst ast;
    TypedModel typed;
    PropertyDecl property;
    PartitionDecl partition;
};

[[noreturn]] void usage_fail(const std::string& message) {
    throw ModelError(message);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        usage_fail("cannot open model file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

LoadedModel load_model(const CommonOpts& opts) {
    std::string text = read_file(opts.model_path);
    ParseResult parsed = parse_model(text);
    if (!parsed.ast) {
        std::string msg;
        for (const Diagnostic& d : parsed.errors)
            msg += opts.model_path + ":" + d.to_string() + "\n";
        msg += "model has syntax errors";
        usage_fail(msg);
    }
    TypeCheckResult checked = type_check(*parsed.ast);
    if (!checked.model) {
        std::string msg;
        for (const Diagnostic& d : checked.errors)
            msg += opts.model_path + ":" + d.to_string() + "\n";
        msg += "model has type errors";
        usage_fail(msg);
    }
    LoadedModel loaded;
    loaded.typed = std::move(*checked.model);
    loaded.ast = std::move(*parsed.ast);

    if (!opts.property.empty()) {
        if (const PropertyDecl* named = loaded.typed.find_property(opts.property)) {
            loaded.property = type_check_property(loaded.typed, *named);
        } else {
            PropertyFragmentResult frag = parse_property_fragment(opts.property, loaded.ast);
            if (!frag.property) {
                std::string msg = "no property named '" + opts.property +
                                  "' in the model and the text does not parse as one:\n";
                for (const Diagnostic& d : frag.errors)
                    msg += "  " + d.to_string() + "\n";
                usage_fail(msg + "use Pmax/Pmin/Rmax/Rmin(<expr>)");
            }
            loaded.property = type_check_property(loaded.typed, *frag.property);
        }
    } else if (!loaded.typed.properties.empty()) {
        loaded.property = type_check_property(loaded.typed, loaded.typed.properties.front());
    } else {
        usage_fail("model declares no property; pass --property");
    }

    if (!opts.partition.empty()) {
        PartitionFragmentResult frag = parse_partition_fragment(opts.partition, loaded.ast);
        if (!frag.partition) {
            std::string msg = "--partition does not parse, expected '<expr> bound <k>':\n";
            for (const Diagnostic& d : frag.errors)
                msg += "  " + d.to_string() + "\n";
            usage_fail(msg);
        }
        loaded.partition = type_check_partition(loaded.typed, *frag.partition);
    } else if (loaded.typed.partition) {
        loaded.partition = type_check_partition(loaded.typed, *loaded.typed.partition);
    } else {
        PartitionDecl whole;
        whole.expr = Expr::make_literal(Value::of_int(1));
        whole.bound = 1;
        loaded.partition = type_check_partition(loaded.typed, whole);
    }
    return loaded;
}

void prepare_workdir(const std::string& dir, bool force) {
    if (dir.empty())
        usage_fail("--workdir is required");
    fs::create_directories(dir);
    if (fs::directory_iterator(dir) == fs::directory_iterator{})
        return;
    if (!force)
        usage_fail("workdir " + dir + " is not empty (pass --force to clear it)");
    for (const auto& entry : fs::directory_iterator(dir))
        fs::remove_all(entry.path());
}

void print_exploration(Printer& p, Workdir& wd, const ExplorationReport& r) {
    p.line("states_total", std::to_string(r.states_total),
           "explored " + std::to_string(r.states_total) + " states");
    p.line("p", std::to_string(r.partition_count),
           "partitions: " + std::to_string(r.partition_count));
    p.line("n_max", std::to_string(r.n_max),
           "largest partition: " + std::to_string(r.n_max) + " states");
    p.line("s_max", std::to_string(r.s_max),
           "largest successor set: " + std::to_string(r.s_max));
    p.line("c", std::to_string(r.cross_edges),
           "cross-partition branches: " + std::to_string(r.cross_edges));
    p.line("c_max", std::to_string(r.c_max),
           "most queue appends into one partition: " + std::to_string(r.c_max));
    p.line("outer_explore", std::to_string(r.outer_iterations),
           "exploration passes: " + std::to_string(r.outer_iterations));
    p.line("peak_resident_states", std::to_string(r.peak_resident_states),
           "peak resident states: " + std::to_string(r.peak_resident_states));
    p.line("matrix_bytes_raw", std::to_string(r.matrix_bytes_raw),
           "matrix bytes: " + std::to_string(r.matrix_bytes_raw));
    p.line("matrix_bytes_disk", std::to_string(r.matrix_bytes_disk),
           "matrix bytes on disk: " + std::to_string(r.matrix_bytes_disk));
    p.line("explore_seconds", fmt_seconds(r.seconds),
           "exploration took " + fmt_seconds(r.seconds) + "s");
    p.line("backward_seeks", std::to_string(wd.total_stats().backward_seeks),
           "backward seeks: " + std::to_string(wd.total_stats().backward_seeks));
}

int cmd_explore(const CommonOpts& opts, std::ostream& out) {
    LoadedModel m = load_model(opts);
    prepare_workdir(opts.workdir, opts.force);
    Workdir wd(opts.workdir, opts.compress);
    ExplorationReport report = explore(m.typed, m.partition, *m.property.target, wd);
    Printer p{out, opts.format == "kv"};
    print_exploration(p, wd, report);
    return 0;
}

int cmd_check(const CommonOpts& opts, std::ostream& out) {
    LoadedModel m = load_model(opts);
    prepare_workdir(opts.workdir, opts.force);
    Workdir wd(opts.workdir, opts.compress);
    ConvergenceConfig cfg;
    cfg.epsilon = opts.epsilon;
    cfg.max_outer_iterations = opts.max_outer;
    CheckResult result = check(m.typed, m.partition, m.property, wd, cfg);
    Printer p{out, opts.format == "kv"};
    print_exploration(p, wd, result.exploration);
    p.line("outer_check", std::to_string(result.analysis.outer_iterations),
           "value iteration passes: " + std::to_string(result.analysis.outer_iterations));
    p.line("inner_sweeps", std::to_string(result.analysis.inner_sweeps),
           "value iteration sweeps: " + std::to_string(result.analysis.inner_sweeps));
    p.line("value", fmt_value(result.analysis.value),
           m.property.name + " = " + fmt_value(result.analysis.value));
    p.line("check_seconds", fmt_seconds(result.analysis.seconds),
           "analysis took " + fmt_seconds(result.analysis.seconds) + "s");
    return 0;
}

int cmd_info(const CommonOpts& opts, std::ostream& out) {
    if (opts.workdir.empty())
        usage_fail("--workdir is required");
    if (!fs::exists(fs::path(opts.workdir) / "meta"))
        usage_fail("workdir " + opts.workdir + " has no meta table; explore into it first");
    Workdir wd(opts.workdir, false);
    WorkdirMeta meta = read_meta(wd);
    uint64_t branches = 0, transitions = 0, states = 0, disk = 0;
    for (uint32_t i = 1; i <= meta.count(); ++i) {
        IsqReader in(wd.source(FileKind::Matrix, i));
        uint64_t part_states = 0;
        while (auto rec = in.next()) {
            switch (rec->kind) {
            case IsqRecord::Kind::Branch: ++branches; break;
            case IsqRecord::Kind::TransitionEnd: ++transitions; break;
            case IsqRecord::Kind::StateEnd: ++states; ++part_states; break;
            }
        }
        if (part_states != meta.partitions[i - 1].state_count)
            throw FormatError("partition " + std::to_string(i) + " matrix holds " +
                              std::to_string(part_states) + " states, meta says " +
                              std::to_string(meta.partitions[i - 1].state_count));
        disk += wd.disk_bytes(FileKind::Matrix, i);
    }
    Printer p{out, opts.format == "kv"};
    p.line("states_total", std::to_string(meta.states_total()),
           "states: " + std::to_string(meta.states_total()));
    p.line("p", std::to_string(meta.count()), "partitions: " + std::to_string(meta.count()));
    p.line("n_max", std::to_string(meta.n_max()),
           "largest partition: " + std::to_string(meta.n_max()) + " states");
    p.line("s_max", std::to_string(meta.s_max()),
           "largest successor set: " + std::to_string(meta.s_max()));
    p.line("transitions", std::to_string(transitions),
           "transitions: " + std::to_string(transitions));
    p.line("branches", std::to_string(branches), "branches: " + std::to_string(branches));
    p.line("matrix_bytes_raw", std::to_string(isq_stream_bytes(branches, transitions, states)),
           "matrix bytes: " + std::to_string(isq_stream_bytes(branches, transitions, states)));
    p.line("matrix_bytes_disk", std::to_string(disk),
           "matrix bytes on disk: " + std::to_string(disk));
    if (!p.kv) {
        for (uint32_t i = 1; i <= meta.count(); ++i) {
            const PartitionMeta& pm = meta.partitions[i - 1];
            out << "partition " << i << ": " << pm.state_count << " states, successors {";
            for (size_t k = 0; k < pm.successors.size(); ++k)
                out << (k ? " " : "") << pm.successors[k];
            out << "}\n";
        }
    }
    return 0;
}

int cmd_selftest(std::ostream& out) {
    fs::path base = fs::temp_directory_path() /
                    ("diskmc-selftest-" + std::to_string(::getpid()));
    int failures = 0;
    std::vector<CorpusCase> cases = builtin_corpus();
    for (size_t n = 0; n < cases.size(); ++n) {
        const CorpusCase& c = cases[n];
        fs::path dir = base / std::to_string(n);
        fs::create_directories(dir);
        double value = std::numeric_limits<double>::quiet_NaN();
        std::string note;
        try {
            ParseResult parsed = parse_model(c.model);
            if (!parsed.ast)
                throw InternalCheckError("corpus model does not parse");
            TypeCheckResult checked = type_check(*parsed.ast);
            if (!checked.model)
                throw InternalCheckError("corpus model does not type-check");
            TypedModel& m = *checked.model;
            const PropertyDecl* named = m.find_property(c.property);
            if (!named || !m.partition)
                throw InternalCheckError("corpus model is missing its property or partition");
            PropertyDecl prop = type_check_property(m, *named);
            PartitionDecl part = type_check_partition(m, *m.partition);
            Workdir wd(dir, false);
            value = check(m, part, prop, wd, {}).analysis.value;
        } catch (const std::exception& e) {
            note = e.what();
        }
        bool ok;
        if (!note.empty())
            ok = false;
        else if (std::isinf(c.expected))
            ok = std::isinf(value) && value > 0;
        else
            ok = std::abs(value - c.expected) <= c.tolerance;
        out << (ok ? "[ ok ] " : "[fail] ") << c.name << " value=" << fmt_value(value)
            << " expected=" << fmt_value(c.expected);
        if (!note.empty())
            out << " error: " << note;
        out << "\n";
        failures += ok ? 0 : 1;
        fs::remove_all(dir);
    }
    fs::remove_all(base);
    out << (failures == 0 ? "selftest passed" : "selftest FAILED") << " (" << cases.size()
        << " cases)\n";
    return failures == 0 ? 0 : 1;
}

void add_model_options(CLI::App* sub, CommonOpts& opts, bool analysis) {
    sub->add_option("model", opts.model_path, "model file")->required();
    sub->add_option("--workdir", opts.workdir, "working directory for the partition files")
        ->required();
    sub->add_option("--property", opts.property,
                    "property name from the model, or an inline Pmax/Pmin/Rmax/Rmin(<expr>)");
    sub->add_option("--partition", opts.partition, "partitioning override: '<expr> bound <k>'");
    sub->add_flag("--compress", opts.compress, "compress the partition files");
    sub->add_flag("--force", opts.force, "clear a non-empty workdir first");
    sub->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"text", "kv"}));
    if (analysis) {
        sub->add_option("--epsilon", opts.epsilon, "relative convergence threshold")
            ->check(CLI::PositiveNumber);
        sub->add_option("--max-outer", opts.max_outer,
                        "abort value iteration after this many partition passes");
    }
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"out-of-core probabilistic model checker for Markov decision processes"};
    app.require_subcommand(1);
    CommonOpts opts;

    CLI::App* explore_cmd =
        app.add_subcommand("explore", "build the partitioned state space on disk");
    add_model_options(explore_cmd, opts, false);
    CLI::App* check_cmd =
        app.add_subcommand("check", "explore, then compute the property's value");
    add_model_options(check_cmd, opts, true);
    CLI::App* info_cmd = app.add_subcommand("info", "describe an explored workdir");
    info_cmd->add_option("--workdir", opts.workdir, "explored working directory")->required();
    info_cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"text", "kv"}));
    CLI::App* selftest_cmd =
        app.add_subcommand("selftest", "run the built-in corpus against its known values");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << "\n";
        err << app.help();
        return 2;
    }

    try {
        if (explore_cmd->parsed())
            return cmd_explore(opts, out);
        if (check_cmd->parsed())
            return cmd_check(opts, out);
        if (info_cmd->parsed())
            return cmd_info(opts, out);
        if (selftest_cmd->parsed())
            return cmd_selftest(out);
        err << "error: no subcommand\n";
        return 2;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "failed: " << e.what() << "\n";
        return 1;
    }
}

} // namespace diskmc
