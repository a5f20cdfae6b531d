#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "soalens/bench.hpp"
#include "soalens/cli.hpp"
#include "soalens/emit.hpp"
#include "soalens/frontend.hpp"
#include "soalens/interp.hpp"
#include "soalens/semantics.hpp"
#include "soalens/transform.hpp"

namespace soalens {

namespace {

class VerificationFailed : public Error {
public:
    using Error::Error;
};

class Usage : public Error {
public:
    using Error::Error;
};

// "0..15" or "1,4,9" or a mix: "0..3,8".
template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string part;
    auto number = [&](const std::string& s) {
        T v{};
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty())
            throw Usage(std::string("bad ") + what + " '" + text + "'");
        return v;
    };
    while (std::getline(ss, part, ',')) {
        auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(number(part));
            continue;
        }
        T lo = number(part.substr(0, dots)), hi = number(part.substr(dots + 2));
        if (hi < lo) throw Usage(std::string("empty ") + what + " range '" + part + "'");
        for (T v = lo; v <= hi; ++v) out.push_back(v);
    }
    if (out.empty()) throw Usage(std::string("empty ") + what + " list");
    return out;
}

std::vector<BenchMode> parse_modes(const std::string& text) {
    std::vector<BenchMode> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part == "all") {
            out.assign(std::begin(kAllModes), std::end(kAllModes));
            continue;
        }
        auto m = parse_mode(part);
        if (!m) throw Usage("unknown mode '" + part + "' (aos, soa-full, soa-views)");
        out.push_back(*m);
    }
    return out;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw IoError("cannot write " + path);
}

std::string timestamp_line() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << "# generated " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
    return os.str();
}

// Parse + analyze; diagnostics raise SemanticError.
SourceUnit load_checked(const std::string& path) {
    SourceUnit u = parse_file(path);
    Analysis a = analyze(u);
    if (!a.ok()) throw SemanticError(a.diagnostics, path);
    return u;
}

std::vector<std::string> minic_files(const std::vector<std::string>& paths) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto& p : paths) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<std::string> found;
            for (const auto& e : fs::recursive_directory_iterator(p, ec))
                if (e.is_regular_file() && e.path().extension() == ".minic") found.push_back(e.path().string());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(p);
        }
    }
    if (files.empty()) throw IoError("no .minic files found");
    return files;
}

struct Options {
    // shared
    bool no_conversion = false;
    bool dump_rewritten = false;
    bool safe_outputs = false;
    bool timestamps = false;
    std::string output;
    std::string dialect = "minic";
    bool no_annotate = false;
    bool diff = false;
    std::vector<std::string> inputs;
    // check / run / bench
    std::string seeds = "0..15";
    std::string sizes;
    std::string modes;
    std::string entry;
    std::string store;
    std::string against;
    std::string poison = "check";
    bool print_store = false;
    std::uint64_t seed = 0;
    std::size_t samples = 16;
    std::string kernels;
    std::string csv;
    std::string native_cc;
};

EmitConfig emit_config(const Options& o) {
    EmitConfig c;
    c.dialect = o.dialect == "c99" ? Dialect::C99 : Dialect::MiniC;
    c.annotate = !o.no_annotate;
    return c;
}

SourceUnit lower(const SourceUnit& u, const Options& o) {
    if (o.no_conversion) return strip(u);
    TransformOptions t;
    t.safe_outputs = o.safe_outputs;
    return transform(u, t).unit;
}

int cmd_transform(const Options& o, std::ostream& out) {
    const std::string& path = o.inputs.at(0);
    SourceUnit u = load_checked(path);
    SourceUnit lowered = lower(u, o);
    std::string text = emit(lowered, emit_config(o));
    if (o.diff) {
        EmitConfig plain = emit_config(o);
        out << diff_report(emit(u, plain), text, path, o.output.empty() ? "transformed" : o.output);
        return kExitOk;
    }
    if (o.output.empty()) {
        out << text;
        return kExitOk;
    }
    write_output(o.output, text, out);
    if (o.dump_rewritten) out << text;
    return kExitOk;
}

int cmd_strip(const Options& o, std::ostream& out) {
    SourceUnit u = parse_file(o.inputs.at(0));
    std::string text = emit(strip(u), emit_config(o));
    write_output(o.output, text, out);
    if (o.dump_rewritten && !o.output.empty()) out << text;
    return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
    auto seeds = parse_list<std::uint64_t>(o.seeds, "seed");
    if (o.timestamps) out << timestamp_line();
    if (o.inputs.empty()) {
        VerifyOptions v;
        v.seeds = seeds;
        if (!o.sizes.empty()) v.sizes = parse_list<std::size_t>(o.sizes, "size");
        if (!o.modes.empty()) v.modes = parse_modes(o.modes);
        VerifyTable t = verify_all(build_corpus(), v);
        out << format_verify(t);
        if (!t.all_pass()) throw VerificationFailed("differential check failed");
        return kExitOk;
    }
    std::vector<std::size_t> sizes =
        o.sizes.empty() ? std::vector<std::size_t>{0, 1, 2, 64, 256} : parse_list<std::size_t>(o.sizes, "size");
    auto files = minic_files(o.inputs);
    if (!o.against.empty() && files.size() != 1) throw Usage("--against needs exactly one input file");
    std::size_t checks = 0, failures = 0;
    for (const auto& file : files) {
        SourceUnit u = load_checked(file);
        SourceUnit transformed = o.against.empty() ? lower(u, o) : parse_file(o.against);
        std::vector<std::string> entries;
        if (!o.entry.empty()) {
            entries.push_back(o.entry);
        } else {
            for (const auto& spec : analyze(u).specs)
                if (std::find(entries.begin(), entries.end(), spec.function) == entries.end())
                    entries.push_back(spec.function);
        }
        for (const auto& entry : entries) {
            std::size_t pass = 0, total = 0;
            std::string first_failure;
            for (std::size_t n : sizes)
                for (std::uint64_t seed : seeds) {
                    ++total;
                    try {
                        Verdict v = differential_check(u, transformed, entry, seed, n);
                        if (v.pass) {
                            ++pass;
                        } else if (first_failure.empty()) {
                            first_failure = "seed=" + std::to_string(seed) + " n=" + std::to_string(n);
                            if (!v.mismatches.empty())
                                first_failure += ": " + v.mismatches[0].key + " expected " + v.mismatches[0].expected +
                                                 ", got " + v.mismatches[0].actual;
                        }
                    } catch (const OracleError& e) {
                        if (first_failure.empty())
                            first_failure = "seed=" + std::to_string(seed) + " n=" + std::to_string(n) + ": " + e.what();
                    }
                }
            checks += total;
            failures += total - pass;
            out << std::left << std::setw(28) << (file + ":" + entry) << ' ' << pass << '/' << total
                << (pass == total ? "  pass" : "  FAIL") << '\n';
            if (!first_failure.empty()) out << "  " << first_failure << '\n';
        }
    }
    out << (failures == 0 ? "all pass" : std::to_string(failures) + " failing") << " (" << checks << " checks)\n";
    if (failures) throw VerificationFailed("differential check failed");
    return kExitOk;
}

int cmd_run(const Options& o, std::ostream& out) {
    const std::string& path = o.inputs.at(0);
    SourceUnit u = load_checked(path);
    SourceUnit lowered = lower(u, o);
    std::string entry = o.entry;
    if (entry.empty()) {
        if (u.functions.size() != 1) throw Usage("--entry is required when the file has several functions");
        entry = u.functions[0].name;
    }
    RuntimeStore store;
    if (!o.store.empty())
        store = store_from_text(read_text_file(o.store), u);
    else
        store = seed_entry_store(u, entry, o.sizes.empty() ? 16 : parse_list<std::size_t>(o.sizes, "size")[0], o.seed);
    InterpOptions io;
    if (o.poison == "run")
        io.mode = PoisonMode::Run;
    else if (o.poison != "check")
        throw Usage("--poison must be check or run");
    if (o.dump_rewritten) out << emit(lowered, emit_config(o));
    RunResult r = run(lowered, entry, std::move(store), io);
    std::ostringstream stats;
    stats << "statements=" << r.stats.statements << " prologue_copies=" << r.stats.prologue_copies
          << " epilogue_copies=" << r.stats.epilogue_copies << " peak_temp_bytes=" << r.stats.peak_temp_bytes << '\n';
    std::string text = store_to_text(r.store, u);
    if (!o.output.empty()) write_output(o.output, text, out);
    if (o.print_store) out << text;
    out << stats.str();
    return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
    BenchOptions b;
    if (!o.sizes.empty()) b.sizes = parse_list<std::size_t>(o.sizes, "size");
    if (!o.modes.empty()) b.modes = parse_modes(o.modes);
    b.samples = o.samples;
    b.seed = o.seed;
    if (!o.kernels.empty()) {
        std::stringstream ss(o.kernels);
        std::string k;
        while (std::getline(ss, k, ',')) b.kernels.push_back(k);
    }
    if (!o.native_cc.empty()) b.native_cc = o.native_cc;
    auto corpus = build_corpus();
    VerifyOptions v;
    v.seeds = {o.seed};
    v.sizes = {2, 16};
    VerifyTable t = verify_all(corpus, v);
    if (!t.all_pass()) {
        out << format_verify(t);
        throw VerificationFailed("corpus failed verification; not benchmarking");
    }
    BenchReport r = bench_all(corpus, b);
    if (o.timestamps) out << timestamp_line();
    out << format_report(r);
    if (!b.native_cc) out << '\n' << format_conversion(r);
    if (!o.csv.empty()) write_output(o.csv, format_csv(r), out);
    return kExitOk;
}

int cmd_inspect(const Options& o, std::ostream& out) {
    const std::string& path = o.inputs.at(0);
    SourceUnit u = parse_file(path);
    Analysis a = analyze(u);
    for (const auto& d : a.diagnostics) out << d.format(path) << '\n';
    for (const auto& spec : a.specs) {
        auto names = [](const std::vector<std::string>& v) {
            std::string s = "{";
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
            return s + "}";
        };
        out << spec.function << " loop " << spec.loop_ordinal << ' '
            << (spec.direction == Direction::AosToSoa ? "aos_to_soa" : "soa_to_aos") << ' ' << spec.target << " : "
            << spec.layout.record << " (" << spec.layout.record_size << " bytes)\n";
        out << "  A = " << names(spec.inputs) << "\n  Â = " << names(spec.outputs) << '\n';
        out << "  size = " << emit_expr(spec.size_expr);
        if (spec.start_idx) out << ", start = " << emit_expr(*spec.start_idx);
        out << "\n  footprint = " << view_footprint(spec, 1) << " bytes per element (record "
            << spec.layout.record_size << ")\n";
        out << "  leaf                 offset size  A Â\n";
        for (std::size_t li = 0; li < spec.layout.leaves.size(); ++li) {
            if (!spec.in_union(li)) continue;
            const FieldLeaf& leaf = spec.layout.leaves[li];
            out << "  " << std::left << std::setw(20) << leaf.display() << ' ' << std::right << std::setw(6)
                << leaf.byte_offset << ' ' << std::setw(4) << leaf.byte_size << "  " << (spec.in_inputs(li) ? 'x' : '.')
                << ' ' << (spec.in_outputs(li) ? 'x' : '.') << '\n';
        }
    }
    return a.ok() ? kExitOk : kExitDiagnostics;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"soalens: annotation-driven AoS to SoA conversion for miniC"};
    app.set_config("--config", "", "key=value file mirroring the flags");
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_flag("--no-conversion", o.no_conversion, "ignore conversion annotations (strip them)");
        c->add_flag("--dump-rewritten", o.dump_rewritten, "also print the rewritten source to stdout");
        c->add_flag("--safe-outputs", o.safe_outputs, "prefill output-only fields in the prologue");
        c->add_flag("--timestamps", o.timestamps, "embed a timestamp in reports");
    };
    auto emit_flags = [&](CLI::App* c) {
        c->add_option("-o,--output", o.output, "output file");
        c->add_option("--dialect", o.dialect, "minic or c99")->check(CLI::IsMember({"minic", "c99"}));
        c->add_flag("--no-annotate", o.no_annotate, "omit provenance comments");
    };

    auto* transform_cmd = app.add_subcommand("transform", "rewrite annotated loops");
    transform_cmd->add_option("input", o.inputs, "source file")->required()->expected(1);
    common(transform_cmd);
    emit_flags(transform_cmd);
    transform_cmd->add_flag("--diff", o.diff, "print a unified diff instead of the source");

    auto* strip_cmd = app.add_subcommand("strip", "remove conversion annotations");
    strip_cmd->add_option("input", o.inputs, "source file")->required()->expected(1);
    common(strip_cmd);
    emit_flags(strip_cmd);

    auto* check_cmd = app.add_subcommand("check", "differential check of transformed against original");
    check_cmd->add_option("inputs", o.inputs, "files or directories (default: bundled corpus)");
    common(check_cmd);
    check_cmd->add_option("--seeds", o.seeds, "seed list, e.g. 0..15");
    check_cmd->add_option("--n", o.sizes, "element counts, e.g. 0,1,2,64,256");
    check_cmd->add_option("--modes", o.modes, "bundled corpus modes: soa-full,soa-views");
    check_cmd->add_option("--entry", o.entry, "entry function (default: every annotated function)");
    check_cmd->add_option("--against", o.against, "use this file as the transformed program");

    auto* run_cmd = app.add_subcommand("run", "interpret an entry function");
    run_cmd->add_option("input", o.inputs, "source file")->required()->expected(1);
    common(run_cmd);
    emit_flags(run_cmd);
    run_cmd->add_option("--entry", o.entry, "entry function");
    run_cmd->add_option("--store", o.store, "input store text (default: seeded)");
    run_cmd->add_option("--seed", o.seed, "seed for the generated store");
    run_cmd->add_option("--n", o.sizes, "element count for the generated store");
    run_cmd->add_option("--poison", o.poison, "check (trap) or run (read as zero)");
    run_cmd->add_flag("--print-store", o.print_store, "print the final store");

    auto* bench_cmd = app.add_subcommand("bench", "time the bundled kernels");
    common(bench_cmd);
    bench_cmd->add_option("--n", o.sizes, "particle counts, e.g. 1024,4096");
    bench_cmd->add_option("--samples", o.samples, "samples per cell");
    bench_cmd->add_option("--modes", o.modes, "aos,soa-full,soa-views");
    bench_cmd->add_option("--kernels", o.kernels, "comma-separated kernel names");
    bench_cmd->add_option("--seed", o.seed, "seed for the particle data");
    bench_cmd->add_option("--csv", o.csv, "write CSV here");
    bench_cmd->add_option("--native-cc", o.native_cc, "compile the c99 emission with this compiler");

    auto* inspect_cmd = app.add_subcommand("inspect", "print conversion specs and leaf tables");
    inspect_cmd->add_option("input", o.inputs, "source file")->required()->expected(1);
    common(inspect_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return kExitUsage;
    }

    try {
        if (*transform_cmd) return cmd_transform(o, out);
        if (*strip_cmd) return cmd_strip(o, out);
        if (*check_cmd) return cmd_check(o, out);
        if (*run_cmd) return cmd_run(o, out);
        if (*bench_cmd) return cmd_bench(o, out);
        if (*inspect_cmd) return cmd_inspect(o, out);
    } catch (const Usage& e) {
        err << "soalens: " << e.what() << '\n' << app.help();
        return kExitUsage;
    } catch (const VerificationFailed& e) {
        err << "soalens: " << e.what() << '\n';
        return kExitVerification;
    } catch (const IoError& e) {
        err << "soalens: " << e.what() << '\n';
        return kExitIo;
    } catch (const ToolchainError& e) {
        err << "soalens: " << e.what() << '\n';
        return kExitIo;
    } catch (const LocatedError& e) {
        err << e.what() << '\n';
        return kExitDiagnostics;
    } catch (const SemanticError& e) {
        err << e.what();
        return kExitDiagnostics;
    } catch (const RecursionError& e) {
        err << "soalens: error: " << e.what() << '\n';
        return kExitDiagnostics;
    } catch (const RuntimeError& e) {
        err << "soalens: runtime error: " << e.what() << '\n';
        return kExitVerification;
    } catch (const Error& e) {
        err << "soalens: " << e.what() << '\n';
        return kExitDiagnostics;
    }
    return kExitUsage;
}

}  // namespace soalens
