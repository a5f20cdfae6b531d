#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "soalens/bench.hpp"
#include "soalens/emit.hpp"

namespace soalens {

namespace {

const FunctionDef& entry_function(const SourceUnit& unit, const std::string& entry) {
    for (const auto& f : unit.functions)
        if (f.name == entry) return f;
    throw Error("no function named '" + entry + "'");
}

std::string fill_expr(ScalarKind k) {
    switch (k) {
        case ScalarKind::Float64: return "soalens_unit()";
        case ScalarKind::Float32: return "(float)soalens_unit()";
        case ScalarKind::Bool: return "(bool)(soalens_next() & 1u)";
        case ScalarKind::Int32: return "(int32_t)(soalens_next() % 2001u) - 1000";
        case ScalarKind::Int64: return "(int64_t)(soalens_next() % 2001u) - 1000";
    }
    return "0";
}

}  // namespace

std::string native_driver(const SourceUnit& lowered, const std::string& entry, std::size_t n, std::size_t samples,
                          std::uint64_t seed) {
    const FunctionDef& fn = entry_function(lowered, entry);
    EmitConfig config;
    config.dialect = Dialect::C99;
    std::ostringstream os;
    os << "#define _POSIX_C_SOURCE 199309L\n#include <stdio.h>\n#include <time.h>\n";
    os << emit(lowered, config);
    os << "\nstatic uint64_t soalens_state = " << seed * 0x9E3779B97F4A7C15ull + 1 << "ull;\n"
       << "static uint64_t soalens_next(void) {\n"
       << "    soalens_state ^= soalens_state << 13;\n"
       << "    soalens_state ^= soalens_state >> 7;\n"
       << "    soalens_state ^= soalens_state << 17;\n"
       << "    return soalens_state;\n}\n"
       << "static double soalens_unit(void) { return 2.0 * ((double)(soalens_next() >> 11) * 0x1.0p-53) - 1.0; }\n";

    os << "\nint main(void) {\n    const int64_t n = " << n << ";\n";
    std::vector<std::string> args;
    for (const auto& p : fn.params) {
        if (p.type.pointer) {
            std::string t = p.type.kind == Type::Kind::Record ? p.type.record
                                                              : (p.type.scalar == ScalarKind::Float64 ? "double" : "int64_t");
            os << "    " << t << " *" << p.name << " = (" << t << " *)malloc(sizeof(" << t << ") * (size_t)n + 1);\n";
            args.push_back(p.name);
        } else if (p.type.is_scalar()) {
            args.push_back(is_floating(p.type.scalar) ? "0.001" : p.type.scalar == ScalarKind::Bool ? "true" : "n");
        } else {
            throw Error("native driver cannot bind parameter '" + p.name + "'");
        }
    }
    os << "    for (size_t s = 0; s < " << samples << "; s++) {\n";
    for (const auto& p : fn.params) {
        if (!p.type.pointer) continue;
        Type element = p.type.element();
        auto kinds = leaf_kinds(element, lowered);
        auto suffixes = leaf_suffixes(element, lowered);
        os << "        for (int64_t i = 0; i < n; i++) {\n";
        for (std::size_t l = 0; l < kinds.size(); ++l)
            os << "            " << p.name << "[i]" << suffixes[l] << " = " << fill_expr(kinds[l]) << ";\n";
        os << "        }\n";
    }
    os << "        struct timespec t0, t1;\n        clock_gettime(CLOCK_MONOTONIC, &t0);\n        " << entry << '(';
    for (std::size_t i = 0; i < args.size(); ++i) os << (i ? ", " : "") << args[i];
    os << ");\n        clock_gettime(CLOCK_MONOTONIC, &t1);\n"
       << "        printf(\"%.9f\\n\", (double)(t1.tv_sec - t0.tv_sec) + 1e-9 * (double)(t1.tv_nsec - t0.tv_nsec));\n"
       << "    }\n    return 0;\n}\n";
    return os.str();
}

std::vector<double> run_native(const std::string& cc, const SourceUnit& lowered, const std::string& entry,
                               std::size_t n, std::size_t samples, std::uint64_t seed) {
    if (cc.empty()) throw ToolchainError("native mode requested but no compiler is configured");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::path dir = fs::temp_directory_path(ec);
    if (ec) throw ToolchainError("no temporary directory: " + ec.message());
    dir /= "soalens-native-" + std::to_string(std::random_device{}());
    fs::create_directories(dir, ec);
    if (ec) throw ToolchainError("cannot create " + dir.string() + ": " + ec.message());
    fs::path src = dir / (entry + ".c");
    fs::path exe = dir / entry;
    {
        std::ofstream out(src);
        out << native_driver(lowered, entry, n, samples, seed);
        if (!out) throw ToolchainError("cannot write " + src.string());
    }
    std::string cmd = cc + " -O2 -std=c99 -o '" + exe.string() + "' '" + src.string() + "' -lm 2>&1";
    std::string log;
    if (FILE* p = popen(cmd.c_str(), "r")) {
        char buf[512];
        while (fgets(buf, sizeof buf, p)) log += buf;
        if (pclose(p) != 0) {
            fs::remove_all(dir, ec);
            throw ToolchainError("native compile failed (" + cmd + "):\n" + log);
        }
    } else {
        throw ToolchainError("cannot run " + cc);
    }
    std::vector<double> times;
    std::string run_cmd = "'" + exe.string() + "'";
    FILE* p = popen(run_cmd.c_str(), "r");
    if (!p) throw ToolchainError("cannot run " + exe.string());
    char buf[128];
    while (fgets(buf, sizeof buf, p)) times.push_back(std::strtod(buf, nullptr));
    int status = pclose(p);
    fs::remove_all(dir, ec);
    if (status != 0 || times.size() != samples) throw ToolchainError("native benchmark for '" + entry + "' failed");
    return times;
}

}  // namespace soalens
