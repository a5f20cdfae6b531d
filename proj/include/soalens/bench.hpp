#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soalens/ast.hpp"
#include "soalens/interp.hpp"
#include "soalens/transform.hpp"

namespace soalens {

enum class Complexity : std::uint8_t { Linear, Quadratic };

// aos: annotations stripped. soa-full: A = Â = every field. soa-views: the
// per-kernel A and Â shipped in the corpus file.
enum class BenchMode : std::uint8_t { Aos, SoaFull, SoaViews };

std::string_view to_string(BenchMode mode);
std::optional<BenchMode> parse_mode(std::string_view text);
inline constexpr BenchMode kAllModes[] = {BenchMode::Aos, BenchMode::SoaFull, BenchMode::SoaViews};

struct KernelCase {
    std::string name;   // also the entry function
    std::string path;   // corpus/<name>.minic
    Complexity complexity = Complexity::Linear;
    std::vector<std::string> inputs;   // A
    std::vector<std::string> outputs;  // Â
    SourceUnit unit;                   // annotated as shipped
};

// The bundled kernels, in report order: density, force, kick1, kick2, drift.
std::vector<KernelCase> build_corpus();
// Raw text of a bundled corpus file by kernel name; empty if unknown.
std::string corpus_source(const std::string& name);

// Annotated unit for a mode (aos yields the stripped unit).
SourceUnit annotated_variant(const KernelCase& kernel, BenchMode mode);
// Unit actually executed for a mode: stripped for aos, transformed otherwise.
SourceUnit lowered_variant(const KernelCase& kernel, BenchMode mode, const TransformOptions& options = {});

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

struct VerifyCell {
    std::string kernel;
    BenchMode mode = BenchMode::SoaViews;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    bool pass = false;
    std::string detail;  // first mismatch or the error text
    RunStats stats;      // transformed side
};

struct VerifyTable {
    std::vector<VerifyCell> cells;
    [[nodiscard]] bool all_pass() const;
    [[nodiscard]] std::size_t failures() const;
};

struct VerifyOptions {
    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> sizes{0, 1, 2, 64, 256};
    std::vector<BenchMode> modes{BenchMode::SoaFull, BenchMode::SoaViews};
};

VerifyTable verify_all(const std::vector<KernelCase>& corpus, const VerifyOptions& options);
std::string format_verify(const VerifyTable& table);

// ---------------------------------------------------------------------------
// Timing
// ---------------------------------------------------------------------------

struct BenchRow {
    std::string kernel;
    BenchMode mode = BenchMode::Aos;
    std::size_t n = 0;
    std::size_t samples = 0;
    std::vector<double> times;  // seconds per sample
    double avg = 0, min = 0, max = 0;
    std::size_t min_index = 0, max_index = 0;
    double throughput = 0;  // updates/s (linear) or interactions/s (quadratic)
    double conversion_avg = 0;  // prologue + epilogue
    double body_avg = 0;
    bool native = false;
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

struct BenchOptions {
    std::vector<std::size_t> sizes{4096};
    std::size_t samples = 16;
    std::vector<BenchMode> modes{std::begin(kAllModes), std::end(kAllModes)};
    std::vector<std::string> kernels;  // empty: all
    std::uint64_t seed = 0;
    std::optional<std::string> native_cc;  // compile c99 emission with this command
};

BenchReport bench_all(const std::vector<KernelCase>& corpus, const BenchOptions& options);
// One timed interpreter run of a mode, returning its stats.
RunStats time_once(const KernelCase& kernel, BenchMode mode, std::size_t n, std::uint64_t seed);

// Text report: one block per (n, mode), a line per kernel.
std::string format_report(const BenchReport& report);
// kernel,mode,n,samples,avg,min,max,throughput
std::string format_csv(const BenchReport& report);
// Prologue+epilogue time against body time per row.
std::string format_conversion(const BenchReport& report);

// ---------------------------------------------------------------------------
// Native toolchain
// ---------------------------------------------------------------------------

// C99 translation unit with a main() that fills `n` particles from `seed`,
// runs the entry `samples` times and prints one wall time per line.
std::string native_driver(const SourceUnit& lowered, const std::string& entry, std::size_t n, std::size_t samples,
                          std::uint64_t seed);
// Compiles and runs the driver; ToolchainError if the compiler is missing or fails.
std::vector<double> run_native(const std::string& cc, const SourceUnit& lowered, const std::string& entry,
                               std::size_t n, std::size_t samples, std::uint64_t seed);

}  // namespace soalens
