#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "soalens/ast.hpp"
#include "soalens/semantics.hpp"

namespace soalens {

// ---------------------------------------------------------------------------
// Runtime errors
// ---------------------------------------------------------------------------

class RuntimeError : public Error {
public:
    using Error::Error;
};
class BoundsError : public RuntimeError {
public:
    BoundsError(std::int64_t index, std::size_t length);
    std::int64_t index;
    std::size_t length;
};
class PoisonRead : public RuntimeError {
public:
    using RuntimeError::RuntimeError;
};
class DivisionByZero : public RuntimeError {
public:
    using RuntimeError::RuntimeError;
};
class NegativeSize : public RuntimeError {
public:
    using RuntimeError::RuntimeError;
};
class UseAfterFree : public RuntimeError {
public:
    using RuntimeError::RuntimeError;
};

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

// One scalar slot. Bits hold the value in its static type: IEEE bits for
// floats (float32 in the low word), sign-extended two's complement for
// integers, 0/1 for bool. Poison marks uninitialized temporaries.
struct Cell {
    std::uint64_t bits = 0;
    bool poison = false;
    // A poison cell has no value; its bits are ignored.
    bool operator==(const Cell& o) const { return poison == o.poison && (poison || bits == o.bits); }
};

Cell make_cell(ScalarKind kind, double v);
Cell make_cell_int(ScalarKind kind, std::int64_t v);
double cell_as_double(ScalarKind kind, const Cell& c);

// A named value: scalar (1 cell), record or fixed array (its leaves), or an
// array base (length elements of the pointee's leaves).
struct Binding {
    Type type;
    std::vector<Cell> cells;
    bool operator==(const Binding&) const = default;
};

// Scalar leaf kinds of a type, in layout order. Pointers flatten their element.
std::vector<ScalarKind> leaf_kinds(const Type& type, const SourceUnit& unit);
// Access suffixes of the leaves of a type: ".pos[0]", "[2]", "".
std::vector<std::string> leaf_suffixes(const Type& type, const SourceUnit& unit);

class RuntimeStore {
public:
    std::map<std::string, Binding> bindings;

    [[nodiscard]] const Binding* find(const std::string& name) const;
    Binding* find(const std::string& name);
    void set(const std::string& name, Binding b) { bindings[name] = std::move(b); }

    bool operator==(const RuntimeStore&) const = default;
};

// Key/value text: one line per leaf, `key = kind:hexbits` or `kind:poison`,
// preceded by `name : type` declaration lines.
std::string store_to_text(const RuntimeStore& store, const SourceUnit& unit);
RuntimeStore store_from_text(const std::string& text, const SourceUnit& unit);

struct StoreMismatch {
    std::string key;
    std::string expected;
    std::string actual;
};
// Leaf-level differences, at most `limit` reported.
std::vector<StoreMismatch> compare_stores(const RuntimeStore& expected, const RuntimeStore& actual,
                                          const SourceUnit& unit, std::size_t limit = 20);

// Pseudo-random array of `n` records bound to `name`: floats in [-1, 1],
// ints in [-1000, 1000], random bools. Same seed gives identical bits.
RuntimeStore seed_store(const SourceUnit& unit, const std::string& record, std::size_t n, std::uint64_t seed,
                        const std::string& name = "particles");

// Bindings for every parameter of `entry`: array bases get n seeded
// elements, integer parameters get n, floating parameters a seeded value,
// bools true.
RuntimeStore seed_entry_store(const SourceUnit& unit, const std::string& entry, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Interpreter
// ---------------------------------------------------------------------------

enum class PoisonMode : std::uint8_t {
    Check,  // arithmetic on poison raises PoisonRead
    Run,    // poison reads as zero
};

struct InterpOptions {
    PoisonMode mode = PoisonMode::Check;
    // Execute annotated loops with view semantics on the original array:
    // leaves in A\Â of the converted range are restored after the loop.
    // Off means annotations are ignored.
    bool reference_views = false;
    std::size_t max_call_depth = 4096;
};

struct RunStats {
    std::uint64_t statements = 0;
    std::uint64_t prologue_copies = 0;
    std::uint64_t epilogue_copies = 0;
    std::size_t peak_temp_bytes = 0;
    double prologue_seconds = 0;
    double epilogue_seconds = 0;
    double total_seconds = 0;
    [[nodiscard]] double body_seconds() const;
};

struct RunResult {
    RuntimeStore store;
    RunStats stats;
    std::optional<Cell> return_value;
};

class Program;

// Compiled form of a unit; reusable across runs. The unit must outlive it.
class Interpreter {
public:
    Interpreter(const SourceUnit& unit, InterpOptions options = {});
    ~Interpreter();
    Interpreter(Interpreter&&) noexcept;
    Interpreter& operator=(Interpreter&&) noexcept;

    // Parameters are read from the store by name; globals too when present,
    // otherwise from their initializers. The returned store holds the final
    // parameter arrays and globals.
    RunResult run(const std::string& entry, RuntimeStore store) const;

private:
    std::unique_ptr<Program> program_;
};

RunResult run(const SourceUnit& unit, const std::string& entry, RuntimeStore store, InterpOptions options = {});

// ---------------------------------------------------------------------------
// Differential oracle
// ---------------------------------------------------------------------------

// An interpreter error raised on one side of a differential check.
class OracleError : public Error {
public:
    OracleError(std::string side, const std::string& what);
    std::string side;  // "original" or "transformed"
};

struct Verdict {
    bool pass = false;
    std::vector<StoreMismatch> mismatches;
    RunStats original_stats;
    RunStats transformed_stats;
};

// Runs `original` with reference view semantics and `transformed` plainly
// from the same input; passes iff the final stores are bit-identical.
Verdict differential_check(const SourceUnit& original, const SourceUnit& transformed, const std::string& entry,
                           const RuntimeStore& input);
Verdict differential_check(const SourceUnit& original, const SourceUnit& transformed, const std::string& entry,
                           std::uint64_t seed, std::size_t n);

}  // namespace soalens
