#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "soalens/ast.hpp"

namespace soalens {

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

enum class DiagKind : std::uint8_t {
    MissingSize,        // target without target_size
    MissingTarget,      // conversion attributes without a target
    UnknownTarget,      // target is not an in-scope array base of record type
    UnknownField,       // inputs/outputs name that is not a field
    IllegalCall,        // whole element (or the array itself) passed to a call
    Alias,              // unsupported reference binding shape or rebinding
    WholeElement,       // whole element read/written inside a converted loop
    UnsupportedAccess,  // converted field accessed without reaching a constant leaf
    NestedConversion,   // annotated loop inside another annotated loop
    ControlFlow,        // return inside a converted loop would skip the epilogue
    Type,               // ordinary type errors
    Recursion,          // self-containing record
};

std::string_view to_string(DiagKind kind);

struct Diagnostic {
    DiagKind kind = DiagKind::Type;
    SourceLoc loc;
    std::string message;

    // file:line:col: error: message
    [[nodiscard]] std::string format(const std::string& file) const;
};

class RecursionError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct Builtin {
    std::string_view name;
    std::size_t arity;
};
const Builtin* find_builtin(std::string_view name);

ScalarKind promote(ScalarKind k);                       // bool -> int
ScalarKind common_type(ScalarKind a, ScalarKind b);     // usual arithmetic conversions

// Lexically scoped variable types for one function body.
class TypeScope {
public:
    explicit TypeScope(const SourceUnit& unit);

    void push() { frames_.emplace_back(); }
    void pop() { frames_.pop_back(); }
    // Returns false if the name is already declared in the innermost frame.
    bool declare(const std::string& name, Type type);
    [[nodiscard]] const Type* lookup(const std::string& name) const;

    // Type of an expression, or nullopt if it does not type-check.
    [[nodiscard]] std::optional<Type> type_of(const Expr& e) const;

    [[nodiscard]] const SourceUnit& unit() const { return unit_; }

private:
    const SourceUnit& unit_;
    std::vector<std::map<std::string, Type, std::less<>>> frames_;
};

// Full type check of a unit: names, fields, calls, assignments.
std::vector<Diagnostic> typecheck(const SourceUnit& unit);

// ---------------------------------------------------------------------------
// Layout
// ---------------------------------------------------------------------------

struct PathStep {
    std::string field;                 // empty for an index step
    std::optional<std::int64_t> index;
    bool operator==(const PathStep&) const = default;
};

struct FieldLeaf {
    std::vector<PathStep> path;
    ScalarKind scalar = ScalarKind::Float64;
    std::size_t byte_offset = 0;
    std::size_t byte_size = 0;
    std::string mangled_name;  // pos.[0] -> pos0, rot.x -> rot_x

    [[nodiscard]] const std::string& top_field() const { return path.front().field; }
    [[nodiscard]] std::string display() const;      // pos.[0]
    [[nodiscard]] std::string access_path() const;  // .pos[0]
    bool operator==(const FieldLeaf&) const = default;
};

struct LayoutModel {
    std::string record;
    std::vector<FieldLeaf> leaves;
    std::size_t record_size = 0;
    std::size_t alignment = 1;

    // Indices of the leaves under one top-level field, in order.
    [[nodiscard]] std::vector<std::size_t> leaves_of(std::string_view field) const;
    [[nodiscard]] std::optional<std::size_t> find_leaf(const std::vector<PathStep>& path) const;
    [[nodiscard]] std::size_t leaf_bytes() const;  // sum of leaf sizes, padding excluded
    bool operator==(const LayoutModel&) const = default;
};

// Flattens a record: declaration order, nested records and fixed arrays
// expanded, scalars aligned to their own size, records to their widest
// scalar. Throws RecursionError on self-containing records.
LayoutModel build_layout(const RecordDef& record, const SourceUnit& unit);

// ---------------------------------------------------------------------------
// Conversion specs
// ---------------------------------------------------------------------------

// Reference name -> index expression into the conversion target.
using AliasMap = std::map<std::string, Expr, std::less<>>;

struct ConversionSpec {
    Direction direction = Direction::AosToSoa;
    std::string function;
    std::size_t loop_ordinal = 0;  // pre-order index among annotated loops of the function
    SourceLoc loc;
    // AoS->SoA: name of the array-base parameter. SoA->AoS: the record type
    // to pack into; the flat arrays are named after the leaves.
    std::string target;
    LayoutModel layout;
    Expr size_expr;
    std::optional<Expr> start_idx;
    std::vector<std::string> inputs;   // A, declaration order
    std::vector<std::string> outputs;  // Â, declaration order
    std::vector<std::size_t> input_leaves;
    std::vector<std::size_t> output_leaves;
    std::vector<std::size_t> union_leaves;
    AliasMap aliases;
    const For* loop = nullptr;  // valid while the analyzed unit is alive

    [[nodiscard]] bool in_union(std::size_t leaf) const;
    [[nodiscard]] bool in_inputs(std::size_t leaf) const;
    [[nodiscard]] bool in_outputs(std::size_t leaf) const;

    friend bool operator==(const ConversionSpec& a, const ConversionSpec& b);
};

struct Analysis {
    std::vector<ConversionSpec> specs;
    std::vector<Diagnostic> diagnostics;

    [[nodiscard]] bool ok() const { return diagnostics.empty(); }
};

// Type checks the unit, then builds one spec per annotated loop and
// enforces the legality rules. Specs are only returned for legal loops.
Analysis analyze(const SourceUnit& unit);

struct AliasResolution {
    AliasMap aliases;
    std::vector<Diagnostic> diagnostics;
};

// Reference bindings `ref = target[index]` inside the loop.
AliasResolution resolve_aliases(const For& loop, const ConversionSpec& spec);

// Calls that receive a whole element (target[e] or an alias) or the target
// array itself. Passing individual leaves is legal.
std::vector<Diagnostic> check_call_legality(const For& loop, const ConversionSpec& spec, const AliasMap& aliases);

// Bytes of temporary storage a conversion allocates for n elements.
std::size_t view_footprint(const ConversionSpec& spec, std::size_t n);

}  // namespace soalens
