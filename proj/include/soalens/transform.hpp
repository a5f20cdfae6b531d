#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "soalens/ast.hpp"
#include "soalens/semantics.hpp"

namespace soalens {

struct TransformOptions {
    // Also copy output-only leaves in the prologue so conditionally written
    // outputs never synchronize uninitialized temp contents back.
    bool safe_outputs = false;
};

// One temporary allocated for a converted loop. AoS->SoA temps are flat
// scalar arrays, one per leaf; the SoA->AoS temp is a single record array.
struct TempArray {
    std::string name;
    Type element;
    std::optional<std::size_t> leaf;
};

struct RewritePlan {
    ConversionSpec spec;
    std::vector<TempArray> temps;
    std::string index_var;                       // counter of the copy loops
    std::vector<std::size_t> prologue_leaves;    // leaves(A), plus Â\A in safe mode
    std::vector<std::size_t> epilogue_leaves;    // leaves(Â)
    std::map<std::size_t, std::string> redirect_map;  // leaf -> temp holding it

    // Generated statements in emission order around the original loop.
    std::vector<Stmt> temp_decls;
    std::optional<Stmt> prologue;
    std::optional<Stmt> epilogue;
    std::vector<Stmt> frees;
};

struct LoopReport {
    std::string function;
    std::size_t loop_ordinal = 0;
    Direction direction = Direction::AosToSoa;
    std::string target;
    std::string record;
    std::size_t input_leaves = 0;
    std::size_t output_leaves = 0;
    std::size_t union_leaves = 0;
    std::size_t record_size = 0;
    std::size_t bytes_per_element = 0;  // view_footprint(spec, 1)
    std::vector<std::string> temps;
};

struct TransformResult {
    SourceUnit unit;
    std::vector<RewritePlan> plans;
    std::vector<LoopReport> report;
};

// Raised when a unit with illegal annotations is handed to transform().
class SemanticError : public Error {
public:
    SemanticError(std::vector<Diagnostic> diags, const std::string& file);
    [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

// <base>_<tag><ordinal>_t, with the ordinal bumped past names in `taken`.
std::string mangle(const std::string& base, std::size_t ordinal, const std::set<std::string>& taken,
                   const std::string& tag = "soa");

// Every identifier spelled in a function, plus unit-level names.
std::set<std::string> function_identifiers(const SourceUnit& unit, const FunctionDef& fn);

// Plans for one spec. `taken` holds names already in use and receives the
// names this plan generates.
RewritePlan plan(const ConversionSpec& spec, std::set<std::string>& taken, const TransformOptions& options = {});

// Plans for all specs of an analysis, sharing one name pool per function.
std::vector<RewritePlan> plan_all(const SourceUnit& unit, const std::vector<ConversionSpec>& specs,
                                  const TransformOptions& options = {});

// Rewrites every planned loop. Throws InternalError if a plan's loop
// cannot be located in the unit.
TransformResult apply(const SourceUnit& unit, const std::vector<RewritePlan>& plans);

// analyze + plan_all + apply. Throws SemanticError on diagnostics.
TransformResult transform(const SourceUnit& unit, const TransformOptions& options = {});

// Removes recognized conversion attributes; everything else is untouched.
SourceUnit strip(const SourceUnit& unit);

std::string format_report(const std::vector<LoopReport>& report);

}  // namespace soalens
