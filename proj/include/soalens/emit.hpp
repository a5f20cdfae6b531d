#pragma once

#include <string>

#include "soalens/ast.hpp"

namespace soalens {

enum class Dialect : std::uint8_t { MiniC, C99 };

struct EmitConfig {
    Dialect dialect = Dialect::MiniC;
    int indent = 4;
    bool annotate = true;  // header and provenance comments
};

// Canonical source text for a unit. Deterministic; the miniC dialect
// reparses to a structurally equal unit.
std::string emit(const SourceUnit& unit, const EmitConfig& config = {});

// Single expression in miniC syntax, for diagnostics and reports.
std::string emit_expr(const Expr& expr);

// Unified diff (3 lines of context). Empty when the texts are equal.
std::string diff_report(const std::string& before, const std::string& after, const std::string& before_label = "before",
                        const std::string& after_label = "after");

// Shortest decimal text that reads back as exactly `v`, always containing
// a '.' or an exponent.
std::string format_double(double v);

}  // namespace soalens
