#pragma once

#include <string>

#include "soalens/ast.hpp"
#include "soalens/interp.hpp"

namespace soalens::testing {

std::string source_path(const std::string& relative);  // relative to the repository root
std::string read_source(const std::string& relative);

// Annotated drift over a small record, used across unit tests.
extern const char* const kSmallDrift;

Binding scalar_binding(ScalarKind kind, double v);
Binding int_binding(std::int64_t v);

// Store for `void kernel(R *data, long size, long start)`: `total` seeded
// records plus the two scalars.
RuntimeStore kernel_store(const SourceUnit& unit, const std::string& record, std::size_t total, std::int64_t size,
                          std::int64_t start, std::uint64_t seed);

}  // namespace soalens::testing
