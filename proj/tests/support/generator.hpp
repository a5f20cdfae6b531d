#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Small random miniC generators for property tests. Output is source text;
// every program lexes, parses and type checks.

namespace soalens::testing {

// A broad program for parse/emit round trips: records, globals, helper
// functions, nested loops and branches, aliases, builtin calls, and both
// recognized and unknown attributes.
std::string random_program(std::uint64_t seed);

struct GeneratedKernel {
    std::string source;
    std::string entry = "kernel";
    std::string record;             // element type of `data`
    std::vector<std::string> inputs;   // A
    std::vector<std::string> outputs;  // Â
};

// void kernel(R *data, long size, long start): an annotated loop over
// [start, start + size) that writes only leaves in A \ Â; Â ⊆ A.
GeneratedKernel random_discard_kernel(std::uint64_t seed);

// Same signature; A = Â and the loop body is empty.
GeneratedKernel random_inverse_kernel(std::uint64_t seed);

}  // namespace soalens::testing
