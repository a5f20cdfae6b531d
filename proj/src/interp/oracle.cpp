#include "soalens/interp.hpp"

namespace soalens {

OracleError::OracleError(std::string side_, const std::string& what)
    : Error(side_ + " program failed: " + what), side(std::move(side_)) {}

namespace {

RunResult run_side(const SourceUnit& unit, const std::string& entry, const RuntimeStore& input, bool views,
                   const char* side) {
    InterpOptions options;
    options.mode = PoisonMode::Check;
    options.reference_views = views;
    try {
        return run(unit, entry, input, options);
    } catch (const RuntimeError& e) {
        throw OracleError(side, e.what());
    }
}

}  // namespace

Verdict differential_check(const SourceUnit& original, const SourceUnit& transformed, const std::string& entry,
                           const RuntimeStore& input) {
    RunResult expected = run_side(original, entry, input, true, "original");
    RunResult actual = run_side(transformed, entry, input, false, "transformed");
    Verdict v;
    v.original_stats = expected.stats;
    v.transformed_stats = actual.stats;
    v.pass = expected.store == actual.store && expected.return_value == actual.return_value;
    if (!v.pass) {
        v.mismatches = compare_stores(expected.store, actual.store, original);
        if (v.mismatches.empty() && expected.return_value != actual.return_value)
            v.mismatches.push_back({"<return>", "differs", "differs"});
    }
    return v;
}

Verdict differential_check(const SourceUnit& original, const SourceUnit& transformed, const std::string& entry,
                           std::uint64_t seed, std::size_t n) {
    return differential_check(original, transformed, entry, seed_entry_store(original, entry, n, seed));
}

}  // namespace soalens
