#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "generator.hpp"
#include "soalens/emit.hpp"
#include "soalens/frontend.hpp"
#include "soalens/interp.hpp"
#include "soalens/transform.hpp"

using namespace soalens;
namespace fx = soalens::testing;

TEST(Property, GeneratedProgramsAreValid) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::string src = fx::random_program(seed);
        SourceUnit u;
        ASSERT_NO_THROW(u = parse_source(src)) << src;
        auto diags = typecheck(u);
        EXPECT_TRUE(diags.empty()) << diags[0].format("") << "\n" << src;
    }
}

TEST(Property, ParseEmitFixedPoint) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        SourceUnit u = parse_source(fx::random_program(seed));
        std::string once = emit(u);
        SourceUnit again = parse_source(once);
        ASSERT_EQ(again, u) << "seed " << seed << "\n" << once;
        ASSERT_EQ(emit(again), once) << "seed " << seed;
    }
}

TEST(Property, TransformedGeneratedProgramsRoundTrip) {
    int transformed = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SourceUnit u = parse_source(fx::random_program(seed));
        if (!analyze(u).ok()) continue;
        SourceUnit t = transform(u).unit;
        ASSERT_EQ(parse_source(emit(t)), t) << "seed " << seed;
        ++transformed;
    }
    EXPECT_GT(transformed, 50);
}

TEST(Property, DiscardLeavesUnlistedFieldsIntact) {
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        fx::GeneratedKernel g = fx::random_discard_kernel(seed);
        SourceUnit u = parse_source(g.source);
        TransformResult r = transform(u);
        const std::size_t total = 1 + seed % 9;
        const std::int64_t size = static_cast<std::int64_t>(seed % (total + 1));
        const std::int64_t start = static_cast<std::int64_t>((seed / 7) % (total - size + 1));
        RuntimeStore in = fx::kernel_store(u, g.record, total, size, start, seed);
        RunResult out = run(r.unit, g.entry, in);
        const Binding& before = *in.find("data");
        const Binding& after = *out.store.find("data");
        ASSERT_EQ(before.cells.size(), after.cells.size());
        // Only A\Â leaves are written by the body, so nothing may change.
        EXPECT_EQ(before, after) << "seed " << seed << "\n" << g.source;
        EXPECT_TRUE(differential_check(u, r.unit, g.entry, in).pass) << "seed " << seed;
    }
}

TEST(Property, InverseIsIdentity) {
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        fx::GeneratedKernel g = fx::random_inverse_kernel(seed);
        SourceUnit u = parse_source(g.source);
        TransformResult r = transform(u);
        const std::size_t total = seed % 12;
        RuntimeStore in = fx::kernel_store(u, g.record, total, static_cast<std::int64_t>(total), 0, seed);
        RunResult out = run(r.unit, g.entry, in);
        EXPECT_EQ(out.store, in) << "seed " << seed << "\n" << g.source;
        EXPECT_EQ(out.stats.prologue_copies, out.stats.epilogue_copies);
    }
}

TEST(Property, StripIsIdempotentOnGeneratedPrograms) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SourceUnit u = parse_source(fx::random_program(seed));
        SourceUnit s = strip(u);
        EXPECT_EQ(strip(s), s) << "seed " << seed;
        EXPECT_TRUE(analyze(s).specs.empty());
    }
}
