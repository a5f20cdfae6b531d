#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "fixtures.hpp"
#include "soalens/bench.hpp"
#include "soalens/emit.hpp"
#include "soalens/interp.hpp"
#include "soalens/transform.hpp"

using namespace soalens;
namespace fx = soalens::testing;

namespace {

const KernelCase& kernel(const std::vector<KernelCase>& all, const std::string& name) {
    for (const auto& k : all)
        if (k.name == name) return k;
    throw std::runtime_error("no kernel " + name);
}

}  // namespace

TEST(Corpus, FiveKernelsSharedRecord) {
    auto all = build_corpus();
    ASSERT_EQ(all.size(), 5u);
    for (const auto& k : all) {
        Analysis a = analyze(k.unit);
        ASSERT_TRUE(a.ok()) << k.name;
        ASSERT_EQ(a.specs.size(), 1u) << k.name;
        EXPECT_EQ(a.specs[0].layout.record_size, 256u) << k.name;
        auto sorted = [](std::vector<std::string> v) {
            std::sort(v.begin(), v.end());
            return v;
        };
        EXPECT_EQ(sorted(a.specs[0].inputs), sorted(k.inputs)) << k.name;
        EXPECT_EQ(sorted(a.specs[0].outputs), sorted(k.outputs)) << k.name;
        EXPECT_EQ(fx::read_source(k.path), std::string(corpus_source(k.name))) << k.name;
    }
    EXPECT_EQ(kernel(all, "density").complexity, Complexity::Quadratic);
    EXPECT_EQ(kernel(all, "force").complexity, Complexity::Quadratic);
    EXPECT_EQ(kernel(all, "drift").complexity, Complexity::Linear);
    EXPECT_EQ(kernel(all, "kick1").complexity, Complexity::Linear);
    EXPECT_EQ(kernel(all, "kick2").complexity, Complexity::Linear);
}

TEST(Corpus, ModeVariants) {
    auto all = build_corpus();
    const KernelCase& d = kernel(all, "drift");
    EXPECT_TRUE(analyze(annotated_variant(d, BenchMode::Aos)).specs.empty());
    Analysis full = analyze(annotated_variant(d, BenchMode::SoaFull));
    ASSERT_TRUE(full.ok());
    EXPECT_EQ(full.specs[0].union_leaves.size(), full.specs[0].layout.leaves.size());
    Analysis views = analyze(annotated_variant(d, BenchMode::SoaViews));
    EXPECT_EQ(views.specs[0].inputs.size(), d.inputs.size());
    EXPECT_EQ(parse_mode("soa-views"), BenchMode::SoaViews);
    EXPECT_EQ(to_string(BenchMode::SoaFull), "soa-full");
    EXPECT_FALSE(parse_mode("soa"));
}

TEST(Corpus, ViewsCopyLessThanFull) {
    for (const auto& k : build_corpus()) {
        RunStats full = time_once(k, BenchMode::SoaFull, 32, 1);
        RunStats views = time_once(k, BenchMode::SoaViews, 32, 1);
        RunStats aos = time_once(k, BenchMode::Aos, 32, 1);
        Analysis a = analyze(k.unit);
        const auto& s = a.specs[0];
        EXPECT_EQ(views.prologue_copies, 32 * s.input_leaves.size()) << k.name;
        EXPECT_EQ(views.epilogue_copies, 32 * s.output_leaves.size()) << k.name;
        EXPECT_EQ(full.prologue_copies, 32 * s.layout.leaves.size()) << k.name;
        EXPECT_LT(views.prologue_copies, full.prologue_copies) << k.name;
        EXPECT_LT(views.epilogue_copies, full.epilogue_copies) << k.name;
        EXPECT_EQ(aos.prologue_copies + aos.epilogue_copies, 0u) << k.name;
    }
}

TEST(Corpus, FootprintOrdering) {
    for (const auto& k : build_corpus()) {
        Analysis full = analyze(annotated_variant(k, BenchMode::SoaFull));
        Analysis views = analyze(annotated_variant(k, BenchMode::SoaViews));
        for (std::size_t n : {0u, 1u, 64u, 4096u}) {
            EXPECT_LE(view_footprint(views.specs[0], n), view_footprint(full.specs[0], n)) << k.name;
            EXPECT_LE(view_footprint(full.specs[0], n), n * 256) << k.name;
        }
        EXPECT_LT(view_footprint(views.specs[0], 8), view_footprint(full.specs[0], 8)) << k.name;
    }
}

TEST(Corpus, SingleParticleForceIsZero) {
    auto all = build_corpus();
    const KernelCase& f = kernel(all, "force");
    SourceUnit lowered = lowered_variant(f, BenchMode::SoaViews, {});
    RunResult r = run(lowered, "force", seed_entry_store(f.unit, "force", 1, 4));
    const Binding& p = *r.store.find("particles");
    const auto suffixes = leaf_suffixes(p.type, f.unit);
    for (std::size_t k = 0; k < suffixes.size(); ++k)
        if (suffixes[k].rfind(".acc[", 0) == 0) {
            EXPECT_EQ(cell_as_double(ScalarKind::Float64, p.cells[k]), 0.0);
        }
}

TEST(Verify, SmallGridPasses) {
    VerifyOptions o;
    o.seeds = {0, 1};
    o.sizes = {0, 3};
    VerifyTable t = verify_all(build_corpus(), o);
    EXPECT_EQ(t.cells.size(), 5u * 2u * 2u * 2u);
    EXPECT_TRUE(t.all_pass());
    std::string text = format_verify(t);
    EXPECT_NE(text.find("all pass (40 checks)"), std::string::npos) << text;
}

TEST(Report, ShapeAndThroughput) {
    BenchOptions o;
    o.sizes = {8};
    o.samples = 3;
    o.modes = {BenchMode::SoaViews};
    o.kernels = {"force", "drift"};
    BenchReport r = bench_all(build_corpus(), o);
    ASSERT_EQ(r.rows.size(), 2u);
    for (const auto& row : r.rows) {
        ASSERT_EQ(row.times.size(), 3u);
        double total = 0;
        for (double t : row.times) total += t;
        const double work = row.kernel == "force" ? 3.0 * 8 * 7 : 3.0 * 8;
        EXPECT_NEAR(row.throughput, work / total, 1e-9 * work / total) << row.kernel;
        EXPECT_LE(row.min, row.avg);
        EXPECT_LE(row.avg, row.max);
        EXPECT_EQ(row.times[row.min_index], row.min);
        EXPECT_EQ(row.times[row.max_index], row.max);
    }
    std::string text = format_report(r);
    EXPECT_NE(text.find("8 particles (3 samples)"), std::string::npos) << text;
    EXPECT_NE(text.find("force kernel:"), std::string::npos) << text;
    EXPECT_NE(text.find("#measurements=3"), std::string::npos) << text;
    std::string csv = format_csv(r);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "kernel,mode,n,samples,avg,min,max,throughput");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2);
}

TEST(Native, EmptyCompilerIsToolchainError) {
    auto all = build_corpus();
    SourceUnit lowered = lowered_variant(kernel(all, "drift"), BenchMode::SoaViews, {});
    EXPECT_THROW(run_native("", lowered, "drift", 16, 2, 0), ToolchainError);
    EXPECT_THROW(run_native("/nonexistent/cc", lowered, "drift", 16, 2, 0), ToolchainError);
}

TEST(Native, DriverIsC99WithMain) {
    auto all = build_corpus();
    std::string src = native_driver(lowered_variant(kernel(all, "kick1"), BenchMode::SoaViews, {}), "kick1", 16, 2, 0);
    EXPECT_NE(src.find("int main("), std::string::npos);
    EXPECT_NE(src.find("clock_gettime"), std::string::npos);
    EXPECT_NE(src.find("malloc("), std::string::npos);
}

TEST(Native, CompilesAndTimesWhenCompilerPresent) {
    if (std::system("cc --version > /dev/null 2>&1") != 0) GTEST_SKIP() << "no cc on PATH";
    auto all = build_corpus();
    SourceUnit lowered = lowered_variant(kernel(all, "drift"), BenchMode::SoaViews, {});
    auto times = run_native("cc", lowered, "drift", 64, 3, 0);
    ASSERT_EQ(times.size(), 3u);
    for (double t : times) EXPECT_GE(t, 0.0);
}
