#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "fixtures.hpp"
#include "soalens/bench.hpp"
#include "soalens/emit.hpp"
#include "soalens/frontend.hpp"
#include "soalens/transform.hpp"

using namespace soalens;
namespace fx = soalens::testing;

namespace {

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::vector<std::string> body_lines(const std::string& diff) {
    std::vector<std::string> out;
    std::istringstream in(diff);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && (line[0] == '+' || line[0] == '-') && line.rfind("---", 0) != 0 && line.rfind("+++", 0) != 0)
            out.push_back(line);
    return out;
}

}  // namespace

TEST(Emit, Deterministic) {
    SourceUnit u = parse_source(fx::read_source("corpus/density.minic"));
    EXPECT_EQ(emit(u), emit(u));
    TransformResult r = transform(u);
    EXPECT_EQ(emit(r.unit), emit(transform(u).unit));
    EXPECT_EQ(emit(r.unit, {Dialect::C99}), emit(transform(u).unit, {Dialect::C99}));
}

TEST(Emit, RoundTripCorpusAndTransformed) {
    for (const auto& k : build_corpus()) {
        for (const SourceUnit& u : {k.unit, transform(k.unit).unit, strip(k.unit)}) {
            std::string once = emit(u);
            SourceUnit again = parse_source(once);
            EXPECT_EQ(again, u) << k.name;
            EXPECT_EQ(emit(again), once) << k.name;
        }
    }
}

TEST(Emit, C99AllocationAndFree) {
    TransformResult r = transform(parse_source(fx::kSmallDrift));
    std::string c = emit(r.unit, {Dialect::C99});
    EXPECT_TRUE(contains(c, "double *pos0_soa0_t = (double *)malloc(")) << c;
    EXPECT_TRUE(contains(c, "free(pos0_soa0_t);")) << c;
    EXPECT_TRUE(contains(c, "#include <stdlib.h>")) << c;
    EXPECT_TRUE(contains(c, "typedef struct Particle {")) << c;
    EXPECT_FALSE(contains(c, "delete[]")) << c;
    EXPECT_FALSE(contains(c, "auto")) << c;
    EXPECT_FALSE(contains(c, "\n    [[")) << c;
    EXPECT_TRUE(contains(c, "// [[soalens::conversion_prologue]]")) << c;
}

TEST(Emit, AnnotateToggle) {
    SourceUnit u = parse_source(fx::kSmallDrift);
    std::string with = emit(transform(u).unit);
    std::string without = emit(transform(u).unit, {Dialect::MiniC, 4, false});
    EXPECT_TRUE(contains(with, "// generated by soalens"));
    EXPECT_FALSE(contains(without, "// generated by soalens"));
    EXPECT_EQ(parse_source(with), parse_source(without));
}

TEST(Emit, EmptyUnit) {
    SourceUnit u;
    EXPECT_EQ(emit(u), "// generated by soalens\n");
    EXPECT_EQ(emit(u, {Dialect::MiniC, 4, false}), "");
}

TEST(Emit, UntransformedHasNoGeneratedIdentifiers) {
    SourceUnit u = strip(parse_source(fx::kSmallDrift));
    EXPECT_FALSE(contains(emit(u), "_soa"));
    EXPECT_FALSE(contains(emit(u, {Dialect::C99}), "_soa"));
}

TEST(Emit, ExpressionPrecedence) {
    SourceUnit u = parse_source("double f(double a, double b, double c) { return (a + b) * c - (a - (b - c)); }");
    const auto& ret = u.functions[0].body.stmts[0].as<Return>();
    EXPECT_EQ(emit_expr(*ret.value), "(a + b) * c - (a - (b - c))");
}

TEST(Diff, EmptyForIdenticalInput) {
    std::string s = fx::read_source("corpus/kick1.minic");
    EXPECT_EQ(diff_report(s, s), "");
}

TEST(Diff, StripRemovesOnlyAttributes) {
    SourceUnit u = parse_source(fx::read_source("corpus/kick2.minic"));
    std::string before = emit(u), after = emit(strip(u));
    auto lines = body_lines(diff_report(before, after));
    ASSERT_FALSE(lines.empty());
    for (const auto& l : lines) {
        EXPECT_EQ(l[0], '-') << l;
        EXPECT_TRUE(contains(l, "[[clang::soa_conversion_")) << l;
    }
}

TEST(Diff, HunkHeaderAndLabels) {
    std::string d = diff_report("a\nb\nc\n", "a\nB\nc\n", "x", "y");
    EXPECT_EQ(d, "--- x\n+++ y\n@@ -1,3 +1,3 @@\n a\n-b\n+B\n c\n");
}

TEST(FormatDouble, ShortestAndExact) {
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(1.0), "1.0");
    EXPECT_EQ(format_double(0.1), "0.1");
    for (double v : {1e300, -2.5e-310, 3.141592653589793, 123456789.0}) {
        std::string s = format_double(v);
        EXPECT_TRUE(contains(s, ".") || contains(s, "e")) << s;
        EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
    }
}
