#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "soalens/bench.hpp"
#include "soalens/emit.hpp"
#include "soalens/frontend.hpp"
#include "soalens/semantics.hpp"

using namespace soalens;
namespace fx = soalens::testing;

namespace {

std::string loop_with(const std::string& attrs, const std::string& body) {
    std::string src = R"(struct Particle {
    double pos[2];
    double vel[2];
    double mass;
    bool updated;
};
double foo(double a, double b) { return a + b; }
double bar(Particle q) { return q.mass; }
void k(Particle *particles, int size, double dt) {
)";
    return src + attrs + "    for (int i = 0; i < size; i++) {\n" + body + "    }\n}\n";
}

const std::string kTargetSize =
    "    [[clang::soa_conversion_target(particles)]]\n    [[clang::soa_conversion_target_size(size)]]\n";

std::vector<DiagKind> kinds(const Analysis& a) {
    std::vector<DiagKind> out;
    for (const auto& d : a.diagnostics) out.push_back(d.kind);
    return out;
}

bool has(const Analysis& a, DiagKind k) {
    auto v = kinds(a);
    return std::find(v.begin(), v.end(), k) != v.end();
}

}  // namespace

TEST(Layout, SmallRecordOffsetsAndPadding) {
    SourceUnit u = parse_source("struct R { double pos[2]; double vel[2]; bool updated; };");
    LayoutModel m = build_layout(u.records[0], u);
    ASSERT_EQ(m.leaves.size(), 5u);
    std::vector<std::size_t> offsets;
    for (const auto& l : m.leaves) offsets.push_back(l.byte_offset);
    EXPECT_EQ(offsets, (std::vector<std::size_t>{0, 8, 16, 24, 32}));
    EXPECT_EQ(m.leaves[0].display(), "pos.[0]");
    EXPECT_EQ(m.leaves[0].mangled_name, "pos0");
    EXPECT_EQ(m.leaves[4].byte_size, 1u);
    EXPECT_EQ(m.record_size, 40u);
    EXPECT_EQ(m.leaf_bytes(), 33u);
}

TEST(Layout, AlignmentAndNesting) {
    SourceUnit u = parse_source("struct In { bool f; double d; };\nstruct R { bool a; int b; In c[2]; float e; };");
    LayoutModel m = build_layout(u.records[1], u);
    // a@0 b@4 c[0].f@8 c[0].d@16 c[1].f@24 c[1].d@32 e@40, size 48
    std::vector<std::size_t> offsets;
    for (const auto& l : m.leaves) offsets.push_back(l.byte_offset);
    EXPECT_EQ(offsets, (std::vector<std::size_t>{0, 4, 8, 16, 24, 32, 40}));
    EXPECT_EQ(m.record_size, 48u);
    EXPECT_EQ(m.leaves[3].display(), "c.[0].d");
    // leaves tile without overlap
    for (std::size_t i = 1; i < m.leaves.size(); ++i)
        EXPECT_GE(m.leaves[i].byte_offset, m.leaves[i - 1].byte_offset + m.leaves[i - 1].byte_size);
}

TEST(Layout, EmptyRecord) {
    SourceUnit u = parse_source("struct E { };");
    LayoutModel m = build_layout(u.records[0], u);
    EXPECT_TRUE(m.leaves.empty());
    EXPECT_EQ(m.record_size, 0u);
}

TEST(Layout, ParticleIs256Bytes) {
    SourceUnit u = parse_file(fx::source_path("corpus/drift.minic"));
    LayoutModel m = build_layout(*u.find_record("Particle"), u);
    EXPECT_EQ(m.record_size, 256u);
    EXPECT_LE(m.leaf_bytes(), m.record_size);
}

TEST(Layout, RecursiveRecordRejected) {
    // The parser only knows records declared earlier, so build the cycle by hand.
    SourceUnit u = parse_source("struct A { double x; };");
    u.records[0].fields.push_back(FieldDecl{Type::record_type("A"), "next", {}});
    EXPECT_THROW(build_layout(u.records[0], u), RecursionError);
}

TEST(Analyze, DriftSpec) {
    SourceUnit u = parse_source(fx::kSmallDrift);
    Analysis a = analyze(u);
    ASSERT_TRUE(a.ok()) << a.diagnostics[0].format("");
    ASSERT_EQ(a.specs.size(), 1u);
    const ConversionSpec& s = a.specs[0];
    EXPECT_EQ(s.target, "particles");
    EXPECT_EQ(s.inputs, (std::vector<std::string>{"pos", "vel", "updated"}));
    EXPECT_EQ(s.outputs, (std::vector<std::string>{"pos", "updated"}));
    std::vector<std::string> names;
    for (auto l : s.union_leaves) names.push_back(s.layout.leaves[l].display());
    EXPECT_EQ(names, (std::vector<std::string>{"pos.[0]", "pos.[1]", "vel.[0]", "vel.[1]", "updated"}));
    EXPECT_EQ(s.aliases.size(), 1u);
    EXPECT_EQ(emit_expr(s.aliases.at("p")), "i");
}

TEST(Analyze, MissingSize) {
    Analysis a = analyze(parse_source(loop_with("    [[clang::soa_conversion_target(particles)]]\n", "")));
    EXPECT_TRUE(has(a, DiagKind::MissingSize));
    EXPECT_TRUE(a.specs.empty());
}

TEST(Analyze, UnknownField) {
    Analysis a = analyze(parse_source(loop_with(kTargetSize + "    [[clang::soa_conversion_inputs(posx)]]\n", "")));
    EXPECT_TRUE(has(a, DiagKind::UnknownField));
}

TEST(Analyze, UnknownTarget) {
    Analysis a = analyze(parse_source(loop_with(
        "    [[clang::soa_conversion_target(dt)]]\n    [[clang::soa_conversion_target_size(size)]]\n", "")));
    EXPECT_TRUE(has(a, DiagKind::UnknownTarget));
}

TEST(Analyze, DefaultsAllInputsNoOutputs) {
    Analysis a = analyze(parse_source(loop_with(kTargetSize, "")));
    ASSERT_TRUE(a.ok());
    EXPECT_EQ(a.specs[0].inputs.size(), 4u);
    EXPECT_TRUE(a.specs[0].outputs.empty());
    EXPECT_EQ(a.specs[0].union_leaves.size(), 6u);
}

TEST(Analyze, WholeElementCallRejected) {
    Analysis a = analyze(parse_source(loop_with(kTargetSize, "        double m = bar(particles[i]);\n")));
    EXPECT_TRUE(has(a, DiagKind::IllegalCall));
    Analysis b = analyze(parse_source(loop_with(kTargetSize, "        auto &p = particles[i];\n        double m = bar(p);\n")));
    EXPECT_TRUE(has(b, DiagKind::IllegalCall));
}

TEST(Analyze, PerLeafCallAccepted) {
    Analysis a = analyze(
        parse_source(loop_with(kTargetSize, "        double s = foo(particles[i].pos[0], particles[i].pos[1]);\n")));
    EXPECT_TRUE(a.ok()) << a.diagnostics[0].format("");
}

TEST(Analyze, WholeElementCallOutsideAnnotatedLoopIsFine) {
    Analysis a = analyze(parse_source(loop_with("", "        double m = bar(particles[i]);\n")));
    EXPECT_TRUE(a.ok());
}

TEST(Analyze, AliasRebindingRejected) {
    Analysis a = analyze(parse_source(
        loop_with(kTargetSize, "        auto &p = particles[i];\n        p = particles[0];\n        p.mass = 1.0;\n")));
    EXPECT_TRUE(has(a, DiagKind::Alias) || has(a, DiagKind::WholeElement));
    Analysis b = analyze(parse_source(
        loop_with(kTargetSize, "        auto &p = particles[i];\n        auto &p2 = p;\n        p2.mass = 1.0;\n")));
    EXPECT_TRUE(has(b, DiagKind::Alias));
}

TEST(Analyze, AnyIndexExpressionAliasAccepted) {
    Analysis a = analyze(parse_source(loop_with(kTargetSize, "        auto &p = particles[size - 1 - i];\n        p.mass = 2.0;\n")));
    ASSERT_TRUE(a.ok());
    EXPECT_EQ(emit_expr(a.specs[0].aliases.at("p")), "size - 1 - i");
}

TEST(Analyze, NestedAnnotatedLoopsRejected) {
    std::string inner = kTargetSize + "        for (int j = 0; j < size; j++) { }\n";
    Analysis a = analyze(parse_source(loop_with(kTargetSize, inner)));
    EXPECT_TRUE(has(a, DiagKind::NestedConversion));
}

TEST(Analyze, DiagnosticFormat) {
    Analysis a = analyze(parse_source(loop_with("    [[clang::soa_conversion_target(particles)]]\n", ""), "k.minic"));
    ASSERT_FALSE(a.ok());
    std::string text = a.diagnostics[0].format("k.minic");
    EXPECT_EQ(text.rfind("k.minic:", 0), 0u) << text;
    EXPECT_NE(text.find(": error: "), std::string::npos) << text;
}

TEST(Analyze, Idempotent) {
    SourceUnit u = parse_source(fx::read_source("corpus/force.minic"));
    Analysis a = analyze(u), b = analyze(u);
    EXPECT_EQ(a.specs, b.specs);
    EXPECT_EQ(a.diagnostics.size(), b.diagnostics.size());
}

TEST(Footprint, DriftExample) {
    SourceUnit u = parse_source(fx::kSmallDrift);
    Analysis a = analyze(u);
    // Small drift record: pos[2], vel[2], mass, updated -> 8+8+8+8+1 = 33 converted bytes per element
    EXPECT_EQ(view_footprint(a.specs[0], 10), 330u);
    EXPECT_LE(view_footprint(a.specs[0], 10), 10 * a.specs[0].layout.record_size);
}

TEST(Footprint, EmptyViewIsZero) {
    Analysis a = analyze(parse_source(loop_with(kTargetSize + "    [[clang::soa_conversion_inputs()]]\n", "")));
    ASSERT_TRUE(a.ok());
    EXPECT_EQ(view_footprint(a.specs[0], 100), 0u);
}

TEST(Footprint, WholeStructEqualsLeafSum) {
    Analysis a = analyze(parse_source(loop_with(kTargetSize, "")));
    const auto& s = a.specs[0];
    for (std::size_t n : {0u, 1u, 7u, 1000u}) {
        EXPECT_EQ(view_footprint(s, n), n * s.layout.leaf_bytes());
        EXPECT_LE(view_footprint(s, n), n * s.layout.record_size);
    }
}

TEST(Footprint, UnionLeavesCoverInputsAndOutputs) {
    for (const auto& k : build_corpus()) {
        Analysis a = analyze(k.unit);
        ASSERT_TRUE(a.ok()) << k.name;
        const auto& s = a.specs.at(0);
        for (auto l : s.input_leaves) EXPECT_TRUE(s.in_union(l));
        for (auto l : s.output_leaves) EXPECT_TRUE(s.in_union(l));
        for (auto l : s.union_leaves) EXPECT_TRUE(s.in_inputs(l) || s.in_outputs(l));
    }
}
