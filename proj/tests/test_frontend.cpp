#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "soalens/frontend.hpp"

using namespace soalens;
namespace fx = soalens::testing;

namespace {

std::vector<std::string> lexemes(const std::vector<Token>& toks) {
    std::vector<std::string> out;
    for (const auto& t : toks) out.push_back(t.lexeme);
    return out;
}

const For& first_loop(const SourceUnit& u) {
    for (const auto& s : u.functions.at(0).body.stmts)
        if (const auto* f = s.get_if<For>()) return *f;
    throw std::runtime_error("no loop");
}

}  // namespace

TEST(Lexer, CompoundAssignmentLine) {
    auto toks = lex("p.pos[0] += p.vel[0] * dt;");
    std::vector<std::string> want{"p", ".", "pos", "[", "0", "]", "+=", "p", ".", "vel", "[", "0", "]", "*", "dt", ";", ""};
    EXPECT_EQ(lexemes(toks), want);
    EXPECT_EQ(toks[0].kind, TokenKind::Identifier);
    EXPECT_EQ(toks[4].kind, TokenKind::IntLiteral);
    EXPECT_EQ(toks.back().kind, TokenKind::Eof);
}

TEST(Lexer, EmptyInputIsJustEof) {
    auto toks = lex("");
    ASSERT_EQ(toks.size(), 1u);
    EXPECT_EQ(toks[0].kind, TokenKind::Eof);
}

TEST(Lexer, AttributeBrackets) {
    auto toks = lex("[[clang::soa_conversion_inputs(pos, vel, updated)]]");
    EXPECT_EQ(toks.front().kind, TokenKind::AttrOpen);
    EXPECT_EQ(toks[1].lexeme, "clang");
    EXPECT_EQ(toks[2].lexeme, "::");
    EXPECT_EQ(toks[3].lexeme, "soa_conversion_inputs");
    EXPECT_EQ(toks[toks.size() - 2].kind, TokenKind::AttrClose);
}

TEST(Lexer, NestedSubscriptIsNotAttributeClose) {
    auto toks = lex("a[b[0]] = 1;");
    for (const auto& t : toks) EXPECT_NE(t.kind, TokenKind::AttrClose);
}

TEST(Lexer, CommentsDropped) {
    auto toks = lex("x // line\n/* block\n */ y");
    EXPECT_EQ(lexemes(toks), (std::vector<std::string>{"x", "y", ""}));
}

TEST(Lexer, IllegalCharacterAndUnterminatedLiteral) {
    EXPECT_THROW(lex("int x = 3 @ 4;"), LexError);
    EXPECT_THROW(lex("\"never closed"), LexError);
    EXPECT_THROW(lex("/* never closed"), LexError);
}

TEST(Lexer, LocationsNonDecreasingAndLexemesRelex) {
    std::string src = fx::read_source("corpus/density.minic");
    auto toks = lex(src);
    for (std::size_t i = 1; i < toks.size(); ++i) {
        auto a = toks[i - 1].loc, b = toks[i].loc;
        EXPECT_TRUE(a.line < b.line || (a.line == b.line && a.column <= b.column)) << i;
    }
    for (const auto& t : toks) {
        if (t.kind == TokenKind::Eof || t.kind == TokenKind::AttrOpen || t.kind == TokenKind::AttrClose) continue;
        auto again = lex(t.lexeme);
        ASSERT_EQ(again.size(), 2u) << t.lexeme;
        EXPECT_EQ(again[0].kind, t.kind) << t.lexeme;
    }
}

TEST(Parser, AnnotatedDrift) {
    SourceUnit u = parse_source(fx::kSmallDrift);
    ASSERT_EQ(u.functions.size(), 1u);
    const AttributeSet& a = first_loop(u).attrs;
    EXPECT_EQ(a.target, "particles");
    ASSERT_TRUE(a.target_size);
    EXPECT_EQ(a.target_size->as<Ident>().name, "size");
    EXPECT_EQ(a.inputs, (std::vector<std::string>{"pos", "vel", "updated"}));
    EXPECT_EQ(a.outputs, (std::vector<std::string>{"pos", "updated"}));
    EXPECT_FALSE(a.start_idx);
    const auto& body = first_loop(u).body->as<Block>();
    const auto& alias = body.stmts[0].as<RefBinding>();
    EXPECT_EQ(alias.name, "p");
    EXPECT_EQ(alias.type.kind, Type::Kind::Auto);
    EXPECT_TRUE(alias.target.is<Index>());
}

TEST(Parser, UnannotatedLoopHasEmptyAttributes) {
    SourceUnit u = parse_source("void f(long n) { for (long i = 0; i < n; i++) { } }");
    EXPECT_TRUE(first_loop(u).attrs.empty());
}

TEST(Parser, AttributesMustPrecedeFor) {
    EXPECT_THROW(parse_source("void f(long n) {\n [[clang::soa_conversion_target_size(n)]]\n if (n > 0) { }\n}"),
                 ParseError);
}

TEST(Parser, AttributeSpellingsAndMirrorDirection) {
    SourceUnit u = parse_source(R"(struct R { double x; };
void f(double *x, long n, long s) {
    [[clang::aos_conversion_target(R)]]
    [[clang::soa_conversion_target_size(n)]]
    [[clang::soa_conversion_start_idx(s)]]
    [[clang::aos_conversion_outputs(x)]]
    for (long i = 0; i < n; i++) { }
})");
    const AttributeSet& a = first_loop(u).attrs;
    EXPECT_EQ(a.direction, Direction::SoaToAos);
    EXPECT_EQ(a.target, "R");
    EXPECT_TRUE(a.start_idx);
    EXPECT_EQ(a.outputs, (std::vector<std::string>{"x"}));
}

TEST(Parser, UnknownAttributesPreservedVerbatim) {
    SourceUnit u = parse_source("void f(long n) {\n [[gnu::hot]]\n [[omp::directive(parallel for)]]\n for (;;) { }\n}");
    const AttributeSet& a = first_loop(u).attrs;
    EXPECT_FALSE(a.has_conversion());
    EXPECT_EQ(a.unknown, (std::vector<std::string>{"gnu::hot", "omp::directive(parallel for)"}));
}

TEST(Parser, ConsecutiveAttributeStatementsFormOneSet) {
    SourceUnit u = parse_source(fx::kSmallDrift);
    int loops = 0;
    for_each_stmt(u.functions[0].body, [&](const Stmt& s) {
        if (s.is<For>()) ++loops;
    });
    EXPECT_EQ(loops, 1);
}

TEST(Parser, ReferenceBindingForms) {
    SourceUnit u = parse_source("void f(double x) { ref double a = x; double &b = x; auto &c = x; }");
    const auto& st = u.functions[0].body.stmts;
    ASSERT_EQ(st.size(), 3u);
    EXPECT_EQ(st[0].as<RefBinding>().type, Type::scalar_type(ScalarKind::Float64));
    EXPECT_EQ(st[1].as<RefBinding>().type, Type::scalar_type(ScalarKind::Float64));
    EXPECT_EQ(st[2].as<RefBinding>().type.kind, Type::Kind::Auto);
}

TEST(Parser, LiteralDefaults) {
    SourceUnit u = parse_source("void f() { long a = 7; double b = 2.5; bool c = true; }");
    const auto& st = u.functions[0].body.stmts;
    EXPECT_EQ(st[0].as<VarDecl>().init->as<Literal>().kind, ScalarKind::Int64);
    EXPECT_EQ(st[1].as<VarDecl>().init->as<Literal>().kind, ScalarKind::Float64);
    EXPECT_EQ(st[2].as<VarDecl>().init->as<Literal>().kind, ScalarKind::Bool);
}

TEST(Parser, ErrorsCarryLocation) {
    try {
        parse_source("void f() {\n  long a = ;\n}", "x.minic");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.location().line, 2u);
        EXPECT_EQ(e.file(), "x.minic");
        EXPECT_NE(std::string(e.what()).find("x.minic:2:"), std::string::npos) << e.what();
    }
}

TEST(ParseFile, BundledDrift) {
    SourceUnit u = parse_file(fx::source_path("corpus/drift.minic"));
    EXPECT_EQ(u.records.size(), 1u);
    EXPECT_EQ(u.functions.size(), 1u);
}

TEST(ParseFile, MissingFile) { EXPECT_THROW(parse_file("/nonexistent/never.minic"), IoError); }

TEST(ParseFile, RecordOnly) {
    SourceUnit u = parse_source("struct Only { double a; int b[4]; };");
    EXPECT_EQ(u.records.size(), 1u);
    EXPECT_TRUE(u.functions.empty());
}
