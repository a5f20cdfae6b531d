#include <charconv>
#include <set>

#include "soalens/frontend.hpp"

namespace soalens {

namespace {

class Parser {
public:
    Parser(const std::vector<Token>& toks, std::string_view source, const std::string& file)
        : toks_(toks), source_(source), file_(file) {
        if (toks_.empty() || toks_.back().kind != TokenKind::Eof)
            throw ParseError(SourceLoc{}, "token stream must end with end of input", file_);
    }

    SourceUnit unit() {
        SourceUnit u;
        u.file = file_;
        while (!at(TokenKind::Eof)) {
            if (peek().is_keyword("struct")) {
                u.records.push_back(record());
                continue;
            }
            SourceLoc loc = peek().loc;
            Type type = type_spec(/*allow_void=*/true);
            Token name = expect(TokenKind::Identifier, "declaration name");
            if (accept_punct("(")) {
                u.functions.push_back(function_rest(type, name, loc));
            } else {
                if (type.is_void()) throw ParseError(loc, "variable '" + name.lexeme + "' declared void", file_);
                VarDecl d = var_decl_rest(type, name, loc);
                expect_punct(";");
                u.globals.push_back(std::move(d));
            }
        }
        return u;
    }

private:
    // -- token helpers ---------------------------------------------------

    const Token& peek(std::size_t k = 0) const {
        return pos_ + k < toks_.size() ? toks_[pos_ + k] : toks_.back();
    }
    bool at(TokenKind k) const { return peek().kind == k; }
    const Token& take() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool accept_punct(std::string_view p) {
        if (peek().is_punct(p)) {
            take();
            return true;
        }
        return false;
    }
    static std::string describe(const Token& t) {
        if (t.kind == TokenKind::Eof) return "end of input";
        return "'" + t.lexeme + "'";
    }
    [[noreturn]] void fail(const std::string& expected) const {
        throw ParseError::expected(peek().loc, expected, describe(peek()), file_);
    }
    const Token& expect_punct(std::string_view p) {
        if (!peek().is_punct(p)) fail("'" + std::string(p) + "'");
        return take();
    }
    const Token& expect_keyword(std::string_view k) {
        if (!peek().is_keyword(k)) fail("'" + std::string(k) + "'");
        return take();
    }
    const Token& expect(TokenKind k, const std::string& what) {
        if (!at(k)) fail(what);
        return take();
    }

    // -- types -------------------------------------------------------------

    static std::optional<ScalarKind> scalar_keyword(const Token& t) {
        if (t.kind != TokenKind::Keyword) return std::nullopt;
        if (t.lexeme == "double") return ScalarKind::Float64;
        if (t.lexeme == "float") return ScalarKind::Float32;
        if (t.lexeme == "int") return ScalarKind::Int32;
        if (t.lexeme == "long") return ScalarKind::Int64;
        if (t.lexeme == "bool") return ScalarKind::Bool;
        return std::nullopt;
    }

    bool starts_type(std::size_t k = 0) const {
        const Token& t = peek(k);
        if (scalar_keyword(t)) return true;
        return t.kind == TokenKind::Identifier && records_.count(t.lexeme) != 0;
    }

    Type type_spec(bool allow_void) {
        const Token& t = peek();
        if (auto s = scalar_keyword(t)) {
            take();
            return Type::scalar_type(*s);
        }
        if (allow_void && t.is_keyword("void")) {
            take();
            return Type::void_type();
        }
        if (t.kind == TokenKind::Identifier && records_.count(t.lexeme) != 0) {
            take();
            return Type::record_type(t.lexeme);
        }
        fail("type name");
    }

    std::int64_t extent() {
        const Token& t = expect(TokenKind::IntLiteral, "array extent");
        std::int64_t v = int_value(t);
        if (v <= 0) throw ParseError(t.loc, "array extent must be positive", file_);
        expect_punct("]");
        return v;
    }

    std::int64_t int_value(const Token& t) const {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
        if (ec != std::errc() || p != t.lexeme.data() + t.lexeme.size())
            throw ParseError(t.loc, "integer literal out of range", file_);
        return v;
    }

    // -- declarations ------------------------------------------------------

    RecordDef record() {
        RecordDef r;
        r.loc = expect_keyword("struct").loc;
        Token name = expect(TokenKind::Identifier, "record name");
        r.name = name.lexeme;
        if (records_.count(r.name) != 0) throw ParseError(name.loc, "redefinition of record '" + r.name + "'", file_);
        expect_punct("{");
        while (!accept_punct("}")) {
            FieldDecl f;
            f.loc = peek().loc;
            f.type = type_spec(/*allow_void=*/false);
            f.name = expect(TokenKind::Identifier, "field name").lexeme;
            if (accept_punct("[")) f.type.extent = extent();
            expect_punct(";");
            r.fields.push_back(std::move(f));
        }
        expect_punct(";");
        records_.insert(r.name);
        return r;
    }

    FunctionDef function_rest(Type ret, const Token& name, SourceLoc loc) {
        FunctionDef fn;
        fn.return_type = std::move(ret);
        fn.name = name.lexeme;
        fn.loc = loc;
        if (!peek().is_punct(")")) {
            do {
                Param p;
                p.loc = peek().loc;
                p.type = type_spec(/*allow_void=*/false);
                if (accept_punct("*")) p.type.pointer = true;
                p.name = expect(TokenKind::Identifier, "parameter name").lexeme;
                fn.params.push_back(std::move(p));
            } while (accept_punct(","));
        }
        expect_punct(")");
        fn.body = block();
        return fn;
    }

    // After `type name`: optional [extent], optional initializer.
    VarDecl var_decl_rest(Type type, const Token& name, SourceLoc loc) {
        VarDecl d;
        d.loc = loc;
        d.name = name.lexeme;
        if (accept_punct("[")) type.extent = extent();
        d.type = std::move(type);
        if (accept_punct("=")) d.init = expr();
        return d;
    }

    // -- statements --------------------------------------------------------

    Block block() {
        expect_punct("{");
        Block b;
        while (!accept_punct("}")) {
            if (at(TokenKind::Eof)) fail("'}'");
            b.stmts.push_back(statement());
        }
        return b;
    }

    Stmt statement() {
        const Token& t = peek();
        SourceLoc loc = t.loc;
        if (t.kind == TokenKind::AttrOpen) return attributed_for();
        if (t.is_punct("{")) return Stmt{block(), loc};
        if (t.is_keyword("for")) return for_stmt(AttributeSet{});
        if (t.is_keyword("if")) return if_stmt();
        if (t.is_keyword("return")) {
            take();
            Return r;
            if (!peek().is_punct(";")) r.value = expr();
            expect_punct(";");
            return Stmt{std::move(r), loc};
        }
        if (t.is_keyword("delete")) {
            take();
            expect_punct("[");
            expect_punct("]");
            Free f{expect(TokenKind::Identifier, "array name").lexeme};
            expect_punct(";");
            return Stmt{std::move(f), loc};
        }
        Stmt s = simple_statement();
        expect_punct(";");
        return s;
    }

    // Statements that may appear in a for header: declarations, reference
    // bindings, assignments, increments, calls.
    Stmt simple_statement() {
        const Token& t = peek();
        SourceLoc loc = t.loc;
        if (t.is_keyword("auto")) {
            take();
            expect_punct("&");
            return ref_rest(Type::auto_type(), loc);
        }
        if (t.is_keyword("ref")) {
            take();
            Type type = type_spec(false);
            return ref_rest(std::move(type), loc);
        }
        if (starts_type() && (peek(1).kind == TokenKind::Identifier || peek(1).is_punct("*") || peek(1).is_punct("&"))) {
            Type type = type_spec(false);
            if (accept_punct("&")) return ref_rest(std::move(type), loc);
            if (accept_punct("*")) type.pointer = true;
            Token name = expect(TokenKind::Identifier, "variable name");
            return Stmt{var_decl_rest(std::move(type), name, loc), loc};
        }
        if (t.is_punct("++") || t.is_punct("--")) {
            bool inc = take().lexeme == "++";
            Expr target = postfix();
            return Stmt{increment(std::move(target), inc), loc};
        }
        Expr lhs = expr();
        if (accept_punct("=")) return Stmt{Assign{std::move(lhs), expr()}, loc};
        static const std::pair<const char*, BinaryOp> compound[] = {
            {"+=", BinaryOp::Add}, {"-=", BinaryOp::Sub}, {"*=", BinaryOp::Mul}, {"/=", BinaryOp::Div}};
        for (const auto& [p, op] : compound)
            if (accept_punct(p)) return Stmt{CompoundAssign{op, std::move(lhs), expr(), false}, loc};
        if (peek().is_punct("++") || peek().is_punct("--")) {
            bool inc = take().lexeme == "++";
            return Stmt{increment(std::move(lhs), inc), loc};
        }
        if (!lhs.is<Call>()) fail("assignment or call statement");
        return Stmt{ExprStmt{std::move(lhs)}, loc};
    }

    static CompoundAssign increment(Expr target, bool inc) {
        SourceLoc loc = target.loc;
        return CompoundAssign{inc ? BinaryOp::Add : BinaryOp::Sub, std::move(target), make_int(1, loc), true};
    }

    Stmt ref_rest(Type type, SourceLoc loc) {
        Token name = expect(TokenKind::Identifier, "reference name");
        expect_punct("=");
        return Stmt{RefBinding{std::move(type), name.lexeme, expr()}, loc};
    }

    Stmt if_stmt() {
        SourceLoc loc = expect_keyword("if").loc;
        expect_punct("(");
        Expr cond = expr();
        expect_punct(")");
        If s{std::move(cond), statement(), std::nullopt};
        if (peek().is_keyword("else")) {
            take();
            s.else_branch = statement();
        }
        return Stmt{std::move(s), loc};
    }

    Stmt for_stmt(AttributeSet attrs) {
        SourceLoc loc = expect_keyword("for").loc;
        For f;
        f.attrs = std::move(attrs);
        expect_punct("(");
        if (!peek().is_punct(";")) f.init = simple_statement();
        expect_punct(";");
        if (!peek().is_punct(";")) f.cond = expr();
        expect_punct(";");
        if (!peek().is_punct(")")) f.step = simple_statement();
        expect_punct(")");
        f.body = statement();
        return Stmt{std::move(f), loc};
    }

    // -- attributes --------------------------------------------------------

    Stmt attributed_for() {
        AttributeSet attrs;
        attrs.loc = peek().loc;
        while (at(TokenKind::AttrOpen)) {
            take();
            do {
                attribute(attrs);
            } while (accept_punct(","));
            expect(TokenKind::AttrClose, "']]'");
        }
        if (!peek().is_keyword("for"))
            throw ParseError::expected(peek().loc, "for statement after attributes", describe(peek()), file_);
        return for_stmt(std::move(attrs));
    }

    std::string verbatim(std::size_t first, std::size_t last) const {
        const Token& a = toks_[first];
        const Token& b = toks_[last];
        if (!source_.empty() && b.loc.offset + b.lexeme.size() <= source_.size())
            return std::string(source_.substr(a.loc.offset, b.loc.offset + b.lexeme.size() - a.loc.offset));
        std::string s;
        for (std::size_t i = first; i <= last; ++i) s += toks_[i].lexeme;
        return s;
    }

    std::vector<std::string> name_list() {
        std::vector<std::string> names;
        expect_punct("(");
        if (!peek().is_punct(")")) {
            do {
                names.push_back(expect(TokenKind::Identifier, "field name").lexeme);
            } while (accept_punct(","));
        }
        expect_punct(")");
        return names;
    }

    void attribute(AttributeSet& attrs) {
        std::size_t first = pos_;
        SourceLoc loc = peek().loc;
        std::string name = expect(TokenKind::Identifier, "attribute name").lexeme;
        if (accept_punct("::")) name += "::" + expect(TokenKind::Identifier, "attribute name").lexeme;

        auto once = [&](bool present) {
            if (present) throw ParseError(loc, "duplicate attribute '" + name + "'", file_);
        };
        if (name == "clang::soa_conversion_target" || name == "clang::aos_conversion_target") {
            once(attrs.target.has_value());
            expect_punct("(");
            attrs.target = expect(TokenKind::Identifier, "conversion target").lexeme;
            expect_punct(")");
            attrs.direction = name[7] == 's' ? Direction::AosToSoa : Direction::SoaToAos;
        } else if (name == "clang::soa_conversion_target_size") {
            once(attrs.target_size.has_value());
            expect_punct("(");
            attrs.target_size = expr();
            expect_punct(")");
        } else if (name == "clang::soa_conversion_inputs") {
            once(attrs.inputs.has_value());
            attrs.inputs = name_list();
        } else if (name == "clang::soa_conversion_outputs" || name == "clang::aos_conversion_outputs") {
            once(attrs.outputs.has_value());
            attrs.outputs = name_list();
        } else if (name == "clang::soa_conversion_start_idx") {
            once(attrs.start_idx.has_value());
            expect_punct("(");
            attrs.start_idx = expr();
            expect_punct(")");
        } else if (name == "soalens::conversion_prologue" || name == "soalens::conversion_epilogue") {
            if (attrs.role != LoopRole::None) throw ParseError(loc, "duplicate loop role attribute", file_);
            attrs.role = name == "soalens::conversion_prologue" ? LoopRole::Prologue : LoopRole::Epilogue;
        } else {
            if (peek().is_punct("(")) {
                int depth = 0;
                do {
                    if (at(TokenKind::Eof) || at(TokenKind::AttrClose)) fail("')'");
                    if (peek().is_punct("(")) ++depth;
                    if (peek().is_punct(")")) --depth;
                    take();
                } while (depth > 0);
            }
            attrs.unknown.push_back(verbatim(first, pos_ - 1));
        }
    }

    // -- expressions -------------------------------------------------------

    Expr expr() { return binary(1); }

    static std::optional<BinaryOp> binary_op(const Token& t) {
        if (t.kind != TokenKind::Punct) return std::nullopt;
        static const std::pair<const char*, BinaryOp> ops[] = {
            {"+", BinaryOp::Add}, {"-", BinaryOp::Sub}, {"*", BinaryOp::Mul}, {"/", BinaryOp::Div},
            {"<", BinaryOp::Lt},  {"<=", BinaryOp::Le}, {">", BinaryOp::Gt},  {">=", BinaryOp::Ge},
            {"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}, {"&&", BinaryOp::And}, {"||", BinaryOp::Or}};
        for (const auto& [s, op] : ops)
            if (t.lexeme == s) return op;
        return std::nullopt;
    }

    // Precedence climbing; all binary operators are left-associative.
    Expr binary(int min_prec) {
        Expr lhs = unary();
        while (true) {
            auto op = binary_op(peek());
            if (!op || precedence(*op) < min_prec) return lhs;
            take();
            Expr rhs = binary(precedence(*op) + 1);
            lhs = make_binary(*op, std::move(lhs), std::move(rhs));
        }
    }

    Expr unary() {
        const Token& t = peek();
        if (t.is_punct("-") || t.is_punct("!")) {
            SourceLoc loc = take().loc;
            UnaryOp op = t.lexeme == "-" ? UnaryOp::Neg : UnaryOp::Not;
            return Expr{Unary{op, unary()}, loc};
        }
        return postfix();
    }

    Expr postfix() {
        Expr e = primary();
        while (true) {
            if (accept_punct("[")) {
                Expr idx = expr();
                expect_punct("]");
                e = make_index(std::move(e), std::move(idx));
            } else if (accept_punct(".")) {
                e = make_field(std::move(e), expect(TokenKind::Identifier, "field name").lexeme);
            } else {
                return e;
            }
        }
    }

    Expr primary() {
        const Token& t = peek();
        SourceLoc loc = t.loc;
        switch (t.kind) {
            case TokenKind::IntLiteral: take(); return Expr{Literal::integer(int_value(t)), loc};
            case TokenKind::FloatLiteral: {
                take();
                double v = 0;
                auto [p, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
                if (ec != std::errc() || p != t.lexeme.data() + t.lexeme.size())
                    throw ParseError(loc, "floating literal out of range", file_);
                return Expr{Literal::floating(v), loc};
            }
            case TokenKind::Identifier: {
                take();
                if (accept_punct("(")) {
                    Call c{t.lexeme, {}};
                    if (!peek().is_punct(")")) {
                        do {
                            c.args.push_back(expr());
                        } while (accept_punct(","));
                    }
                    expect_punct(")");
                    return Expr{std::move(c), loc};
                }
                return make_ident(t.lexeme, loc);
            }
            case TokenKind::Keyword:
                if (t.lexeme == "true" || t.lexeme == "false") {
                    take();
                    return Expr{Literal::boolean(t.lexeme == "true"), loc};
                }
                if (t.lexeme == "new") {
                    take();
                    Type elem = type_spec(false);
                    expect_punct("[");
                    Expr len = expr();
                    expect_punct("]");
                    return Expr{NewArray{std::move(elem), std::move(len)}, loc};
                }
                break;
            case TokenKind::Punct:
                if (t.lexeme == "(") {
                    take();
                    Expr e = expr();
                    expect_punct(")");
                    return e;
                }
                break;
            default: break;
        }
        fail("expression");
    }

    const std::vector<Token>& toks_;
    std::string_view source_;
    const std::string& file_;
    std::size_t pos_ = 0;
    std::set<std::string, std::less<>> records_;
};

}  // namespace

SourceUnit parse(const std::vector<Token>& tokens, std::string_view source, const std::string& file) {
    return Parser(tokens, source, file).unit();
}

SourceUnit parse_source(std::string_view source, const std::string& file) {
    return parse(lex(source, file), source, file);
}

SourceUnit parse_file(const std::string& path) {
    std::string text = read_text_file(path);
    return parse_source(text, path);
}

}  // namespace soalens
