#include "printer.hpp"

#include <charconv>

namespace soalens {

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, p);
    if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
    return s;
}

namespace detail {

namespace {

constexpr int kUnaryPrec = 7;

bool needs_space_before(const Expr& operand) {
    // "- -x" must not lex as "--x"
    const auto* u = operand.get_if<Unary>();
    return u && u->op == UnaryOp::Neg;
}

}  // namespace

void Printer::literal(const Literal& lit) {
    switch (lit.kind) {
        case ScalarKind::Float64:
        case ScalarKind::Float32: out_ << format_double(lit.float_value); break;
        case ScalarKind::Bool: out_ << (lit.bool_value ? "true" : "false"); break;
        default: out_ << lit.int_value; break;
    }
}

void Printer::call(const Call& c) {
    out_ << c.callee << '(';
    for (std::size_t i = 0; i < c.args.size(); ++i) {
        if (i) out_ << ", ";
        expr(c.args[i], 0);
    }
    out_ << ')';
}

void Printer::postfix_base(const Expr& e) {
    bool paren = e.is<Binary>() || e.is<Unary>();
    if (paren) out_ << '(';
    expr(e, 0);
    if (paren) out_ << ')';
}

void Printer::expr(const Expr& e, int min_prec) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Ident>) {
                ident(n);
            } else if constexpr (std::is_same_v<N, Literal>) {
                literal(n);
            } else if constexpr (std::is_same_v<N, Index>) {
                postfix_base(*n.base);
                out_ << '[';
                expr(*n.index, 0);
                out_ << ']';
            } else if constexpr (std::is_same_v<N, FieldAccess>) {
                postfix_base(*n.base);
                out_ << '.' << n.field;
            } else if constexpr (std::is_same_v<N, Unary>) {
                bool paren = kUnaryPrec < min_prec;
                if (paren) out_ << '(';
                out_ << spelling(n.op);
                if (n.op == UnaryOp::Neg && needs_space_before(*n.operand)) out_ << ' ';
                expr(*n.operand, kUnaryPrec);
                if (paren) out_ << ')';
            } else if constexpr (std::is_same_v<N, Binary>) {
                int p = precedence(n.op);
                bool paren = p < min_prec;
                if (paren) out_ << '(';
                expr(*n.lhs, p);
                out_ << ' ' << spelling(n.op) << ' ';
                expr(*n.rhs, p + 1);
                if (paren) out_ << ')';
            } else if constexpr (std::is_same_v<N, Call>) {
                call(n);
            } else if constexpr (std::is_same_v<N, NewArray>) {
                new_array(n);
            }
        },
        e.node);
}

std::string Printer::attribute_text(const AttributeSet& a) {
    std::string out;
    auto names = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
        return s;
    };
    auto add = [&](const std::string& body) { out += "[[" + body + "]]\n"; };
    const bool aos = a.direction == Direction::SoaToAos;
    if (a.target) add(std::string(aos ? "clang::aos_conversion_target(" : "clang::soa_conversion_target(") + *a.target + ")");
    if (a.target_size) add("clang::soa_conversion_target_size(" + expression(*a.target_size) + ")");
    if (a.inputs) add("clang::soa_conversion_inputs(" + names(*a.inputs) + ")");
    if (a.outputs)
        add(std::string(aos ? "clang::aos_conversion_outputs(" : "clang::soa_conversion_outputs(") + names(*a.outputs) + ")");
    if (a.start_idx) add("clang::soa_conversion_start_idx(" + expression(*a.start_idx) + ")");
    for (const auto& u : a.unknown) add(u);
    if (a.role == LoopRole::Prologue) add("soalens::conversion_prologue");
    if (a.role == LoopRole::Epilogue) add("soalens::conversion_epilogue");
    return out;
}

void Printer::provenance(const AttributeSet& a) {
    if (!config_.annotate) return;
    if (a.role == LoopRole::Prologue) comment_line("out-of-place conversion: copy the converted fields into temporaries");
    if (a.role == LoopRole::Epilogue) comment_line("synchronize the conversion outputs back");
}

void Printer::simple(const Stmt& s) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, VarDecl>) {
                var_decl(n);
            } else if constexpr (std::is_same_v<N, RefBinding>) {
                ref_binding(n);
            } else if constexpr (std::is_same_v<N, Assign>) {
                expr(n.target, 0);
                out_ << " = ";
                expr(n.value, 0);
            } else if constexpr (std::is_same_v<N, CompoundAssign>) {
                expr(n.target, 0);
                const auto* one = n.value.template get_if<Literal>();
                bool unit_step = one && one->kind == ScalarKind::Int64 && one->int_value == 1;
                if (n.increment_form && unit_step && n.op == BinaryOp::Add) {
                    out_ << "++";
                } else if (n.increment_form && unit_step && n.op == BinaryOp::Sub) {
                    out_ << "--";
                } else {
                    out_ << ' ' << spelling(n.op) << "= ";
                    expr(n.value, 0);
                }
            } else if constexpr (std::is_same_v<N, ExprStmt>) {
                expr(n.expr, 0);
            } else {
                throw InternalError("statement cannot appear in a for header");
            }
        },
        s.node);
}

void Printer::block(const Block& b) {
    out_ << "{\n";
    ++depth_;
    enter_scope();
    for (const auto& s : b.stmts) stmt(s);
    leave_scope();
    --depth_;
    line_start();
    out_ << '}';
}

void Printer::body(const Stmt& s) {
    if (const auto* b = s.get_if<Block>()) {
        out_ << ' ';
        block(*b);
        return;
    }
    out_ << '\n';
    ++depth_;
    enter_scope();
    stmt(s);
    leave_scope();
    --depth_;
}

void Printer::stmt(const Stmt& s) {
    if (const auto* b = s.get_if<Block>()) {
        line_start();
        block(*b);
        out_ << '\n';
    } else if (const auto* f = s.get_if<For>()) {
        provenance(f->attrs);
        attributes(f->attrs);
        line_start();
        enter_scope();
        out_ << "for (";
        if (f->init) simple(**f->init);
        out_ << ';';
        if (f->cond) {
            out_ << ' ';
            expr(*f->cond, 0);
        }
        out_ << ';';
        if (f->step) {
            out_ << ' ';
            simple(**f->step);
        }
        out_ << ')';
        body(*f->body);
        if (f->body->is<Block>()) out_ << '\n';
        leave_scope();
    } else if (const auto* br = s.get_if<If>()) {
        line_start();
        const If* cur = br;
        while (true) {
            out_ << "if (";
            expr(cur->cond, 0);
            out_ << ')';
            body(*cur->then_branch);
            if (!cur->else_branch) {
                if (cur->then_branch->is<Block>()) out_ << '\n';
                break;
            }
            if (cur->then_branch->is<Block>()) {
                out_ << " else";
            } else {
                line_start();
                out_ << "else";
            }
            const Stmt& alt = **cur->else_branch;
            if (const auto* next = alt.get_if<If>()) {
                out_ << ' ';
                cur = next;
                continue;
            }
            body(alt);
            if (alt.is<Block>()) out_ << '\n';
            break;
        }
    } else if (const auto* r = s.get_if<Return>()) {
        line_start();
        out_ << "return";
        if (r->value) {
            out_ << ' ';
            expr(*r->value, 0);
        }
        out_ << ";\n";
    } else if (const auto* fr = s.get_if<Free>()) {
        line_start();
        free_stmt(*fr);
        out_ << ";\n";
    } else {
        line_start();
        simple(s);
        out_ << ";\n";
    }
}

}  // namespace detail
}  // namespace soalens
