#include <array>
#include <set>

#include "soalens/semantics.hpp"

namespace soalens {

namespace {

constexpr std::array<Builtin, 5> kBuiltins = {{{"sqrt", 1}, {"pow", 2}, {"abs", 1}, {"min", 2}, {"max", 2}}};

bool is_lvalue(const Expr& e) { return e.is<Ident>() || e.is<Index>() || e.is<FieldAccess>(); }

// Scalars convert implicitly; aggregates and pointers need an exact match.
bool assignable(const Type& to, const Type& from) {
    if (to.is_scalar() && from.is_scalar()) return true;
    return to == from && !to.extent;
}

}  // namespace

std::string_view to_string(DiagKind kind) {
    switch (kind) {
        case DiagKind::MissingSize: return "missing-size";
        case DiagKind::MissingTarget: return "missing-target";
        case DiagKind::UnknownTarget: return "unknown-target";
        case DiagKind::UnknownField: return "unknown-field";
        case DiagKind::IllegalCall: return "illegal-call";
        case DiagKind::Alias: return "alias";
        case DiagKind::WholeElement: return "whole-element";
        case DiagKind::UnsupportedAccess: return "unsupported-access";
        case DiagKind::NestedConversion: return "nested-conversion";
        case DiagKind::ControlFlow: return "control-flow";
        case DiagKind::Type: return "type";
        case DiagKind::Recursion: return "recursion";
    }
    return "?";
}

std::string Diagnostic::format(const std::string& file) const {
    return format_location(file, loc) + ": error: " + message;
}

const Builtin* find_builtin(std::string_view name) {
    for (const auto& b : kBuiltins)
        if (b.name == name) return &b;
    return nullptr;
}

ScalarKind promote(ScalarKind k) { return k == ScalarKind::Bool ? ScalarKind::Int32 : k; }

ScalarKind common_type(ScalarKind a, ScalarKind b) {
    a = promote(a);
    b = promote(b);
    if (a == ScalarKind::Float64 || b == ScalarKind::Float64) return ScalarKind::Float64;
    if (a == ScalarKind::Float32 || b == ScalarKind::Float32) return ScalarKind::Float32;
    if (a == ScalarKind::Int64 || b == ScalarKind::Int64) return ScalarKind::Int64;
    return ScalarKind::Int32;
}

TypeScope::TypeScope(const SourceUnit& unit) : unit_(unit) {
    frames_.emplace_back();
    for (const auto& g : unit.globals) frames_.front().emplace(g.name, g.type);
}

bool TypeScope::declare(const std::string& name, Type type) {
    return frames_.back().emplace(name, std::move(type)).second;
}

const Type* TypeScope::lookup(const std::string& name) const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
        auto f = it->find(name);
        if (f != it->end()) return &f->second;
    }
    return nullptr;
}

std::optional<Type> TypeScope::type_of(const Expr& e) const {
    return std::visit(
        [&](const auto& n) -> std::optional<Type> {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Ident>) {
                const Type* t = lookup(n.name);
                return t ? std::optional<Type>(*t) : std::nullopt;
            } else if constexpr (std::is_same_v<N, Literal>) {
                return Type::scalar_type(n.kind);
            } else if constexpr (std::is_same_v<N, Index>) {
                auto base = type_of(*n.base);
                auto idx = type_of(*n.index);
                if (!base || !base->is_array() || !idx || !idx->is_scalar() || !is_integral(idx->scalar))
                    return std::nullopt;
                return base->element();
            } else if constexpr (std::is_same_v<N, FieldAccess>) {
                auto base = type_of(*n.base);
                if (!base || !base->is_record()) return std::nullopt;
                const RecordDef* r = unit_.find_record(base->record);
                const FieldDecl* f = r ? r->find_field(n.field) : nullptr;
                return f ? std::optional<Type>(f->type) : std::nullopt;
            } else if constexpr (std::is_same_v<N, Unary>) {
                auto t = type_of(*n.operand);
                if (!t || !t->is_scalar()) return std::nullopt;
                return Type::scalar_type(n.op == UnaryOp::Not ? ScalarKind::Bool : promote(t->scalar));
            } else if constexpr (std::is_same_v<N, Binary>) {
                auto l = type_of(*n.lhs);
                auto r = type_of(*n.rhs);
                if (!l || !r || !l->is_scalar() || !r->is_scalar()) return std::nullopt;
                if (is_comparison(n.op) || is_logical(n.op)) return Type::scalar_type(ScalarKind::Bool);
                return Type::scalar_type(common_type(l->scalar, r->scalar));
            } else if constexpr (std::is_same_v<N, Call>) {
                if (const Builtin* b = find_builtin(n.callee)) {
                    if (n.args.size() != b->arity) return std::nullopt;
                    std::vector<ScalarKind> kinds;
                    for (const auto& a : n.args) {
                        auto t = type_of(a);
                        if (!t || !t->is_scalar()) return std::nullopt;
                        kinds.push_back(t->scalar);
                    }
                    if (b->name == "sqrt" || b->name == "pow") return Type::scalar_type(ScalarKind::Float64);
                    if (b->name == "abs") return Type::scalar_type(promote(kinds[0]));
                    return Type::scalar_type(common_type(kinds[0], kinds[1]));
                }
                const FunctionDef* fn = unit_.find_function(n.callee);
                if (!fn || fn->params.size() != n.args.size()) return std::nullopt;
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    auto t = type_of(n.args[i]);
                    if (!t || !assignable(fn->params[i].type, *t)) return std::nullopt;
                }
                return fn->return_type;
            } else {
                auto len = type_of(*n.length);
                if (!len || !len->is_scalar() || !is_integral(len->scalar)) return std::nullopt;
                Type t = n.element;
                t.pointer = true;
                return t;
            }
        },
        e.node);
}

namespace {

class Checker {
public:
    explicit Checker(const SourceUnit& unit) : unit_(unit), scope_(unit) {}

    std::vector<Diagnostic> run() {
        std::set<std::string> names;
        for (const auto& r : unit_.records) {
            if (!names.insert(r.name).second) error(r.loc, "duplicate record '" + r.name + "'");
            std::set<std::string> fields;
            for (const auto& f : r.fields) {
                if (!fields.insert(f.name).second)
                    error(f.loc, "duplicate field '" + f.name + "' in record '" + r.name + "'");
                check_type_ref(f.type, f.loc);
            }
            try {
                (void)build_layout(r, unit_);
            } catch (const RecursionError& ex) {
                diags_.push_back(Diagnostic{DiagKind::Recursion, r.loc, ex.what()});
            } catch (const Error&) {
                // unknown nested record already reported
            }
        }
        for (const auto& f : unit_.functions) {
            if (!names.insert(f.name).second) error(f.loc, "duplicate function '" + f.name + "'");
            if (find_builtin(f.name)) error(f.loc, "function '" + f.name + "' shadows a builtin");
        }
        for (const auto& g : unit_.globals) {
            check_type_ref(g.type, g.loc);
            if (g.type.pointer) error(g.loc, "global arrays must have a fixed extent");
            if (g.init) {
                if (g.type.extent || !g.type.is_scalar()) error(g.loc, "only scalar globals may have an initializer");
                expect_value(*g.init);
            }
        }
        for (const auto& f : unit_.functions) function(f);
        return std::move(diags_);
    }

private:
    void error(SourceLoc loc, std::string msg) { diags_.push_back(Diagnostic{DiagKind::Type, loc, std::move(msg)}); }

    void check_type_ref(const Type& t, SourceLoc loc) {
        if (t.kind == Type::Kind::Record && !unit_.find_record(t.record))
            error(loc, "unknown record type '" + t.record + "'");
    }

    void function(const FunctionDef& fn) {
        current_ = &fn;
        scope_.push();
        check_type_ref(fn.return_type, fn.loc);
        if (fn.return_type.kind == Type::Kind::Record || fn.return_type.is_array())
            error(fn.loc, "functions may only return scalars or void");
        for (const auto& p : fn.params) {
            check_type_ref(p.type, p.loc);
            if (!scope_.declare(p.name, p.type)) error(p.loc, "duplicate parameter '" + p.name + "'");
        }
        block(fn.body);
        scope_.pop();
    }

    void block(const Block& b) {
        scope_.push();
        for (const auto& s : b.stmts) stmt(s);
        scope_.pop();
    }

    std::optional<Type> expect_value(const Expr& e) {
        std::size_t before = diags_.size();
        check_expr(e);
        auto t = scope_.type_of(e);
        if (!t) {
            if (diags_.size() == before) error(e.loc, "ill-typed expression");
        } else if (t->is_void()) {
            error(e.loc, "void value used in an expression");
            return std::nullopt;
        }
        return t;
    }

    void expect_scalar(const Expr& e, const char* what) {
        auto t = expect_value(e);
        if (t && !t->is_scalar()) error(e.loc, std::string(what) + " must be a scalar");
    }

    // Pinpoints the innermost ill-typed subexpression with a readable message.
    void check_expr(const Expr& e) {
        std::visit(
            [&](const auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, Ident>) {
                    if (!scope_.lookup(n.name)) error(e.loc, "use of undeclared identifier '" + n.name + "'");
                } else if constexpr (std::is_same_v<N, Index>) {
                    check_expr(*n.base);
                    check_expr(*n.index);
                    auto b = scope_.type_of(*n.base);
                    if (b && !b->is_array()) error(e.loc, "subscripted value is not an array");
                    auto i = scope_.type_of(*n.index);
                    if (i && !(i->is_scalar() && is_integral(i->scalar))) error(e.loc, "array index is not an integer");
                } else if constexpr (std::is_same_v<N, FieldAccess>) {
                    check_expr(*n.base);
                    auto b = scope_.type_of(*n.base);
                    if (b && !b->is_record()) {
                        error(e.loc, "member access on a non-record value");
                    } else if (b) {
                        const RecordDef* r = unit_.find_record(b->record);
                        if (r && !r->find_field(n.field))
                            error(e.loc, "no field '" + n.field + "' in record '" + r->name + "'");
                    }
                } else if constexpr (std::is_same_v<N, Unary>) {
                    check_expr(*n.operand);
                } else if constexpr (std::is_same_v<N, Binary>) {
                    check_expr(*n.lhs);
                    check_expr(*n.rhs);
                    auto l = scope_.type_of(*n.lhs);
                    auto r = scope_.type_of(*n.rhs);
                    if ((l && !l->is_scalar()) || (r && !r->is_scalar()))
                        error(e.loc, "operands of '" + std::string(spelling(n.op)) + "' must be scalars");
                } else if constexpr (std::is_same_v<N, Call>) {
                    for (const auto& a : n.args) check_expr(a);
                    const Builtin* b = find_builtin(n.callee);
                    const FunctionDef* fn = unit_.find_function(n.callee);
                    if (!b && !fn) {
                        error(e.loc, "call to undeclared function '" + n.callee + "'");
                    } else if ((b && b->arity != n.args.size()) || (fn && fn->params.size() != n.args.size())) {
                        error(e.loc, "wrong number of arguments to '" + n.callee + "'");
                    } else if (fn) {
                        for (std::size_t i = 0; i < n.args.size(); ++i) {
                            auto t = scope_.type_of(n.args[i]);
                            if (t && !assignable(fn->params[i].type, *t))
                                error(n.args[i].loc, "argument " + std::to_string(i + 1) + " of '" + n.callee +
                                                         "' has type " + to_string(*t) + ", expected " +
                                                         to_string(fn->params[i].type));
                        }
                    }
                } else if constexpr (std::is_same_v<N, NewArray>) {
                    check_expr(*n.length);
                }
            },
            e.node);
    }

    void assignment_target(const Expr& target) {
        if (!is_lvalue(target)) {
            error(target.loc, "expression is not assignable");
            return;
        }
        if (const auto* id = target.get_if<Ident>()) {
            if (!scope_.lookup(id->name)) return;  // reported by check_expr
        }
    }

    void no_new(const Expr& e) {
        for_each_expr(e, [&](const Expr& sub) {
            if (sub.is<NewArray>()) error(sub.loc, "new[] is only allowed as a variable initializer");
        });
    }

    void stmt(const Stmt& s) {
        std::visit(
            [&](const auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, VarDecl>) {
                    check_type_ref(n.type, s.loc);
                    if (n.init) {
                        const Expr& init = *n.init;
                        if (const auto* na = init.get_if<NewArray>()) no_new(*na->length);
                        else no_new(init);
                        auto t = expect_value(init);
                        if (t && !assignable(n.type, *t))
                            error(init.loc, "cannot initialize '" + n.name + "' of type " + to_string(n.type) +
                                                " with " + to_string(*t));
                    } else if (n.type.pointer) {
                        error(s.loc, "array base '" + n.name + "' must be initialized");
                    }
                    if (!scope_.declare(n.name, n.type)) error(s.loc, "redeclaration of '" + n.name + "'");
                } else if constexpr (std::is_same_v<N, RefBinding>) {
                    no_new(n.target);
                    auto t = expect_value(n.target);
                    if (!is_lvalue(n.target)) error(n.target.loc, "reference must bind to an lvalue");
                    Type bound = t.value_or(Type::void_type());
                    if (t && n.type.kind != Type::Kind::Auto && !(n.type == *t))
                        error(s.loc, "reference '" + n.name + "' of type " + to_string(n.type) + " bound to " +
                                         to_string(*t));
                    if (!scope_.declare(n.name, bound)) error(s.loc, "redeclaration of '" + n.name + "'");
                } else if constexpr (std::is_same_v<N, Assign>) {
                    no_new(n.target);
                    no_new(n.value);
                    auto lt = expect_value(n.target);
                    auto rt = expect_value(n.value);
                    assignment_target(n.target);
                    if (lt && rt && !assignable(*lt, *rt))
                        error(s.loc, "cannot assign " + to_string(*rt) + " to " + to_string(*lt));
                } else if constexpr (std::is_same_v<N, CompoundAssign>) {
                    no_new(n.target);
                    no_new(n.value);
                    assignment_target(n.target);
                    expect_scalar(n.target, "compound assignment target");
                    expect_scalar(n.value, "compound assignment operand");
                } else if constexpr (std::is_same_v<N, For>) {
                    scope_.push();
                    if (n.init) stmt(**n.init);
                    if (n.cond) {
                        no_new(*n.cond);
                        expect_scalar(*n.cond, "loop condition");
                    }
                    if (n.step) stmt(**n.step);
                    if (n.attrs.target_size) expect_scalar(*n.attrs.target_size, "conversion size");
                    if (n.attrs.start_idx) expect_scalar(*n.attrs.start_idx, "conversion start index");
                    stmt(*n.body);
                    scope_.pop();
                } else if constexpr (std::is_same_v<N, If>) {
                    no_new(n.cond);
                    expect_scalar(n.cond, "condition");
                    scope_.push();
                    stmt(*n.then_branch);
                    scope_.pop();
                    if (n.else_branch) {
                        scope_.push();
                        stmt(**n.else_branch);
                        scope_.pop();
                    }
                } else if constexpr (std::is_same_v<N, ExprStmt>) {
                    no_new(n.expr);
                    check_expr(n.expr);
                    if (!n.expr.template is<Call>()) error(s.loc, "expression statement must be a call");
                    else if (!scope_.type_of(n.expr)) error(s.loc, "ill-typed call");
                } else if constexpr (std::is_same_v<N, Return>) {
                    if (n.value) {
                        no_new(*n.value);
                        auto t = expect_value(*n.value);
                        if (current_->return_type.is_void()) error(s.loc, "void function returns a value");
                        else if (t && !assignable(current_->return_type, *t)) error(s.loc, "return type mismatch");
                    } else if (!current_->return_type.is_void()) {
                        error(s.loc, "non-void function must return a value");
                    }
                } else if constexpr (std::is_same_v<N, Block>) {
                    block(n);
                } else if constexpr (std::is_same_v<N, Free>) {
                    const Type* t = scope_.lookup(n.name);
                    if (!t || !t->pointer) error(s.loc, "delete[] of '" + n.name + "', which is not an array base");
                }
            },
            s.node);
    }

    const SourceUnit& unit_;
    TypeScope scope_;
    const FunctionDef* current_ = nullptr;
    std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> typecheck(const SourceUnit& unit) { return Checker(unit).run(); }

}  // namespace soalens
