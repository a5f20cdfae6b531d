#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "soalens/box.hpp"
#include "soalens/errors.hpp"

// AST for miniC, the annotated C subset accepted by soalens.
//
// Nodes are plain values: copying a node deep-copies its subtree and
// operator== compares structure (source locations are ignored).

namespace soalens {

enum class ScalarKind : std::uint8_t { Float64, Float32, Int32, Int64, Bool };

std::string_view scalar_name(ScalarKind kind);  // miniC keyword: double, float, int, long, bool
std::size_t scalar_size(ScalarKind kind);
bool is_floating(ScalarKind kind);
bool is_integral(ScalarKind kind);  // bool counts as integral

struct Type {
    enum class Kind : std::uint8_t { Void, Scalar, Record, Auto };

    Kind kind = Kind::Void;
    ScalarKind scalar = ScalarKind::Int64;
    std::string record;
    std::optional<std::int64_t> extent;  // fixed-size array T name[extent]
    bool pointer = false;                // array base, spelled T *name

    static Type void_type() { return {}; }
    static Type auto_type() {
        Type t;
        t.kind = Kind::Auto;
        return t;
    }
    static Type scalar_type(ScalarKind s) {
        Type t;
        t.kind = Kind::Scalar;
        t.scalar = s;
        return t;
    }
    static Type record_type(std::string name) {
        Type t;
        t.kind = Kind::Record;
        t.record = std::move(name);
        return t;
    }

    [[nodiscard]] bool is_void() const { return kind == Kind::Void; }
    [[nodiscard]] bool is_scalar() const { return kind == Kind::Scalar && !extent && !pointer; }
    [[nodiscard]] bool is_record() const { return kind == Kind::Record && !extent && !pointer; }
    [[nodiscard]] bool is_array() const { return extent.has_value() || pointer; }
    // Type with the outermost array/pointer layer removed.
    [[nodiscard]] Type element() const {
        Type t = *this;
        t.extent.reset();
        t.pointer = false;
        return t;
    }

    bool operator==(const Type&) const = default;
};

std::string to_string(const Type& type);

enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnaryOp : std::uint8_t { Neg, Not };

std::string_view spelling(BinaryOp op);
std::string_view spelling(UnaryOp op);
int precedence(BinaryOp op);  // higher binds tighter
bool is_comparison(BinaryOp op);
bool is_logical(BinaryOp op);

struct Expr;

struct Ident {
    std::string name;
    bool operator==(const Ident&) const = default;
};

struct Literal {
    ScalarKind kind = ScalarKind::Int64;
    std::int64_t int_value = 0;
    double float_value = 0.0;
    bool bool_value = false;

    static Literal integer(std::int64_t v) { return {ScalarKind::Int64, v, 0.0, false}; }
    static Literal floating(double v) { return {ScalarKind::Float64, 0, v, false}; }
    static Literal boolean(bool v) { return {ScalarKind::Bool, 0, 0.0, v}; }

    friend bool operator==(const Literal& a, const Literal& b);
};

struct Index {
    Box<Expr> base;
    Box<Expr> index;
    bool operator==(const Index&) const = default;
};

struct FieldAccess {
    Box<Expr> base;
    std::string field;
    bool operator==(const FieldAccess&) const = default;
};

struct Unary {
    UnaryOp op = UnaryOp::Neg;
    Box<Expr> operand;
    bool operator==(const Unary&) const = default;
};

struct Binary {
    BinaryOp op = BinaryOp::Add;
    Box<Expr> lhs;
    Box<Expr> rhs;
    bool operator==(const Binary&) const = default;
};

struct Call {
    std::string callee;
    std::vector<Expr> args;
    friend bool operator==(const Call& a, const Call& b);
};

// new T[length]; only valid as a variable initializer.
struct NewArray {
    Type element;
    Box<Expr> length;
    bool operator==(const NewArray&) const = default;
};

struct Expr {
    using Node = std::variant<Ident, Literal, Index, FieldAccess, Unary, Binary, Call, NewArray>;

    Node node;
    SourceLoc loc;

    template <typename T>
    [[nodiscard]] bool is() const { return std::holds_alternative<T>(node); }
    template <typename T>
    [[nodiscard]] const T& as() const { return std::get<T>(node); }
    template <typename T>
    T& as() { return std::get<T>(node); }
    template <typename T>
    [[nodiscard]] const T* get_if() const { return std::get_if<T>(&node); }
    template <typename T>
    T* get_if() { return std::get_if<T>(&node); }

    bool operator==(const Expr&) const = default;
};

inline bool operator==(const Call& a, const Call& b) { return a.callee == b.callee && a.args == b.args; }

Expr make_ident(std::string name, SourceLoc loc = {});
Expr make_int(std::int64_t v, SourceLoc loc = {});
Expr make_index(Expr base, Expr index);
Expr make_field(Expr base, std::string field);
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs);

enum class Direction : std::uint8_t { AosToSoa, SoaToAos };
// Marks compiler-generated conversion loops so the interpreter can account
// for copy traffic. Spelled [[soalens::conversion_prologue]] and
// [[soalens::conversion_epilogue]].
enum class LoopRole : std::uint8_t { None, Prologue, Epilogue };

// Attributes written on the lines directly above a for statement.
struct AttributeSet {
    std::optional<std::string> target;
    Direction direction = Direction::AosToSoa;
    std::optional<Expr> target_size;
    std::optional<std::vector<std::string>> inputs;
    std::optional<std::vector<std::string>> outputs;
    std::optional<Expr> start_idx;
    std::vector<std::string> unknown;  // unrecognized attributes, verbatim
    LoopRole role = LoopRole::None;
    SourceLoc loc;

    // True if any soa_/aos_conversion attribute is present.
    [[nodiscard]] bool has_conversion() const {
        return target || target_size || inputs || outputs || start_idx;
    }
    [[nodiscard]] bool empty() const { return !has_conversion() && unknown.empty() && role == LoopRole::None; }

    bool operator==(const AttributeSet&) const = default;
};

struct Stmt;

struct VarDecl {
    Type type;
    std::string name;
    std::optional<Expr> init;
    SourceLoc loc;
    bool operator==(const VarDecl&) const = default;
};

// auto &name = expr;   or   T &name = expr;   (also spelled ref T name = expr;)
struct RefBinding {
    Type type;  // Kind::Auto for auto
    std::string name;
    Expr target;
    bool operator==(const RefBinding&) const = default;
};

struct Assign {
    Expr target;
    Expr value;
    bool operator==(const Assign&) const = default;
};

// target op= value. increment_form records the x++ / x-- spelling.
struct CompoundAssign {
    BinaryOp op = BinaryOp::Add;
    Expr target;
    Expr value;
    bool increment_form = false;
    bool operator==(const CompoundAssign&) const = default;
};

struct Block {
    std::vector<Stmt> stmts;
    friend bool operator==(const Block& a, const Block& b);
};

struct For {
    std::optional<Box<Stmt>> init;
    std::optional<Expr> cond;
    std::optional<Box<Stmt>> step;
    Box<Stmt> body;
    AttributeSet attrs;
    bool operator==(const For&) const = default;
};

struct If {
    Expr cond;
    Box<Stmt> then_branch;
    std::optional<Box<Stmt>> else_branch;
    bool operator==(const If&) const = default;
};

struct ExprStmt {
    Expr expr;
    bool operator==(const ExprStmt&) const = default;
};

struct Return {
    std::optional<Expr> value;
    bool operator==(const Return&) const = default;
};

// delete[] name;
struct Free {
    std::string name;
    bool operator==(const Free&) const = default;
};

struct Stmt {
    using Node = std::variant<VarDecl, RefBinding, Assign, CompoundAssign, For, If, ExprStmt, Return, Block, Free>;

    Node node;
    SourceLoc loc;

    template <typename T>
    [[nodiscard]] bool is() const { return std::holds_alternative<T>(node); }
    template <typename T>
    [[nodiscard]] const T& as() const { return std::get<T>(node); }
    template <typename T>
    T& as() { return std::get<T>(node); }
    template <typename T>
    [[nodiscard]] const T* get_if() const { return std::get_if<T>(&node); }
    template <typename T>
    T* get_if() { return std::get_if<T>(&node); }

    bool operator==(const Stmt&) const = default;
};

inline bool operator==(const Block& a, const Block& b) { return a.stmts == b.stmts; }

struct FieldDecl {
    Type type;
    std::string name;
    SourceLoc loc;
    bool operator==(const FieldDecl&) const = default;
};

struct RecordDef {
    std::string name;
    std::vector<FieldDecl> fields;
    SourceLoc loc;

    [[nodiscard]] const FieldDecl* find_field(std::string_view field) const;
    bool operator==(const RecordDef&) const = default;
};

struct Param {
    Type type;  // type.pointer is the array-base flag
    std::string name;
    SourceLoc loc;
    bool operator==(const Param&) const = default;
};

struct FunctionDef {
    Type return_type;
    std::string name;
    std::vector<Param> params;
    Block body;
    SourceLoc loc;
    bool operator==(const FunctionDef&) const = default;
};

struct SourceUnit {
    std::string file;  // diagnostics only; not compared
    std::vector<RecordDef> records;
    std::vector<VarDecl> globals;
    std::vector<FunctionDef> functions;

    [[nodiscard]] const RecordDef* find_record(std::string_view name) const;
    [[nodiscard]] const FunctionDef* find_function(std::string_view name) const;
    FunctionDef* find_function(std::string_view name);

    friend bool operator==(const SourceUnit& a, const SourceUnit& b) {
        return a.records == b.records && a.globals == b.globals && a.functions == b.functions;
    }
};

// Depth-first visitation of every statement / expression below a node.
// The callback receives nodes in pre-order.
template <typename F>
void for_each_stmt(const Stmt& stmt, F&& f);
template <typename F>
void for_each_stmt(const Block& block, F&& f) {
    for (const auto& s : block.stmts) for_each_stmt(s, f);
}
template <typename F>
void for_each_stmt(const Stmt& stmt, F&& f) {
    f(stmt);
    if (const auto* b = stmt.get_if<Block>()) {
        for_each_stmt(*b, f);
    } else if (const auto* loop = stmt.get_if<For>()) {
        if (loop->init) for_each_stmt(**loop->init, f);
        if (loop->step) for_each_stmt(**loop->step, f);
        for_each_stmt(*loop->body, f);
    } else if (const auto* branch = stmt.get_if<If>()) {
        for_each_stmt(*branch->then_branch, f);
        if (branch->else_branch) for_each_stmt(**branch->else_branch, f);
    }
}

template <typename F>
void for_each_expr(const Expr& expr, F&& f) {
    f(expr);
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Index>) {
                for_each_expr(*n.base, f);
                for_each_expr(*n.index, f);
            } else if constexpr (std::is_same_v<N, FieldAccess>) {
                for_each_expr(*n.base, f);
            } else if constexpr (std::is_same_v<N, Unary>) {
                for_each_expr(*n.operand, f);
            } else if constexpr (std::is_same_v<N, Binary>) {
                for_each_expr(*n.lhs, f);
                for_each_expr(*n.rhs, f);
            } else if constexpr (std::is_same_v<N, Call>) {
                for (const auto& a : n.args) for_each_expr(a, f);
            } else if constexpr (std::is_same_v<N, NewArray>) {
                for_each_expr(*n.length, f);
            }
        },
        expr.node);
}

// Expressions owned directly by one statement (not by nested statements).
template <typename F>
void for_each_direct_expr(const Stmt& stmt, F&& f) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, VarDecl>) {
                if (n.init) f(*n.init);
            } else if constexpr (std::is_same_v<N, RefBinding>) {
                f(n.target);
            } else if constexpr (std::is_same_v<N, Assign> || std::is_same_v<N, CompoundAssign>) {
                f(n.target);
                f(n.value);
            } else if constexpr (std::is_same_v<N, For>) {
                if (n.cond) f(*n.cond);
                if (n.attrs.target_size) f(*n.attrs.target_size);
                if (n.attrs.start_idx) f(*n.attrs.start_idx);
            } else if constexpr (std::is_same_v<N, If>) {
                f(n.cond);
            } else if constexpr (std::is_same_v<N, ExprStmt>) {
                f(n.expr);
            } else if constexpr (std::is_same_v<N, Return>) {
                if (n.value) f(*n.value);
            }
        },
        stmt.node);
}

}  // namespace soalens
