#include "soalens/ast.hpp"

#include <bit>
#include <sstream>

namespace soalens {

std::string format_location(const std::string& file, const SourceLoc& loc) {
    std::ostringstream os;
    os << (file.empty() ? "<input>" : file) << ':' << loc.line << ':' << loc.column;
    return os.str();
}

LocatedError::LocatedError(const std::string& kind, SourceLoc loc, std::string message, std::string file)
    : Error(format_location(file, loc) + ": error: " + message + " [" + kind + "]"),
      loc_(loc),
      message_(std::move(message)),
      file_(std::move(file)) {}

ParseError ParseError::expected(SourceLoc loc, const std::string& what, const std::string& found, std::string file) {
    return ParseError(loc, "expected " + what + ", found " + found, std::move(file));
}

std::string_view scalar_name(ScalarKind kind) {
    switch (kind) {
        case ScalarKind::Float64: return "double";
        case ScalarKind::Float32: return "float";
        case ScalarKind::Int32: return "int";
        case ScalarKind::Int64: return "long";
        case ScalarKind::Bool: return "bool";
    }
    return "?";
}

std::size_t scalar_size(ScalarKind kind) {
    switch (kind) {
        case ScalarKind::Float64:
        case ScalarKind::Int64: return 8;
        case ScalarKind::Float32:
        case ScalarKind::Int32: return 4;
        case ScalarKind::Bool: return 1;
    }
    return 0;
}

bool is_floating(ScalarKind kind) { return kind == ScalarKind::Float64 || kind == ScalarKind::Float32; }
bool is_integral(ScalarKind kind) { return !is_floating(kind); }

std::string to_string(const Type& type) {
    std::string s;
    switch (type.kind) {
        case Type::Kind::Void: s = "void"; break;
        case Type::Kind::Auto: s = "auto"; break;
        case Type::Kind::Scalar: s = std::string(scalar_name(type.scalar)); break;
        case Type::Kind::Record: s = type.record; break;
    }
    if (type.pointer) s += " *";
    if (type.extent) s += "[" + std::to_string(*type.extent) + "]";
    return s;
}

std::string_view spelling(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
    }
    return "?";
}

std::string_view spelling(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

int precedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return 1;
        case BinaryOp::And: return 2;
        case BinaryOp::Eq:
        case BinaryOp::Ne: return 3;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 4;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 5;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 6;
    }
    return 0;
}

bool is_comparison(BinaryOp op) { return precedence(op) == 3 || precedence(op) == 4; }
bool is_logical(BinaryOp op) { return op == BinaryOp::And || op == BinaryOp::Or; }

bool operator==(const Literal& a, const Literal& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ScalarKind::Float64:
        case ScalarKind::Float32:
            return std::bit_cast<std::uint64_t>(a.float_value) == std::bit_cast<std::uint64_t>(b.float_value);
        case ScalarKind::Bool: return a.bool_value == b.bool_value;
        default: return a.int_value == b.int_value;
    }
}

Expr make_ident(std::string name, SourceLoc loc) { return Expr{Ident{std::move(name)}, loc}; }
Expr make_int(std::int64_t v, SourceLoc loc) { return Expr{Literal::integer(v), loc}; }
Expr make_index(Expr base, Expr index) {
    SourceLoc loc = base.loc;
    return Expr{Index{std::move(base), std::move(index)}, loc};
}
Expr make_field(Expr base, std::string field) {
    SourceLoc loc = base.loc;
    return Expr{FieldAccess{std::move(base), std::move(field)}, loc};
}
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs) {
    SourceLoc loc = lhs.loc;
    return Expr{Binary{op, std::move(lhs), std::move(rhs)}, loc};
}

const FieldDecl* RecordDef::find_field(std::string_view field) const {
    for (const auto& f : fields)
        if (f.name == field) return &f;
    return nullptr;
}

const RecordDef* SourceUnit::find_record(std::string_view name) const {
    for (const auto& r : records)
        if (r.name == name) return &r;
    return nullptr;
}

const FunctionDef* SourceUnit::find_function(std::string_view name) const {
    for (const auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

FunctionDef* SourceUnit::find_function(std::string_view name) {
    for (auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

}  // namespace soalens
