#pragma once

#include <sstream>

#include "soalens/emit.hpp"

namespace soalens::detail {

// Shared statement/expression walker. Dialects override the spellings that
// differ between miniC and C.
class Printer {
public:
    explicit Printer(const EmitConfig& config) : config_(config) {}
    virtual ~Printer() = default;

    std::string expression(const Expr& e) {
        std::ostringstream saved;
        std::swap(saved, out_);
        expr(e, 0);
        std::string s = out_.str();
        std::swap(saved, out_);
        return s;
    }

protected:
    virtual std::string type_name(const Type& t) = 0;
    virtual void ident(const Ident& id) { out_ << id.name; }
    virtual void literal(const Literal& lit);
    virtual void call(const Call& c);
    virtual void new_array(const NewArray& n) = 0;
    virtual void var_decl(const VarDecl& d) = 0;  // without ';'
    virtual void ref_binding(const RefBinding& r) = 0;
    virtual void free_stmt(const Free& f) = 0;
    virtual void attributes(const AttributeSet& a) = 0;
    virtual void enter_scope() {}
    virtual void leave_scope() {}

    void line_start() { out_ << std::string(static_cast<std::size_t>(depth_ * config_.indent), ' '); }
    void comment_line(const std::string& text) {
        line_start();
        out_ << "// " << text << '\n';
    }
    std::string attribute_text(const AttributeSet& a);  // one `[[...]]` per line, newline separated

    void expr(const Expr& e, int min_prec);
    void postfix_base(const Expr& e);
    void simple(const Stmt& s);  // statement usable in a for header, no ';'
    void stmt(const Stmt& s);
    void body(const Stmt& s);    // block on the same line, otherwise indented
    void block(const Block& b);
    void provenance(const AttributeSet& a);

    const EmitConfig& config_;
    std::ostringstream out_;
    int depth_ = 0;
};

}  // namespace soalens::detail
