#include "printer.hpp"

namespace soalens {

namespace detail {

std::string c99_unit(const SourceUnit& unit, const EmitConfig& config);

namespace {

std::string declarator(const Type& t, const std::string& name) {
    std::string base = t.kind == Type::Kind::Record ? t.record
                       : t.kind == Type::Kind::Auto ? "auto"
                       : t.kind == Type::Kind::Void ? "void"
                                                    : std::string(scalar_name(t.scalar));
    std::string s = base + (t.pointer ? " *" : " ") + name;
    if (t.extent) s += "[" + std::to_string(*t.extent) + "]";
    return s;
}

class MiniCPrinter : public Printer {
public:
    using Printer::Printer;

    std::string unit(const SourceUnit& u) {
        if (config_.annotate) out_ << "// generated by soalens\n";
        bool first = !config_.annotate;
        auto separate = [&] {
            if (!first) out_ << '\n';
            first = false;
        };
        for (const auto& r : u.records) {
            separate();
            out_ << "struct " << r.name << " {\n";
            ++depth_;
            for (const auto& f : r.fields) {
                line_start();
                out_ << declarator(f.type, f.name) << ";\n";
            }
            --depth_;
            out_ << "};\n";
        }
        if (!u.globals.empty()) {
            separate();
            for (const auto& g : u.globals) {
                var_decl(g);
                out_ << ";\n";
            }
        }
        for (const auto& fn : u.functions) {
            separate();
            out_ << declarator(fn.return_type, fn.name) << '(';
            for (std::size_t i = 0; i < fn.params.size(); ++i) {
                if (i) out_ << ", ";
                out_ << declarator(fn.params[i].type, fn.params[i].name);
            }
            out_ << ") ";
            block(fn.body);
            out_ << '\n';
        }
        return out_.str();
    }

protected:
    std::string type_name(const Type& t) override { return to_string(t); }

    void new_array(const NewArray& n) override {
        out_ << "new " << to_string(n.element) << '[';
        expr(*n.length, 0);
        out_ << ']';
    }

    void var_decl(const VarDecl& d) override {
        out_ << declarator(d.type, d.name);
        if (d.init) {
            out_ << " = ";
            expr(*d.init, 0);
        }
    }

    void ref_binding(const RefBinding& r) override {
        out_ << (r.type.kind == Type::Kind::Auto ? std::string("auto") : to_string(r.type)) << " &" << r.name << " = ";
        expr(r.target, 0);
    }

    void free_stmt(const Free& f) override { out_ << "delete[] " << f.name; }

    void attributes(const AttributeSet& a) override {
        std::string text = attribute_text(a);
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t nl = text.find('\n', pos);
            line_start();
            out_ << text.substr(pos, nl - pos) << '\n';
            pos = nl + 1;
        }
    }
};

}  // namespace
}  // namespace detail

std::string emit(const SourceUnit& unit, const EmitConfig& config) {
    if (config.indent < 0) throw Error("indent must be non-negative");
    if (config.dialect == Dialect::C99) return detail::c99_unit(unit, config);
    return detail::MiniCPrinter(config).unit(unit);
}

std::string emit_expr(const Expr& expr) {
    EmitConfig config;
    return detail::MiniCPrinter(config).expression(expr);
}

}  // namespace soalens
