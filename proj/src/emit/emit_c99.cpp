#include <map>
#include <set>

#include "printer.hpp"
#include "soalens/semantics.hpp"

namespace soalens::detail {

namespace {

std::string c_scalar(ScalarKind k) {
    switch (k) {
        case ScalarKind::Float64: return "double";
        case ScalarKind::Float32: return "float";
        case ScalarKind::Int32: return "int32_t";
        case ScalarKind::Int64: return "int64_t";
        case ScalarKind::Bool: return "bool";
    }
    return "?";
}

std::string helper_suffix(ScalarKind k) {
    switch (k) {
        case ScalarKind::Float64: return "f64";
        case ScalarKind::Float32: return "f32";
        case ScalarKind::Int64: return "i64";
        default: return "i32";
    }
}

class C99Printer : public Printer {
public:
    C99Printer(const EmitConfig& config, const SourceUnit& unit) : Printer(config), unit_(unit), scope_(unit) {}

    std::string unit() {
        std::ostringstream body;
        std::swap(out_, body);
        records();
        globals();
        prototypes();
        functions();
        std::swap(out_, body);

        if (config_.annotate) out_ << "/* generated by soalens (c99) */\n";
        out_ << "#include <math.h>\n#include <stdbool.h>\n#include <stdint.h>\n#include <stdlib.h>\n";
        for (const auto& [name, kind] : helpers_) {
            std::string t = c_scalar(kind);
            bool is_min = name.rfind("soalens_min", 0) == 0;
            out_ << "\nstatic inline " << t << ' ' << name << '(' << t << " a, " << t << " b) { return a "
                 << (is_min ? '<' : '>') << " b ? a : b; }";
        }
        if (!helpers_.empty()) out_ << '\n';
        out_ << body.str();
        return out_.str();
    }

protected:
    std::string type_name(const Type& t) override {
        switch (t.kind) {
            case Type::Kind::Void: return "void";
            case Type::Kind::Record: return t.record;
            case Type::Kind::Scalar: return c_scalar(t.scalar);
            case Type::Kind::Auto: return "void";
        }
        return "?";
    }

    std::string declarator(const Type& t, const std::string& name) {
        std::string s = type_name(t) + (t.pointer ? " *" : " ") + name;
        if (t.extent) s += "[" + std::to_string(*t.extent) + "]";
        return s;
    }

    void ident(const Ident& id) override {
        for (auto it = refs_.rbegin(); it != refs_.rend(); ++it) {
            auto hit = it->find(id.name);
            if (hit != it->end()) {
                if (hit->second)
                    out_ << "(*" << id.name << ')';
                else
                    out_ << id.name;
                return;
            }
        }
        out_ << id.name;
    }

    void literal(const Literal& lit) override {
        if (lit.kind == ScalarKind::Int64 && (lit.int_value > INT32_MAX || lit.int_value < INT32_MIN)) {
            out_ << lit.int_value << "LL";
            return;
        }
        Printer::literal(lit);
    }

    void call(const Call& c) override {
        if (!find_builtin(c.callee)) {
            Printer::call(c);
            return;
        }
        std::vector<ScalarKind> kinds;
        for (const auto& a : c.args) {
            auto t = scope_.type_of(a);
            kinds.push_back(t && t->is_scalar() ? promote(t->scalar) : ScalarKind::Float64);
        }
        std::string name = c.callee;
        if (c.callee == "abs") {
            name = kinds[0] == ScalarKind::Float64   ? "fabs"
                   : kinds[0] == ScalarKind::Float32 ? "fabsf"
                   : kinds[0] == ScalarKind::Int64   ? "llabs"
                                                     : "abs";
        } else if (c.callee == "min" || c.callee == "max") {
            ScalarKind k = common_type(kinds[0], kinds[1]);
            name = "soalens_" + c.callee + "_" + helper_suffix(k);
            helpers_.emplace(name, k);
        }
        out_ << name << '(';
        for (std::size_t i = 0; i < c.args.size(); ++i) {
            if (i) out_ << ", ";
            expr(c.args[i], 0);
        }
        out_ << ')';
    }

    void new_array(const NewArray& n) override {
        std::string t = type_name(n.element);
        out_ << '(' << t << " *)malloc(sizeof(" << t << ") * (size_t)(";
        expr(*n.length, 0);
        out_ << ") + 1)";
    }

    void var_decl(const VarDecl& d) override {
        out_ << declarator(d.type, d.name) << " = ";
        if (d.init)
            expr(*d.init, 0);
        else
            out_ << (d.type.is_scalar() || d.type.pointer ? "0" : "{0}");
        scope_.declare(d.name, d.type);
        declare(d.name, false);
    }

    void ref_binding(const RefBinding& r) override {
        Type t = r.type;
        if (t.kind == Type::Kind::Auto)
            if (auto inferred = scope_.type_of(r.target)) t = *inferred;
        out_ << type_name(t) << " *const " << r.name << " = &(";
        expr(r.target, 0);
        out_ << ')';
        scope_.declare(r.name, t);
        declare(r.name, true);
    }

    void free_stmt(const Free& f) override { out_ << "free(" << f.name << ')'; }

    void attributes(const AttributeSet& a) override {
        std::string text = attribute_text(a);
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t nl = text.find('\n', pos);
            comment_line(text.substr(pos, nl - pos));
            pos = nl + 1;
        }
    }

    void enter_scope() override {
        scope_.push();
        refs_.emplace_back();
    }
    void leave_scope() override {
        scope_.pop();
        refs_.pop_back();
    }

private:
    void declare(const std::string& name, bool is_ref) {
        if (refs_.empty()) refs_.emplace_back();
        refs_.back()[name] = is_ref;
    }

    void records() {
        for (const auto& r : unit_.records) {
            out_ << "\ntypedef struct " << r.name << " {\n";
            ++depth_;
            for (const auto& f : r.fields) {
                line_start();
                out_ << declarator(f.type, f.name) << ";\n";
            }
            --depth_;
            out_ << "} " << r.name << ";\n";
        }
    }

    void globals() {
        if (unit_.globals.empty()) return;
        out_ << '\n';
        enter_scope();  // global frame stays open for the rest of the unit
        for (const auto& g : unit_.globals) {
            var_decl(g);
            out_ << ";\n";
        }
    }

    std::string signature(const FunctionDef& fn) {
        std::string s = declarator(fn.return_type, fn.name) + "(";
        if (fn.params.empty()) s += "void";
        for (std::size_t i = 0; i < fn.params.size(); ++i) {
            if (i) s += ", ";
            s += declarator(fn.params[i].type, fn.params[i].name);
        }
        return s + ")";
    }

    void prototypes() {
        if (unit_.functions.empty()) return;
        out_ << '\n';
        for (const auto& fn : unit_.functions) out_ << signature(fn) << ";\n";
    }

    void functions() {
        for (const auto& fn : unit_.functions) {
            out_ << '\n' << signature(fn) << ' ';
            enter_scope();
            for (const auto& p : fn.params) {
                scope_.declare(p.name, p.type);
                declare(p.name, false);
            }
            block(fn.body);
            leave_scope();
            out_ << '\n';
        }
    }

    const SourceUnit& unit_;
    TypeScope scope_;
    std::vector<std::map<std::string, bool>> refs_;
    std::map<std::string, ScalarKind> helpers_;
};

}  // namespace

std::string c99_unit(const SourceUnit& unit, const EmitConfig& config) { return C99Printer(config, unit).unit(); }

}  // namespace soalens::detail
