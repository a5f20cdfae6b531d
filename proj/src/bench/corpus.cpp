#include <algorithm>

#include "soalens/bench.hpp"
#include "soalens/frontend.hpp"

namespace soalens {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& corpus_sources();
}

std::string_view to_string(BenchMode mode) {
    switch (mode) {
        case BenchMode::Aos: return "aos";
        case BenchMode::SoaFull: return "soa-full";
        case BenchMode::SoaViews: return "soa-views";
    }
    return "?";
}

std::optional<BenchMode> parse_mode(std::string_view text) {
    for (BenchMode m : kAllModes)
        if (to_string(m) == text) return m;
    return std::nullopt;
}

std::string corpus_source(const std::string& name) {
    for (const auto& [n, text] : detail::corpus_sources())
        if (n == name) return std::string(text);
    return {};
}

namespace {

// The single annotated loop of a corpus kernel.
For* annotated_loop(FunctionDef& fn) {
    For* found = nullptr;
    for (auto& s : fn.body.stmts)
        if (auto* f = s.get_if<For>(); f && f->attrs.has_conversion()) found = f;
    if (!found) throw InternalError("corpus kernel '" + fn.name + "' has no annotated loop");
    return found;
}

}  // namespace

std::vector<KernelCase> build_corpus() {
    static const std::pair<const char*, Complexity> order[] = {
        {"density", Complexity::Quadratic}, {"force", Complexity::Quadratic}, {"kick1", Complexity::Linear},
        {"kick2", Complexity::Linear},      {"drift", Complexity::Linear},
    };
    std::vector<KernelCase> out;
    for (const auto& [name, complexity] : order) {
        KernelCase k;
        k.name = name;
        k.path = "corpus/" + k.name + ".minic";
        k.complexity = complexity;
        k.unit = parse_source(corpus_source(k.name), k.path);
        FunctionDef* fn = nullptr;
        for (auto& f : k.unit.functions)
            if (f.name == k.name) fn = &f;
        if (!fn) throw InternalError("corpus file " + k.path + " lacks function '" + k.name + "'");
        const AttributeSet& a = annotated_loop(*fn)->attrs;
        k.inputs = a.inputs.value_or(std::vector<std::string>{});
        k.outputs = a.outputs.value_or(std::vector<std::string>{});
        out.push_back(std::move(k));
    }
    return out;
}

SourceUnit annotated_variant(const KernelCase& kernel, BenchMode mode) {
    if (mode == BenchMode::Aos) return strip(kernel.unit);
    SourceUnit u = kernel.unit;
    if (mode == BenchMode::SoaViews) return u;
    for (auto& fn : u.functions) {
        if (fn.name != kernel.name) continue;
        AttributeSet& a = annotated_loop(fn)->attrs;
        const Type* target = nullptr;
        for (const auto& p : fn.params)
            if (a.target && p.name == *a.target) target = &p.type;
        const RecordDef* record = target ? u.find_record(target->record) : nullptr;
        if (!record) throw InternalError("corpus kernel '" + kernel.name + "' has no record target");
        std::vector<std::string> all;
        for (const auto& f : record->fields) all.push_back(f.name);
        a.inputs = all;
        a.outputs = all;
    }
    return u;
}

SourceUnit lowered_variant(const KernelCase& kernel, BenchMode mode, const TransformOptions& options) {
    SourceUnit u = annotated_variant(kernel, mode);
    if (mode == BenchMode::Aos) return u;
    return transform(u, options).unit;
}

}  // namespace soalens
