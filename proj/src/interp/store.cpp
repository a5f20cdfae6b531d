#include <bit>
#include <charconv>
#include <cstring>
#include <random>
#include <sstream>

#include "soalens/interp.hpp"

namespace soalens {

BoundsError::BoundsError(std::int64_t index, std::size_t length)
    : RuntimeError("index " + std::to_string(index) + " out of bounds for array of length " + std::to_string(length)),
      index(index),
      length(length) {}

Cell make_cell(ScalarKind kind, double v) {
    Cell c;
    switch (kind) {
        case ScalarKind::Float64: c.bits = std::bit_cast<std::uint64_t>(v); break;
        case ScalarKind::Float32: c.bits = std::bit_cast<std::uint32_t>(static_cast<float>(v)); break;
        case ScalarKind::Bool: c.bits = v != 0.0 ? 1 : 0; break;
        default: return make_cell_int(kind, static_cast<std::int64_t>(v));
    }
    return c;
}

Cell make_cell_int(ScalarKind kind, std::int64_t v) {
    Cell c;
    switch (kind) {
        case ScalarKind::Float64:
        case ScalarKind::Float32: return make_cell(kind, static_cast<double>(v));
        case ScalarKind::Int32: c.bits = static_cast<std::uint64_t>(static_cast<std::int64_t>(static_cast<std::int32_t>(v))); break;
        case ScalarKind::Int64: c.bits = static_cast<std::uint64_t>(v); break;
        case ScalarKind::Bool: c.bits = v != 0 ? 1 : 0; break;
    }
    return c;
}

double cell_as_double(ScalarKind kind, const Cell& c) {
    switch (kind) {
        case ScalarKind::Float64: return std::bit_cast<double>(c.bits);
        case ScalarKind::Float32: return std::bit_cast<float>(static_cast<std::uint32_t>(c.bits));
        case ScalarKind::Bool: return c.bits != 0 ? 1.0 : 0.0;
        default: return static_cast<double>(static_cast<std::int64_t>(c.bits));
    }
}

namespace {

const char* kind_tag(ScalarKind k) {
    switch (k) {
        case ScalarKind::Float64: return "f64";
        case ScalarKind::Float32: return "f32";
        case ScalarKind::Int32: return "i32";
        case ScalarKind::Int64: return "i64";
        case ScalarKind::Bool: return "bool";
    }
    return "?";
}

std::optional<ScalarKind> tag_kind(std::string_view t) {
    for (ScalarKind k : {ScalarKind::Float64, ScalarKind::Float32, ScalarKind::Int32, ScalarKind::Int64, ScalarKind::Bool})
        if (t == kind_tag(k)) return k;
    return std::nullopt;
}

std::string cell_text(ScalarKind k, const Cell& c) {
    std::string s = kind_tag(k);
    s += ':';
    if (c.poison) return s + "poison";
    char buf[17];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, c.bits, 16);
    std::string hex(buf, p);
    return s + std::string(16 - hex.size(), '0') + hex;
}

std::string cell_display(ScalarKind k, const Cell& c) {
    std::string s = cell_text(k, c);
    if (c.poison) return s;
    std::ostringstream os;
    os.precision(17);
    if (is_floating(k))
        os << cell_as_double(k, c);
    else
        os << static_cast<std::int64_t>(c.bits);
    return s + " (" + os.str() + ")";
}

std::size_t element_count(const Binding& b, std::size_t leaves) {
    if (!b.type.pointer) return 1;
    return leaves == 0 ? 0 : b.cells.size() / leaves;
}

// Key of cell `k` of a binding.
std::string cell_key(const std::string& name, const Binding& b, const std::vector<std::string>& suffixes, std::size_t k) {
    if (suffixes.empty()) return name;
    std::size_t per = suffixes.size();
    if (b.type.pointer) return name + "[" + std::to_string(k / per) + "]" + suffixes[k % per];
    return name + suffixes[k];
}

[[noreturn]] void bad_store(std::size_t line, const std::string& msg) {
    throw Error("store text line " + std::to_string(line) + ": " + msg);
}

Type parse_type_text(std::string_view s, const SourceUnit& unit, std::size_t line) {
    auto trim = [](std::string_view v) {
        while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
        while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
        return v;
    };
    s = trim(s);
    Type t;
    if (auto lb = s.find('['); lb != std::string_view::npos) {
        std::int64_t ext = 0;
        auto rb = s.find(']', lb);
        if (rb == std::string_view::npos) bad_store(line, "malformed extent");
        std::from_chars(s.data() + lb + 1, s.data() + rb, ext);
        t.extent = ext;
        s = trim(s.substr(0, lb));
    }
    if (!s.empty() && s.back() == '*') {
        t.pointer = true;
        s = trim(s.substr(0, s.size() - 1));
    }
    static const std::pair<const char*, ScalarKind> scalars[] = {{"double", ScalarKind::Float64},
                                                                 {"float", ScalarKind::Float32},
                                                                 {"int", ScalarKind::Int32},
                                                                 {"long", ScalarKind::Int64},
                                                                 {"bool", ScalarKind::Bool}};
    for (const auto& [n, k] : scalars) {
        if (s == n) {
            t.kind = Type::Kind::Scalar;
            t.scalar = k;
            return t;
        }
    }
    if (!unit.find_record(s)) bad_store(line, "unknown type '" + std::string(s) + "'");
    t.kind = Type::Kind::Record;
    t.record = std::string(s);
    return t;
}

}  // namespace

std::vector<ScalarKind> leaf_kinds(const Type& type, const SourceUnit& unit) {
    std::vector<ScalarKind> one;
    if (type.kind == Type::Kind::Scalar) {
        one.push_back(type.scalar);
    } else if (type.kind == Type::Kind::Record) {
        const RecordDef* r = unit.find_record(type.record);
        if (!r) throw Error("unknown record '" + type.record + "'");
        for (const auto& l : build_layout(*r, unit).leaves) one.push_back(l.scalar);
    }
    if (!type.extent || type.pointer) return one;
    std::vector<ScalarKind> out;
    for (std::int64_t i = 0; i < *type.extent; ++i) out.insert(out.end(), one.begin(), one.end());
    return out;
}

std::vector<std::string> leaf_suffixes(const Type& type, const SourceUnit& unit) {
    std::vector<std::string> one;
    if (type.kind == Type::Kind::Scalar) {
        one.emplace_back();
    } else if (type.kind == Type::Kind::Record) {
        const RecordDef* r = unit.find_record(type.record);
        if (!r) throw Error("unknown record '" + type.record + "'");
        for (const auto& l : build_layout(*r, unit).leaves) one.push_back(l.access_path());
    }
    if (!type.extent || type.pointer) return one;
    std::vector<std::string> out;
    for (std::int64_t i = 0; i < *type.extent; ++i)
        for (const auto& s : one) out.push_back("[" + std::to_string(i) + "]" + s);
    return out;
}

const Binding* RuntimeStore::find(const std::string& name) const {
    auto it = bindings.find(name);
    return it == bindings.end() ? nullptr : &it->second;
}

Binding* RuntimeStore::find(const std::string& name) {
    auto it = bindings.find(name);
    return it == bindings.end() ? nullptr : &it->second;
}

std::string store_to_text(const RuntimeStore& store, const SourceUnit& unit) {
    std::ostringstream os;
    for (const auto& [name, b] : store.bindings) {
        auto kinds = leaf_kinds(b.type, unit);
        auto suffixes = leaf_suffixes(b.type, unit);
        os << name << " : " << to_string(b.type);
        if (b.type.pointer) os << " x" << element_count(b, kinds.size());
        os << '\n';
        for (std::size_t k = 0; k < b.cells.size(); ++k)
            os << cell_key(name, b, suffixes, k) << " = " << cell_text(kinds[k % kinds.size()], b.cells[k]) << '\n';
    }
    return os.str();
}

RuntimeStore store_from_text(const std::string& text, const SourceUnit& unit) {
    RuntimeStore store;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    Binding* cur = nullptr;
    std::vector<ScalarKind> kinds;
    std::size_t expected = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (auto colon = line.find(" : "); colon != std::string::npos && line.find(" = ") == std::string::npos) {
            if (cur && cur->cells.size() != expected) bad_store(lineno, "previous binding is incomplete");
            std::string name = line.substr(0, colon);
            std::string rest = line.substr(colon + 3);
            std::size_t count = 1;
            if (auto x = rest.rfind(" x"); x != std::string::npos) {
                std::from_chars(rest.data() + x + 2, rest.data() + rest.size(), count);
                rest = rest.substr(0, x);
            }
            Binding b;
            b.type = parse_type_text(rest, unit, lineno);
            kinds = leaf_kinds(b.type, unit);
            expected = kinds.size() * (b.type.pointer ? count : 1);
            b.cells.reserve(expected);
            store.bindings[name] = std::move(b);
            cur = &store.bindings[name];
            continue;
        }
        auto eq = line.find(" = ");
        if (!cur || eq == std::string::npos) bad_store(lineno, "expected a declaration or a leaf value");
        if (cur->cells.size() >= expected) bad_store(lineno, "too many values");
        std::string value = line.substr(eq + 3);
        auto sep = value.find(':');
        auto kind = sep == std::string::npos ? std::nullopt : tag_kind(value.substr(0, sep));
        if (!kind || *kind != kinds[cur->cells.size() % kinds.size()]) bad_store(lineno, "value kind does not match type");
        Cell c;
        std::string payload = value.substr(sep + 1);
        if (payload == "poison") {
            c.poison = true;
        } else {
            auto [p, ec] = std::from_chars(payload.data(), payload.data() + payload.size(), c.bits, 16);
            if (ec != std::errc() || p != payload.data() + payload.size()) bad_store(lineno, "malformed bits");
        }
        cur->cells.push_back(c);
    }
    if (cur && cur->cells.size() != expected) bad_store(lineno, "last binding is incomplete");
    return store;
}

std::vector<StoreMismatch> compare_stores(const RuntimeStore& expected, const RuntimeStore& actual,
                                          const SourceUnit& unit, std::size_t limit) {
    std::vector<StoreMismatch> out;
    auto add = [&](StoreMismatch m) {
        if (out.size() < limit) out.push_back(std::move(m));
    };
    for (const auto& [name, e] : expected.bindings) {
        const Binding* a = actual.find(name);
        if (!a) {
            add({name, to_string(e.type), "<missing>"});
            continue;
        }
        if (!(a->type == e.type) || a->cells.size() != e.cells.size()) {
            add({name, to_string(e.type) + " with " + std::to_string(e.cells.size()) + " leaves",
                 to_string(a->type) + " with " + std::to_string(a->cells.size()) + " leaves"});
            continue;
        }
        auto kinds = leaf_kinds(e.type, unit);
        auto suffixes = leaf_suffixes(e.type, unit);
        for (std::size_t k = 0; k < e.cells.size(); ++k) {
            if (e.cells[k] == a->cells[k]) continue;
            ScalarKind kind = kinds[k % kinds.size()];
            add({cell_key(name, e, suffixes, k), cell_display(kind, e.cells[k]), cell_display(kind, a->cells[k])});
        }
    }
    for (const auto& [name, a] : actual.bindings)
        if (!expected.find(name)) add({name, "<missing>", to_string(a.type)});
    return out;
}

namespace {

Cell random_cell(ScalarKind k, std::mt19937_64& rng) {
    switch (k) {
        case ScalarKind::Float64:
        case ScalarKind::Float32: {
            double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            return make_cell(k, 2.0 * u - 1.0);
        }
        case ScalarKind::Bool: return make_cell_int(k, static_cast<std::int64_t>(rng() & 1));
        default: return make_cell_int(k, static_cast<std::int64_t>(rng() % 2001) - 1000);
    }
}

Binding random_binding(const Type& type, std::size_t n, std::mt19937_64& rng, const SourceUnit& unit) {
    Binding b;
    b.type = type;
    auto kinds = leaf_kinds(type, unit);
    std::size_t count = type.pointer ? n : 1;
    b.cells.reserve(count * kinds.size());
    for (std::size_t e = 0; e < count; ++e)
        for (ScalarKind k : kinds) b.cells.push_back(random_cell(k, rng));
    return b;
}

}  // namespace

RuntimeStore seed_store(const SourceUnit& unit, const std::string& record, std::size_t n, std::uint64_t seed,
                        const std::string& name) {
    if (!unit.find_record(record)) throw Error("unknown record '" + record + "'");
    std::mt19937_64 rng(seed);
    Type t = Type::record_type(record);
    t.pointer = true;
    RuntimeStore store;
    store.set(name, random_binding(t, n, rng, unit));
    return store;
}

RuntimeStore seed_entry_store(const SourceUnit& unit, const std::string& entry, std::size_t n, std::uint64_t seed) {
    const FunctionDef* fn = unit.find_function(entry);
    if (!fn) throw Error("no function named '" + entry + "'");
    RuntimeStore store;
    for (std::size_t k = 0; k < fn->params.size(); ++k) {
        const Param& p = fn->params[k];
        std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + k);
        if (p.type.pointer || !p.type.is_scalar()) {
            store.set(p.name, random_binding(p.type, n, rng, unit));
        } else if (is_floating(p.type.scalar)) {
            store.set(p.name, Binding{p.type, {random_cell(p.type.scalar, rng)}});
        } else if (p.type.scalar == ScalarKind::Bool) {
            store.set(p.name, Binding{p.type, {make_cell_int(ScalarKind::Bool, 1)}});
        } else {
            store.set(p.name, Binding{p.type, {make_cell_int(p.type.scalar, static_cast<std::int64_t>(n))}});
        }
    }
    return store;
}

}  // namespace soalens
