#include <algorithm>
#include <set>

#include "soalens/semantics.hpp"

namespace soalens {

namespace {

std::size_t align_up(std::size_t v, std::size_t a) { return a == 0 ? v : (v + a - 1) / a * a; }

struct Flattener {
    const SourceUnit& unit;
    std::vector<std::string> stack;  // records being expanded

    // Appends leaves of `record` at `base`, returns (size, alignment).
    std::pair<std::size_t, std::size_t> expand(const RecordDef& record, std::size_t base,
                                               const std::vector<PathStep>& prefix, std::vector<FieldLeaf>& out) {
        if (std::find(stack.begin(), stack.end(), record.name) != stack.end())
            throw RecursionError("record '" + record.name + "' contains itself");
        stack.push_back(record.name);
        std::size_t offset = 0;
        std::size_t align = 1;
        for (const auto& f : record.fields) {
            std::int64_t count = f.type.extent.value_or(1);
            for (std::int64_t i = 0; i < count; ++i) {
                std::vector<PathStep> path = prefix;
                path.push_back(PathStep{f.name, std::nullopt});
                if (f.type.extent) path.push_back(PathStep{"", i});
                if (f.type.kind == Type::Kind::Scalar) {
                    std::size_t sz = scalar_size(f.type.scalar);
                    offset = align_up(offset, sz);
                    out.push_back(FieldLeaf{std::move(path), f.type.scalar, base + offset, sz, {}});
                    offset += sz;
                    align = std::max(align, sz);
                } else {
                    const RecordDef* nested = unit.find_record(f.type.record);
                    if (!nested) throw Error("unknown record '" + f.type.record + "'");
                    // Measure first so the nested block is placed at its alignment.
                    std::vector<FieldLeaf> probe;
                    auto [nsize, nalign] = expand(*nested, 0, {}, probe);
                    offset = align_up(offset, nalign);
                    expand(*nested, base + offset, path, out);
                    offset += nsize;
                    align = std::max(align, nalign);
                }
            }
        }
        stack.pop_back();
        return {align_up(offset, align), align};
    }
};

std::string mangle_path(const std::vector<PathStep>& path) {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path[i].index) {
            s += std::to_string(*path[i].index);
        } else {
            if (i != 0) s += '_';
            s += path[i].field;
        }
    }
    return s;
}

}  // namespace

std::string FieldLeaf::display() const {
    std::string s;
    for (const auto& step : path) {
        if (!s.empty()) s += '.';
        s += step.index ? "[" + std::to_string(*step.index) + "]" : step.field;
    }
    return s;
}

std::string FieldLeaf::access_path() const {
    std::string s;
    for (const auto& step : path) s += step.index ? "[" + std::to_string(*step.index) + "]" : "." + step.field;
    return s;
}

std::vector<std::size_t> LayoutModel::leaves_of(std::string_view field) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < leaves.size(); ++i)
        if (leaves[i].top_field() == field) out.push_back(i);
    return out;
}

std::optional<std::size_t> LayoutModel::find_leaf(const std::vector<PathStep>& path) const {
    for (std::size_t i = 0; i < leaves.size(); ++i)
        if (leaves[i].path == path) return i;
    return std::nullopt;
}

std::size_t LayoutModel::leaf_bytes() const {
    std::size_t total = 0;
    for (const auto& l : leaves) total += l.byte_size;
    return total;
}

LayoutModel build_layout(const RecordDef& record, const SourceUnit& unit) {
    LayoutModel m;
    m.record = record.name;
    Flattener fl{unit, {}};
    auto [size, align] = fl.expand(record, 0, {}, m.leaves);
    m.record_size = size;
    m.alignment = align;

    std::set<std::string> used;
    for (auto& leaf : m.leaves) {
        std::string name = mangle_path(leaf.path);
        if (used.count(name) != 0) {
            int k = 2;
            while (used.count(name + "_" + std::to_string(k)) != 0) ++k;
            name += "_" + std::to_string(k);
        }
        used.insert(name);
        leaf.mangled_name = std::move(name);
    }
    return m;
}

std::size_t view_footprint(const ConversionSpec& spec, std::size_t n) {
    if (spec.direction == Direction::SoaToAos) return n * spec.layout.record_size;
    std::size_t per_element = 0;
    for (std::size_t leaf : spec.union_leaves) per_element += spec.layout.leaves[leaf].byte_size;
    return n * per_element;
}

}  // namespace soalens
