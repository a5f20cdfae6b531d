#include <algorithm>
#include <set>

#include "soalens/semantics.hpp"

namespace soalens {

namespace {

// An access chain rooted at the conversion target: target[e].f[k].g or
// alias.f[k].g, or the bare target array.
struct Chain {
    enum class Root : std::uint8_t { Element, Alias, Bare };
    Root root = Root::Element;
    const Expr* element_index = nullptr;  // e in target[e]
    std::string name;                     // alias name or flat-array name
    std::vector<const Expr*> steps;       // FieldAccess / Index nodes, innermost first
};

class ChainMatcher {
public:
    ChainMatcher(const ConversionSpec& spec, const AliasMap& aliases) : spec_(spec), aliases_(aliases) {
        if (spec.direction == Direction::SoaToAos)
            for (std::size_t leaf : spec.union_leaves) flat_.insert(spec.layout.leaves[leaf].mangled_name);
    }

    [[nodiscard]] bool is_root_name(const std::string& name) const {
        if (spec_.direction == Direction::SoaToAos) return flat_.count(name) != 0;
        return name == spec_.target;
    }

    std::optional<Chain> match(const Expr& e) const {
        std::vector<const Expr*> outer;
        const Expr* cur = &e;
        while (true) {
            if (const auto* idx = cur->get_if<Index>()) {
                if (const auto* id = idx->base->get_if<Ident>(); id && is_root_name(id->name)) {
                    Chain c{Chain::Root::Element, idx->index.get(), id->name, {}};
                    c.steps.assign(outer.rbegin(), outer.rend());
                    return c;
                }
                outer.push_back(cur);
                cur = idx->base.get();
            } else if (const auto* fa = cur->get_if<FieldAccess>()) {
                outer.push_back(cur);
                cur = fa->base.get();
            } else if (const auto* id = cur->get_if<Ident>()) {
                Chain c;
                c.name = id->name;
                if (spec_.direction == Direction::AosToSoa && aliases_.count(id->name) != 0) {
                    c.root = Chain::Root::Alias;
                } else if (is_root_name(id->name)) {
                    c.root = Chain::Root::Bare;
                } else {
                    return std::nullopt;
                }
                c.steps.assign(outer.rbegin(), outer.rend());
                return c;
            } else {
                return std::nullopt;
            }
        }
    }

    // Leaf reached by a chain with at least one step, if the path is constant.
    enum class LeafState : std::uint8_t { Leaf, Untouched, Dynamic, Partial };

    LeafState leaf_of(const Chain& c, std::size_t* leaf_out) const {
        const auto& first = c.steps.front()->as<FieldAccess>();
        bool converted = false;
        for (std::size_t leaf : spec_.union_leaves)
            if (spec_.layout.leaves[leaf].top_field() == first.field) converted = true;
        if (!converted) return LeafState::Untouched;
        std::vector<PathStep> path;
        for (const Expr* step : c.steps) {
            if (const auto* fa = step->get_if<FieldAccess>()) {
                path.push_back(PathStep{fa->field, std::nullopt});
            } else {
                const Expr& ix = *step->as<Index>().index;
                const auto* lit = ix.get_if<Literal>();
                if (!lit || !is_integral(lit->kind) || lit->kind == ScalarKind::Bool) return LeafState::Dynamic;
                path.push_back(PathStep{"", lit->int_value});
            }
        }
        auto leaf = spec_.layout.find_leaf(path);
        if (!leaf) return LeafState::Partial;
        if (leaf_out) *leaf_out = *leaf;
        return LeafState::Leaf;
    }

    [[nodiscard]] const ConversionSpec& spec() const { return spec_; }

private:
    const ConversionSpec& spec_;
    const AliasMap& aliases_;
    std::set<std::string> flat_;
};

// Walks every expression of a converted loop and reports accesses the
// rewrite cannot redirect.
class AccessScanner {
public:
    AccessScanner(const ConversionSpec& spec, const AliasMap& aliases) : m_(spec, aliases) {}

    std::vector<Diagnostic> scan_loop(const For& loop) {
        if (loop.init) stmt(**loop.init);
        if (loop.cond) expr(*loop.cond, false);
        if (loop.step) stmt(**loop.step);
        stmt(*loop.body);
        return std::move(diags_);
    }

private:
    void report(DiagKind k, SourceLoc loc, std::string msg) { diags_.push_back(Diagnostic{k, loc, std::move(msg)}); }

    std::string target_desc() const {
        return m_.spec().direction == Direction::AosToSoa ? "'" + m_.spec().target + "'"
                                                          : "flat arrays of '" + m_.spec().target + "'";
    }

    void chain_indices(const Chain& c) {
        if (c.element_index) expr(*c.element_index, false);
        for (const Expr* s : c.steps)
            if (const auto* ix = s->get_if<Index>()) expr(*ix->index, false);
    }

    void expr(const Expr& e, bool call_arg) {
        if (auto c = m_.match(e)) {
            classify(*c, e, call_arg);
            chain_indices(*c);
            return;
        }
        std::visit(
            [&](const auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, Index>) {
                    expr(*n.base, false);
                    expr(*n.index, false);
                } else if constexpr (std::is_same_v<N, FieldAccess>) {
                    expr(*n.base, false);
                } else if constexpr (std::is_same_v<N, Unary>) {
                    expr(*n.operand, false);
                } else if constexpr (std::is_same_v<N, Binary>) {
                    expr(*n.lhs, false);
                    expr(*n.rhs, false);
                } else if constexpr (std::is_same_v<N, Call>) {
                    for (const auto& a : n.args) expr(a, true);
                } else if constexpr (std::is_same_v<N, NewArray>) {
                    expr(*n.length, false);
                }
            },
            e.node);
    }

    void classify(const Chain& c, const Expr& e, bool call_arg) {
        const bool soa = m_.spec().direction == Direction::AosToSoa;
        if (c.root == Chain::Root::Bare) {
            if (call_arg)
                report(DiagKind::IllegalCall, e.loc,
                       "conversion target " + target_desc() + " passed to a function inside a converted loop");
            else
                report(DiagKind::WholeElement, e.loc, "conversion target '" + c.name + "' used as a whole array");
            return;
        }
        if (c.steps.empty()) {
            if (!soa) return;  // pos0[e] is a leaf access
            if (call_arg)
                report(DiagKind::IllegalCall, e.loc,
                       "whole element of " + target_desc() +
                           " passed to a function inside a converted loop; pass individual fields instead");
            else
                report(DiagKind::WholeElement, e.loc, "whole element of " + target_desc() + " accessed inside a converted loop");
            return;
        }
        switch (m_.leaf_of(c, nullptr)) {
            case ChainMatcher::LeafState::Leaf:
            case ChainMatcher::LeafState::Untouched: return;
            case ChainMatcher::LeafState::Dynamic:
                report(DiagKind::UnsupportedAccess, e.loc,
                       "converted field '" + c.steps.front()->as<FieldAccess>().field +
                           "' must be subscripted with integer constants");
                return;
            case ChainMatcher::LeafState::Partial:
                report(DiagKind::UnsupportedAccess, e.loc,
                       "access to converted field '" + c.steps.front()->as<FieldAccess>().field +
                           "' does not name a single scalar");
                return;
        }
    }

    void ref_binding(const RefBinding& r, SourceLoc loc) {
        auto c = m_.match(r.target);
        if (!c) {
            expr(r.target, false);
            return;
        }
        bool soa = m_.spec().direction == Direction::AosToSoa;
        if (soa && c->root == Chain::Root::Element && c->steps.empty()) {
            chain_indices(*c);  // alias definition; resolve_aliases owns the remaining checks
            return;
        }
        if (c->root != Chain::Root::Bare && !c->steps.empty() &&
            m_.leaf_of(*c, nullptr) == ChainMatcher::LeafState::Untouched) {
            chain_indices(*c);
            return;
        }
        report(DiagKind::Alias, loc,
               "reference '" + r.name + "' binds " + target_desc() + " through an unsupported expression");
        chain_indices(*c);
    }

    void stmt(const Stmt& s) {
        std::visit(
            [&](const auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, RefBinding>) {
                    ref_binding(n, s.loc);
                } else if constexpr (std::is_same_v<N, For>) {
                    if (n.init) stmt(**n.init);
                    if (n.cond) expr(*n.cond, false);
                    if (n.step) stmt(**n.step);
                    stmt(*n.body);
                } else if constexpr (std::is_same_v<N, If>) {
                    expr(n.cond, false);
                    stmt(*n.then_branch);
                    if (n.else_branch) stmt(**n.else_branch);
                } else if constexpr (std::is_same_v<N, Block>) {
                    for (const auto& x : n.stmts) stmt(x);
                } else if constexpr (std::is_same_v<N, Return>) {
                    report(DiagKind::ControlFlow, s.loc, "return inside a converted loop would skip the epilogue");
                    if (n.value) expr(*n.value, false);
                } else {
                    for_each_direct_expr(s, [&](const Expr& e) { expr(e, false); });
                }
            },
            s.node);
    }

    ChainMatcher m_;
    std::vector<Diagnostic> diags_;
};

void collect_idents(const Expr& e, std::set<std::string>& out) {
    for_each_expr(e, [&](const Expr& sub) {
        if (const auto* id = sub.get_if<Ident>()) out.insert(id->name);
    });
}

const std::string* assigned_name(const Stmt& s) {
    const Expr* target = nullptr;
    if (const auto* a = s.get_if<Assign>()) target = &a->target;
    if (const auto* a = s.get_if<CompoundAssign>()) target = &a->target;
    if (!target) return nullptr;
    if (const auto* id = target->get_if<Ident>()) return &id->name;
    return nullptr;
}

class AliasCollector {
public:
    AliasCollector(const ConversionSpec& spec) : spec_(spec) {}

    AliasResolution run(const For& loop) {
        if (spec_.direction == Direction::AosToSoa) {
            visit(*loop.body);
            check_rebinding(*loop.body);
        }
        return std::move(out_);
    }

private:
    std::optional<const Expr*> element_binding(const RefBinding& r) const {
        const auto* idx = r.target.get_if<Index>();
        if (!idx) return std::nullopt;
        const auto* id = idx->base->get_if<Ident>();
        if (!id || id->name != spec_.target) return std::nullopt;
        return idx->index.get();
    }

    void visit(const Stmt& s) {
        if (const auto* b = s.get_if<Block>()) {
            for (std::size_t k = 0; k < b->stmts.size(); ++k) {
                const Stmt& cur = b->stmts[k];
                if (const auto* r = cur.get_if<RefBinding>()) {
                    bind(*r, cur.loc, b->stmts, k + 1);
                } else {
                    visit(cur);
                }
            }
        } else if (const auto* loop = s.get_if<For>()) {
            visit(*loop->body);
        } else if (const auto* br = s.get_if<If>()) {
            visit(*br->then_branch);
            if (br->else_branch) visit(**br->else_branch);
        } else if (const auto* r = s.get_if<RefBinding>()) {
            bind(*r, s.loc, {}, 0);
        }
    }

    void bind(const RefBinding& r, SourceLoc loc, const std::vector<Stmt>& siblings, std::size_t rest) {
        if (const auto* id = r.target.get_if<Ident>(); id && out_.aliases.count(id->name) != 0) {
            report(loc, "reference '" + r.name + "' rebinds alias '" + id->name + "' of the conversion target");
            return;
        }
        auto index = element_binding(r);
        if (!index) return;
        if (out_.aliases.count(r.name) != 0) {
            report(loc, "alias '" + r.name + "' of the conversion target is bound more than once");
            return;
        }
        out_.aliases.emplace(r.name, **index);
        // The rewrite substitutes the index expression at every use, so its
        // variables must stay fixed while the alias is live.
        std::set<std::string> vars;
        collect_idents(**index, vars);
        for (std::size_t k = rest; k < siblings.size(); ++k) {
            for_each_stmt(siblings[k], [&](const Stmt& s) {
                const std::string* name = assigned_name(s);
                if (name && vars.count(*name) != 0)
                    report(s.loc, "'" + *name + "' is modified while alias '" + r.name + "' of the conversion target is live");
            });
        }
    }

    void check_rebinding(const Stmt& body) {
        for_each_stmt(body, [&](const Stmt& s) {
            const std::string* name = assigned_name(s);
            if (name && out_.aliases.count(*name) != 0)
                report(s.loc, "alias '" + *name + "' of the conversion target is reassigned inside the loop");
        });
    }

    void report(SourceLoc loc, std::string msg) {
        out_.diagnostics.push_back(Diagnostic{DiagKind::Alias, loc, std::move(msg)});
    }

    const ConversionSpec& spec_;
    AliasResolution out_;
};

class Analyzer {
public:
    Analyzer(const SourceUnit& unit, Analysis& out) : unit_(unit), out_(out), scope_(unit) {}

    void function(const FunctionDef& fn) {
        fn_ = &fn;
        ordinal_ = 0;
        outer_refs_.clear();
        scope_.push();
        for (const auto& p : fn.params) scope_.declare(p.name, p.type);
        block(fn.body, 0);
        scope_.pop();
    }

private:
    void block(const Block& b, int depth) {
        scope_.push();
        for (const auto& s : b.stmts) stmt(s, depth);
        scope_.pop();
    }

    void stmt(const Stmt& s, int depth) {
        if (const auto* d = s.get_if<VarDecl>()) {
            scope_.declare(d->name, d->type);
        } else if (const auto* r = s.get_if<RefBinding>()) {
            if (auto t = scope_.type_of(r->target)) scope_.declare(r->name, *t);
            const Expr* root = &r->target;
            while (true) {
                if (const auto* ix = root->get_if<Index>()) root = ix->base.get();
                else if (const auto* fa = root->get_if<FieldAccess>()) root = fa->base.get();
                else break;
            }
            if (const auto* id = root->get_if<Ident>()) outer_refs_.emplace_back(r->name, id->name);
        } else if (const auto* b = s.get_if<Block>()) {
            block(*b, depth);
        } else if (const auto* br = s.get_if<If>()) {
            scope_.push();
            stmt(*br->then_branch, depth);
            scope_.pop();
            if (br->else_branch) {
                scope_.push();
                stmt(**br->else_branch, depth);
                scope_.pop();
            }
        } else if (const auto* loop = s.get_if<For>()) {
            int inner = depth;
            if (loop->attrs.has_conversion()) {
                std::size_t ordinal = ordinal_++;
                if (depth > 0) {
                    out_.diagnostics.push_back(Diagnostic{DiagKind::NestedConversion, s.loc,
                                                          "annotated loop nested inside another annotated loop"});
                } else {
                    scope_.push();
                    if (loop->init) declare_init(**loop->init);
                    conversion(*loop, s.loc, ordinal);
                    scope_.pop();
                }
                inner = depth + 1;
            }
            scope_.push();
            if (loop->init) declare_init(**loop->init);
            stmt(*loop->body, inner);
            scope_.pop();
        }
    }

    void declare_init(const Stmt& init) {
        if (const auto* d = init.get_if<VarDecl>()) scope_.declare(d->name, d->type);
    }

    void diag(std::vector<Diagnostic>& v, DiagKind k, SourceLoc loc, std::string msg) {
        v.push_back(Diagnostic{k, loc, std::move(msg)});
    }

    std::vector<std::string> field_set(const std::vector<std::string>& names, const RecordDef& record,
                                       std::vector<Diagnostic>& diags, SourceLoc loc, const char* which) {
        std::set<std::string> wanted;
        for (const auto& n : names) {
            if (!record.find_field(n))
                diag(diags, DiagKind::UnknownField, loc,
                     std::string(which) + " names '" + n + "', which is not a field of '" + record.name + "'");
            wanted.insert(n);
        }
        std::vector<std::string> ordered;
        for (const auto& f : record.fields)
            if (wanted.count(f.name) != 0) ordered.push_back(f.name);
        return ordered;
    }

    void conversion(const For& loop, SourceLoc loc, std::size_t ordinal) {
        const AttributeSet& a = loop.attrs;
        std::vector<Diagnostic> diags;
        SourceLoc aloc = a.loc.line != 0 ? a.loc : loc;
        if (!a.target) {
            diag(diags, DiagKind::MissingTarget, aloc, "conversion attributes without soa_conversion_target");
            flush(diags);
            return;
        }
        if (!a.target_size)
            diag(diags, DiagKind::MissingSize, aloc,
                 "conversion of '" + *a.target + "' requires soa_conversion_target_size");

        ConversionSpec spec;
        spec.direction = a.direction;
        spec.function = fn_->name;
        spec.loop_ordinal = ordinal;
        spec.loc = loc;
        spec.target = *a.target;
        spec.loop = &loop;
        if (a.target_size) spec.size_expr = *a.target_size;
        spec.start_idx = a.start_idx;

        const RecordDef* record = nullptr;
        if (a.direction == Direction::AosToSoa) {
            const Type* t = scope_.lookup(*a.target);
            if (!t || !t->pointer || t->kind != Type::Kind::Record) {
                diag(diags, DiagKind::UnknownTarget, aloc,
                     "conversion target '" + *a.target + "' is not an array base of record type in scope");
            } else {
                record = unit_.find_record(t->record);
            }
        } else {
            record = unit_.find_record(*a.target);
            if (!record)
                diag(diags, DiagKind::UnknownTarget, aloc,
                     "aos_conversion_target '" + *a.target + "' does not name a record type");
        }
        if (!record) {
            flush(diags);
            return;
        }
        spec.layout = build_layout(*record, unit_);

        if (a.inputs) {
            spec.inputs = field_set(*a.inputs, *record, diags, aloc, "soa_conversion_inputs");
        } else {
            for (const auto& f : record->fields) spec.inputs.push_back(f.name);
        }
        if (a.outputs) spec.outputs = field_set(*a.outputs, *record, diags, aloc, "conversion outputs");

        auto leaves_for = [&](const std::vector<std::string>& fields) {
            std::vector<std::size_t> out;
            for (std::size_t i = 0; i < spec.layout.leaves.size(); ++i)
                if (std::find(fields.begin(), fields.end(), spec.layout.leaves[i].top_field()) != fields.end())
                    out.push_back(i);
            return out;
        };
        spec.input_leaves = leaves_for(spec.inputs);
        spec.output_leaves = leaves_for(spec.outputs);
        std::set<std::size_t> uni(spec.input_leaves.begin(), spec.input_leaves.end());
        uni.insert(spec.output_leaves.begin(), spec.output_leaves.end());
        spec.union_leaves.assign(uni.begin(), uni.end());

        if (a.direction == Direction::SoaToAos) {
            for (std::size_t leaf : spec.union_leaves) {
                const FieldLeaf& l = spec.layout.leaves[leaf];
                const Type* t = scope_.lookup(l.mangled_name);
                if (!t || !t->pointer || t->kind != Type::Kind::Scalar || t->scalar != l.scalar)
                    diag(diags, DiagKind::UnknownTarget, aloc,
                         "no flat array '" + l.mangled_name + "' of type " + std::string(scalar_name(l.scalar)) +
                             " for leaf " + l.display());
            }
        }

        AliasResolution aliases = resolve_aliases(loop, spec);
        diags.insert(diags.end(), aliases.diagnostics.begin(), aliases.diagnostics.end());
        spec.aliases = aliases.aliases;
        AccessScanner scanner(spec, spec.aliases);
        auto access = scanner.scan_loop(loop);
        diags.insert(diags.end(), access.begin(), access.end());

        // References bound to the target before the loop would bypass redirection.
        std::set<std::string> used;
        for_each_stmt(*loop.body, [&](const Stmt& s) {
            for_each_direct_expr(s, [&](const Expr& e) { collect_idents(e, used); });
        });
        for (const auto& [ref, root] : outer_refs_) {
            if (used.count(ref) == 0 || spec.aliases.count(ref) != 0) continue;
            bool hits = spec.direction == Direction::AosToSoa && root == spec.target;
            if (spec.direction == Direction::SoaToAos)
                for (std::size_t leaf : spec.union_leaves)
                    if (spec.layout.leaves[leaf].mangled_name == root) hits = true;
            if (hits)
                diag(diags, DiagKind::Alias, loc,
                     "reference '" + ref + "' to the conversion target is bound outside the converted loop");
        }

        if (diags.empty()) out_.specs.push_back(std::move(spec));
        flush(diags);
    }

    void flush(std::vector<Diagnostic>& diags) {
        out_.diagnostics.insert(out_.diagnostics.end(), diags.begin(), diags.end());
    }

    const SourceUnit& unit_;
    Analysis& out_;
    TypeScope scope_;
    const FunctionDef* fn_ = nullptr;
    std::size_t ordinal_ = 0;
    std::vector<std::pair<std::string, std::string>> outer_refs_;  // ref name -> root identifier
};

}  // namespace

bool ConversionSpec::in_union(std::size_t leaf) const {
    return std::binary_search(union_leaves.begin(), union_leaves.end(), leaf);
}
bool ConversionSpec::in_inputs(std::size_t leaf) const {
    return std::binary_search(input_leaves.begin(), input_leaves.end(), leaf);
}
bool ConversionSpec::in_outputs(std::size_t leaf) const {
    return std::binary_search(output_leaves.begin(), output_leaves.end(), leaf);
}

bool operator==(const ConversionSpec& a, const ConversionSpec& b) {
    return a.direction == b.direction && a.function == b.function && a.loop_ordinal == b.loop_ordinal &&
           a.target == b.target && a.layout == b.layout && a.size_expr == b.size_expr && a.start_idx == b.start_idx &&
           a.inputs == b.inputs && a.outputs == b.outputs && a.input_leaves == b.input_leaves &&
           a.output_leaves == b.output_leaves && a.union_leaves == b.union_leaves && a.aliases == b.aliases;
}

AliasResolution resolve_aliases(const For& loop, const ConversionSpec& spec) { return AliasCollector(spec).run(loop); }

std::vector<Diagnostic> check_call_legality(const For& loop, const ConversionSpec& spec, const AliasMap& aliases) {
    auto all = AccessScanner(spec, aliases).scan_loop(loop);
    std::vector<Diagnostic> calls;
    for (auto& d : all)
        if (d.kind == DiagKind::IllegalCall) calls.push_back(std::move(d));
    return calls;
}

Analysis analyze(const SourceUnit& unit) {
    Analysis out;
    out.diagnostics = typecheck(unit);
    if (!out.diagnostics.empty()) return out;
    Analyzer a(unit, out);
    for (const auto& fn : unit.functions) a.function(fn);
    return out;
}

}  // namespace soalens
