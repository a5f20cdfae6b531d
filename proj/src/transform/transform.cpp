#include "soalens/transform.hpp"

#include <algorithm>
#include <sstream>

namespace soalens {

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diags, const std::string& file) {
    std::string out;
    for (const auto& d : diags) {
        if (!out.empty()) out += '\n';
        out += d.format(file);
    }
    return out;
}

Type pointer_to(Type element) {
    element.pointer = true;
    return element;
}

// base.path for one leaf: particles[i] -> particles[i].pos[0]
Expr leaf_expr(Expr base, const FieldLeaf& leaf) {
    for (const auto& step : leaf.path) {
        if (step.index)
            base = make_index(std::move(base), make_int(*step.index));
        else
            base = make_field(std::move(base), step.field);
    }
    return base;
}

Expr shifted(Expr index, const std::optional<Expr>& start) {
    if (!start) return index;
    return make_binary(BinaryOp::Sub, std::move(index), *start);
}

Expr offset(Expr counter, const std::optional<Expr>& start) {
    if (!start) return counter;
    return make_binary(BinaryOp::Add, *start, std::move(counter));
}

Stmt assign(Expr lhs, Expr rhs) { return Stmt{Assign{std::move(lhs), std::move(rhs)}, {}}; }

// for (long i = 0; i < size; i++) { body }
Stmt copy_loop(const std::string& var, const Expr& size, std::vector<Stmt> body, LoopRole role) {
    For f;
    f.init = Stmt{VarDecl{Type::scalar_type(ScalarKind::Int64), var, make_int(0), {}}, {}};
    f.cond = make_binary(BinaryOp::Lt, make_ident(var), size);
    f.step = Stmt{CompoundAssign{BinaryOp::Add, make_ident(var), make_int(1), true}, {}};
    f.body = Stmt{Block{std::move(body)}, {}};
    f.attrs.role = role;
    return Stmt{std::move(f), {}};
}

void collect_stmt_names(const Stmt& root, std::set<std::string>& out) {
    for_each_stmt(root, [&](const Stmt& s) {
        if (const auto* d = s.get_if<VarDecl>()) out.insert(d->name);
        if (const auto* r = s.get_if<RefBinding>()) out.insert(r->name);
        if (const auto* f = s.get_if<Free>()) out.insert(f->name);
        for_each_direct_expr(s, [&](const Expr& e) {
            for_each_expr(e, [&](const Expr& sub) {
                if (const auto* id = sub.get_if<Ident>()) out.insert(id->name);
                if (const auto* c = sub.get_if<Call>()) out.insert(c->callee);
            });
        });
    });
}

// Result of matching an expression against a converted leaf access.
struct LeafHit {
    const Expr* index = nullptr;  // element index expression (before shifting)
    std::size_t leaf = 0;
};

class Redirector {
public:
    Redirector(const RewritePlan& plan) : plan_(plan), spec_(plan.spec) {
        if (spec_.direction == Direction::SoaToAos)
            for (std::size_t leaf : spec_.union_leaves) flat_.emplace(spec_.layout.leaves[leaf].mangled_name, leaf);
    }

    void loop(For& f) {
        if (f.init) stmt(**f.init);
        if (f.cond) *f.cond = expr(*f.cond);
        if (f.step) stmt(**f.step);
        stmt(*f.body);
        drop_dead_aliases(*f.body);
    }

    [[nodiscard]] std::size_t redirected() const { return count_; }

private:
    std::optional<LeafHit> match(const Expr& e) const {
        if (spec_.direction == Direction::SoaToAos) {
            const auto* idx = e.get_if<Index>();
            if (!idx) return std::nullopt;
            const auto* id = idx->base->get_if<Ident>();
            if (!id) return std::nullopt;
            auto it = flat_.find(id->name);
            if (it == flat_.end()) return std::nullopt;
            return LeafHit{idx->index.get(), it->second};
        }
        std::vector<PathStep> path;
        const Expr* cur = &e;
        while (true) {
            if (const auto* fa = cur->get_if<FieldAccess>()) {
                path.push_back(PathStep{fa->field, std::nullopt});
                cur = fa->base.get();
            } else if (const auto* ix = cur->get_if<Index>()) {
                if (const auto* id = ix->base->get_if<Ident>(); id && id->name == spec_.target) {
                    return finish(path, ix->index.get());
                }
                const auto* lit = ix->index->get_if<Literal>();
                if (!lit || lit->kind != ScalarKind::Int64) return std::nullopt;
                path.push_back(PathStep{"", lit->int_value});
                cur = ix->base.get();
            } else if (const auto* id = cur->get_if<Ident>()) {
                auto it = spec_.aliases.find(id->name);
                if (it == spec_.aliases.end()) return std::nullopt;
                return finish(path, &it->second);
            } else {
                return std::nullopt;
            }
        }
    }

    std::optional<LeafHit> finish(std::vector<PathStep>& path, const Expr* index) const {
        if (path.empty()) return std::nullopt;
        std::reverse(path.begin(), path.end());
        auto leaf = spec_.layout.find_leaf(path);
        if (!leaf || !spec_.in_union(*leaf)) return std::nullopt;
        return LeafHit{index, *leaf};
    }

    Expr expr(const Expr& e) {
        if (auto hit = match(e)) {
            ++count_;
            Expr index = shifted(expr(*hit->index), spec_.start_idx);
            const std::string& temp = plan_.redirect_map.at(hit->leaf);
            Expr out = make_index(make_ident(temp, e.loc), std::move(index));
            if (spec_.direction == Direction::SoaToAos) out = leaf_expr(std::move(out), spec_.layout.leaves[hit->leaf]);
            out.loc = e.loc;
            return out;
        }
        Expr out = e;
        std::visit(
            [&](auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, Index>) {
                    *n.base = expr(*n.base);
                    *n.index = expr(*n.index);
                } else if constexpr (std::is_same_v<N, FieldAccess>) {
                    *n.base = expr(*n.base);
                } else if constexpr (std::is_same_v<N, Unary>) {
                    *n.operand = expr(*n.operand);
                } else if constexpr (std::is_same_v<N, Binary>) {
                    *n.lhs = expr(*n.lhs);
                    *n.rhs = expr(*n.rhs);
                } else if constexpr (std::is_same_v<N, Call>) {
                    for (auto& a : n.args) a = expr(a);
                } else if constexpr (std::is_same_v<N, NewArray>) {
                    *n.length = expr(*n.length);
                }
            },
            out.node);
        return out;
    }

    void stmt(Stmt& s) {
        std::visit(
            [&](auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, VarDecl>) {
                    if (n.init) *n.init = expr(*n.init);
                } else if constexpr (std::is_same_v<N, RefBinding>) {
                    if (spec_.aliases.count(n.name) == 0) n.target = expr(n.target);
                } else if constexpr (std::is_same_v<N, Assign> || std::is_same_v<N, CompoundAssign>) {
                    n.target = expr(n.target);
                    n.value = expr(n.value);
                } else if constexpr (std::is_same_v<N, For>) {
                    if (n.init) stmt(**n.init);
                    if (n.cond) *n.cond = expr(*n.cond);
                    if (n.step) stmt(**n.step);
                    stmt(*n.body);
                } else if constexpr (std::is_same_v<N, If>) {
                    n.cond = expr(n.cond);
                    stmt(*n.then_branch);
                    if (n.else_branch) stmt(**n.else_branch);
                } else if constexpr (std::is_same_v<N, ExprStmt>) {
                    n.expr = expr(n.expr);
                } else if constexpr (std::is_same_v<N, Return>) {
                    if (n.value) *n.value = expr(*n.value);
                } else if constexpr (std::is_same_v<N, Block>) {
                    for (auto& x : n.stmts) stmt(x);
                }
            },
            s.node);
    }

    // Alias bindings whose every use was redirected are no longer needed.
    void drop_dead_aliases(Stmt& body) {
        if (spec_.aliases.empty()) return;
        std::set<std::string> used;
        for_each_stmt(body, [&](const Stmt& s) {
            for_each_direct_expr(s, [&](const Expr& e) {
                for_each_expr(e, [&](const Expr& sub) {
                    if (const auto* id = sub.get_if<Ident>()) used.insert(id->name);
                });
            });
        });
        remove_bindings(body, used);
    }

    void remove_bindings(Stmt& s, const std::set<std::string>& used) {
        auto dead = [&](const Stmt& x) {
            const auto* r = x.get_if<RefBinding>();
            return r && spec_.aliases.count(r->name) != 0 && used.count(r->name) == 0;
        };
        if (auto* b = s.get_if<Block>()) {
            std::erase_if(b->stmts, dead);
            for (auto& x : b->stmts) remove_bindings(x, used);
        } else if (auto* f = s.get_if<For>()) {
            remove_bindings(*f->body, used);
        } else if (auto* br = s.get_if<If>()) {
            remove_bindings(*br->then_branch, used);
            if (br->else_branch) remove_bindings(**br->else_branch, used);
        }
    }

    const RewritePlan& plan_;
    const ConversionSpec& spec_;
    std::map<std::string, std::size_t> flat_;
    std::size_t count_ = 0;
};

// Locates annotated loops by pre-order ordinal, the numbering analyze uses.
class LoopFinder {
public:
    explicit LoopFinder(std::size_t ordinal) : wanted_(ordinal) {}

    // Returns the owning statement slot of the wanted loop.
    Stmt* find(Block& b) {
        for (auto& s : b.stmts)
            if (Stmt* hit = find(s)) return hit;
        return nullptr;
    }

private:
    Stmt* find(Stmt& s) {
        if (auto* f = s.get_if<For>()) {
            if (f->attrs.has_conversion() && seen_++ == wanted_) return &s;
            return find(*f->body);
        }
        if (auto* b = s.get_if<Block>()) return find(*b);
        if (auto* br = s.get_if<If>()) {
            if (Stmt* hit = find(*br->then_branch)) return hit;
            if (br->else_branch) return find(**br->else_branch);
        }
        return nullptr;
    }

    std::size_t wanted_;
    std::size_t seen_ = 0;
};

void clear_conversion(AttributeSet& a) {
    a.target.reset();
    a.direction = Direction::AosToSoa;
    a.target_size.reset();
    a.inputs.reset();
    a.outputs.reset();
    a.start_idx.reset();
}

void strip_stmt(Stmt& s) {
    if (auto* f = s.get_if<For>()) {
        clear_conversion(f->attrs);
        if (f->init) strip_stmt(**f->init);
        if (f->step) strip_stmt(**f->step);
        strip_stmt(*f->body);
    } else if (auto* b = s.get_if<Block>()) {
        for (auto& x : b->stmts) strip_stmt(x);
    } else if (auto* br = s.get_if<If>()) {
        strip_stmt(*br->then_branch);
        if (br->else_branch) strip_stmt(**br->else_branch);
    }
}

void splice(Block& parent, const Stmt* slot, std::vector<Stmt> expansion) {
    auto it = std::find_if(parent.stmts.begin(), parent.stmts.end(), [&](const Stmt& s) { return &s == slot; });
    it = parent.stmts.erase(it);
    parent.stmts.insert(it, std::make_move_iterator(expansion.begin()), std::make_move_iterator(expansion.end()));
}

// Finds the block that directly contains `slot`, if any.
Block* parent_block(Block& b, const Stmt* slot) {
    for (auto& s : b.stmts) {
        if (&s == slot) return &b;
        Block* hit = nullptr;
        if (auto* inner = s.get_if<Block>()) {
            hit = parent_block(*inner, slot);
        } else if (auto* f = s.get_if<For>()) {
            if (auto* fb = f->body->get_if<Block>()) hit = parent_block(*fb, slot);
        } else if (auto* br = s.get_if<If>()) {
            if (auto* tb = br->then_branch->get_if<Block>()) hit = parent_block(*tb, slot);
            if (!hit && br->else_branch)
                if (auto* eb = (*br->else_branch)->get_if<Block>()) hit = parent_block(*eb, slot);
        }
        if (hit) return hit;
    }
    return nullptr;
}

}  // namespace

SemanticError::SemanticError(std::vector<Diagnostic> diags, const std::string& file)
    : Error(join_diagnostics(diags, file)), diags_(std::move(diags)) {}

std::string mangle(const std::string& base, std::size_t ordinal, const std::set<std::string>& taken,
                   const std::string& tag) {
    while (true) {
        std::string name = base + "_" + tag + std::to_string(ordinal) + "_t";
        if (taken.count(name) == 0) return name;
        ++ordinal;
    }
}

std::set<std::string> function_identifiers(const SourceUnit& unit, const FunctionDef& fn) {
    std::set<std::string> out;
    for (const auto& r : unit.records) out.insert(r.name);
    for (const auto& g : unit.globals) out.insert(g.name);
    for (const auto& f : unit.functions) out.insert(f.name);
    for (const auto& p : fn.params) out.insert(p.name);
    for (const auto& s : fn.body.stmts) collect_stmt_names(s, out);
    return out;
}

RewritePlan plan(const ConversionSpec& spec, std::set<std::string>& taken, const TransformOptions& options) {
    RewritePlan p;
    p.spec = spec;
    const bool soa = spec.direction == Direction::AosToSoa;

    // One ordinal for the whole loop: bump until every generated name is free.
    std::size_t ordinal = spec.loop_ordinal;
    auto names_free = [&](std::size_t k) {
        std::vector<std::string> names;
        if (soa) {
            for (std::size_t leaf : spec.union_leaves)
                names.push_back(spec.layout.leaves[leaf].mangled_name + "_soa" + std::to_string(k) + "_t");
        } else {
            std::string base = spec.layout.record;
            std::transform(base.begin(), base.end(), base.begin(), [](unsigned char c) { return std::tolower(c); });
            names.push_back(base + "_aos" + std::to_string(k) + "_t");
        }
        names.push_back((soa ? "soa" : "aos") + std::to_string(k) + "_i");
        return std::none_of(names.begin(), names.end(), [&](const std::string& n) { return taken.count(n) != 0; });
    };
    while (!names_free(ordinal)) ++ordinal;

    p.index_var = (soa ? "soa" : "aos") + std::to_string(ordinal) + "_i";
    taken.insert(p.index_var);
    if (soa) {
        for (std::size_t leaf : spec.union_leaves) {
            const FieldLeaf& l = spec.layout.leaves[leaf];
            std::string name = mangle(l.mangled_name, ordinal, taken);
            taken.insert(name);
            p.temps.push_back(TempArray{name, Type::scalar_type(l.scalar), leaf});
            p.redirect_map.emplace(leaf, name);
        }
    } else {
        std::string base = spec.layout.record;
        std::transform(base.begin(), base.end(), base.begin(), [](unsigned char c) { return std::tolower(c); });
        std::string name = mangle(base, ordinal, taken, "aos");
        taken.insert(name);
        p.temps.push_back(TempArray{name, Type::record_type(spec.layout.record), std::nullopt});
        for (std::size_t leaf : spec.union_leaves) p.redirect_map.emplace(leaf, name);
    }

    p.prologue_leaves = spec.input_leaves;
    if (options.safe_outputs) {
        std::set<std::size_t> all(spec.input_leaves.begin(), spec.input_leaves.end());
        all.insert(spec.output_leaves.begin(), spec.output_leaves.end());
        p.prologue_leaves.assign(all.begin(), all.end());
    }
    p.epilogue_leaves = spec.output_leaves;

    for (const auto& t : p.temps) {
        VarDecl d{pointer_to(t.element), t.name, Expr{NewArray{t.element, spec.size_expr}, {}}, {}};
        p.temp_decls.push_back(Stmt{std::move(d), {}});
        p.frees.push_back(Stmt{Free{t.name}, {}});
    }

    // temp side and original side of one leaf, for element counter i
    auto temp_side = [&](std::size_t leaf) {
        Expr e = make_index(make_ident(p.redirect_map.at(leaf)), make_ident(p.index_var));
        return soa ? e : leaf_expr(std::move(e), spec.layout.leaves[leaf]);
    };
    auto orig_side = [&](std::size_t leaf) {
        const FieldLeaf& l = spec.layout.leaves[leaf];
        Expr index = offset(make_ident(p.index_var), spec.start_idx);
        if (soa) return leaf_expr(make_index(make_ident(spec.target), std::move(index)), l);
        return make_index(make_ident(l.mangled_name), std::move(index));
    };

    if (!p.prologue_leaves.empty()) {
        std::vector<Stmt> body;
        for (std::size_t leaf : p.prologue_leaves) body.push_back(assign(temp_side(leaf), orig_side(leaf)));
        p.prologue = copy_loop(p.index_var, spec.size_expr, std::move(body), LoopRole::Prologue);
    }
    if (!p.epilogue_leaves.empty()) {
        std::vector<Stmt> body;
        for (std::size_t leaf : p.epilogue_leaves) body.push_back(assign(orig_side(leaf), temp_side(leaf)));
        p.epilogue = copy_loop(p.index_var, spec.size_expr, std::move(body), LoopRole::Epilogue);
    }
    return p;
}

std::vector<RewritePlan> plan_all(const SourceUnit& unit, const std::vector<ConversionSpec>& specs,
                                  const TransformOptions& options) {
    std::map<std::string, std::set<std::string>> pools;
    std::vector<RewritePlan> out;
    for (const auto& spec : specs) {
        auto it = pools.find(spec.function);
        if (it == pools.end()) {
            const FunctionDef* fn = unit.find_function(spec.function);
            if (!fn) throw InternalError("conversion spec names unknown function '" + spec.function + "'");
            it = pools.emplace(spec.function, function_identifiers(unit, *fn)).first;
        }
        out.push_back(plan(spec, it->second, options));
    }
    return out;
}

TransformResult apply(const SourceUnit& unit, const std::vector<RewritePlan>& plans) {
    TransformResult result;
    result.unit = unit;
    result.plans = plans;

    // Rewrite later loops first so earlier ordinals stay countable.
    std::vector<const RewritePlan*> order;
    for (const auto& p : plans) order.push_back(&p);
    std::stable_sort(order.begin(), order.end(), [](const RewritePlan* a, const RewritePlan* b) {
        if (a->spec.function != b->spec.function) return a->spec.function < b->spec.function;
        return a->spec.loop_ordinal > b->spec.loop_ordinal;
    });

    for (const RewritePlan* p : order) {
        FunctionDef* fn = result.unit.find_function(p->spec.function);
        if (!fn) throw InternalError("function '" + p->spec.function + "' not found while applying a rewrite plan");
        Stmt* slot = LoopFinder(p->spec.loop_ordinal).find(fn->body);
        if (!slot)
            throw InternalError("annotated loop " + std::to_string(p->spec.loop_ordinal) + " of '" + p->spec.function +
                                "' not found while applying a rewrite plan");

        Stmt loop = std::move(*slot);
        For& f = loop.as<For>();
        clear_conversion(f.attrs);
        Redirector(*p).loop(f);

        std::vector<Stmt> expansion = p->temp_decls;
        if (p->prologue) expansion.push_back(*p->prologue);
        expansion.push_back(std::move(loop));
        if (p->epilogue) expansion.push_back(*p->epilogue);
        expansion.insert(expansion.end(), p->frees.begin(), p->frees.end());

        if (Block* parent = parent_block(fn->body, slot)) {
            splice(*parent, slot, std::move(expansion));
        } else {
            SourceLoc loc = slot->loc;
            *slot = Stmt{Block{std::move(expansion)}, loc};
        }
    }

    for (const auto& p : plans) {
        LoopReport r;
        r.function = p.spec.function;
        r.loop_ordinal = p.spec.loop_ordinal;
        r.direction = p.spec.direction;
        r.target = p.spec.target;
        r.record = p.spec.layout.record;
        r.input_leaves = p.spec.input_leaves.size();
        r.output_leaves = p.spec.output_leaves.size();
        r.union_leaves = p.spec.union_leaves.size();
        r.record_size = p.spec.layout.record_size;
        r.bytes_per_element = view_footprint(p.spec, 1);
        for (const auto& t : p.temps) r.temps.push_back(t.name);
        result.report.push_back(std::move(r));
    }
    return result;
}

TransformResult transform(const SourceUnit& unit, const TransformOptions& options) {
    Analysis a = analyze(unit);
    if (!a.ok()) throw SemanticError(a.diagnostics, unit.file);
    return soalens::apply(unit, plan_all(unit, a.specs, options));
}

SourceUnit strip(const SourceUnit& unit) {
    SourceUnit out = unit;
    for (auto& fn : out.functions)
        for (auto& s : fn.body.stmts) strip_stmt(s);
    return out;
}

std::string format_report(const std::vector<LoopReport>& report) {
    std::ostringstream os;
    for (const auto& r : report) {
        os << r.function << " loop " << r.loop_ordinal << ": "
           << (r.direction == Direction::AosToSoa ? "aos_to_soa " : "soa_to_aos ") << r.target << " (" << r.record
           << ", " << r.record_size << " bytes)\n";
        os << "  leaves: " << r.input_leaves << " in, " << r.output_leaves << " out, " << r.union_leaves
           << " converted; " << r.bytes_per_element << " bytes per element\n";
        os << "  temps:";
        for (const auto& t : r.temps) os << ' ' << t;
        os << '\n';
    }
    return os.str();
}

}  // namespace soalens
