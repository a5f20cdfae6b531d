// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// SOALENS_TIMING_INFORMATIONAL=1 reports a timing failure without failing the run.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "fixtures.hpp"
#include "generator.hpp"
#include "soalens/bench.hpp"
#include "soalens/cli.hpp"
#include "soalens/emit.hpp"
#include "soalens/frontend.hpp"
#include "soalens/interp.hpp"
#include "soalens/transform.hpp"

using namespace soalens;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void fail(Outcome& o, const std::string& why) {
    if (o.pass) o.detail = why;
    o.pass = false;
}

std::string leaf_list(const RewritePlan& p, const std::vector<std::size_t>& leaves) {
    std::string s;
    for (auto l : leaves) s += (s.empty() ? "" : ",") + p.spec.layout.leaves[l].display();
    return s;
}

// Transformed drift: exact golden text and the statement skeleton
// allocate -> prologue over A -> body -> epilogue over Â -> free.
Outcome transform_fidelity() {
    Outcome o;
    SourceUnit u = parse_file(testing::source_path("corpus/drift.minic"));
    TransformResult r = transform(u);
    if (emit(r.unit) != testing::read_source("tests/golden/drift_transformed.minic")) fail(o, "golden snapshot differs");
    const RewritePlan& p = r.plans.at(0);
    const std::string a = "pos.[0],pos.[1],pos.[2],vel.[0],vel.[1],vel.[2],updated";
    const std::string ahat = "pos.[0],pos.[1],pos.[2],updated";
    if (leaf_list(p, p.prologue_leaves) != a) fail(o, "prologue leaves " + leaf_list(p, p.prologue_leaves));
    if (leaf_list(p, p.epilogue_leaves) != ahat) fail(o, "epilogue leaves " + leaf_list(p, p.epilogue_leaves));

    std::string shape;
    for (const auto& s : r.unit.find_function("drift")->body.stmts) {
        if (const auto* d = s.get_if<VarDecl>()) {
            shape += d->init && d->init->is<NewArray>() ? 'A' : '?';
        } else if (const auto* f = s.get_if<For>()) {
            const auto& body = f->body->as<Block>().stmts;
            if (f->attrs.role == LoopRole::Prologue)
                shape += "P" + std::to_string(body.size());
            else if (f->attrs.role == LoopRole::Epilogue)
                shape += "E" + std::to_string(body.size());
            else
                shape += 'B';
        } else if (s.is<Free>()) {
            shape += 'F';
        } else {
            shape += '?';
        }
    }
    if (shape != "AAAAAAAP7BE4FFFFFFF") fail(o, "skeleton " + shape);
    if (o.pass) o.detail = "skeleton " + shape + ", golden snapshot matches";
    return o;
}

Outcome differential_equivalence() {
    Outcome o;
    VerifyOptions v;
    v.seeds.clear();
    for (std::uint64_t s = 0; s < 16; ++s) v.seeds.push_back(s);
    v.sizes = {0, 1, 2, 64, 256};
    v.modes = {BenchMode::SoaFull, BenchMode::SoaViews};
    VerifyTable t = verify_all(build_corpus(), v);
    const std::size_t bad = t.failures();
    if (t.cells.size() != 5 * 16 * 2 * 5) fail(o, "grid has " + std::to_string(t.cells.size()) + " cells");
    for (const auto& c : t.cells)
        if (!c.pass) {
            fail(o, std::to_string(bad) + " failing cells, first: " + c.kernel + " n=" + std::to_string(c.n) + " " +
                        c.detail);
            break;
        }
    if (o.pass) o.detail = std::to_string(t.cells.size()) + " bit-exact checks";
    return o;
}

Outcome discard_semantics() {
    Outcome o;
    const std::uint64_t programs = 128;
    for (std::uint64_t seed = 0; seed < programs && o.pass; ++seed) {
        testing::GeneratedKernel g = testing::random_discard_kernel(seed);
        SourceUnit u = parse_source(g.source);
        SourceUnit t = transform(u).unit;
        const std::size_t total = 1 + seed % 11;
        const std::int64_t size = static_cast<std::int64_t>(seed % (total + 1));
        const std::int64_t start = static_cast<std::int64_t>((seed / 3) % (total - size + 1));
        RuntimeStore in = testing::kernel_store(u, g.record, total, size, start, seed);
        RunResult out = run(t, g.entry, in);
        if (!(*out.store.find("data") == *in.find("data"))) fail(o, "seed " + std::to_string(seed) + " changed the array");
        if (!differential_check(u, t, g.entry, in).pass) fail(o, "seed " + std::to_string(seed) + " oracle mismatch");
    }
    if (o.pass) o.detail = std::to_string(programs) + " generated kernels, arrays bit-identical";
    return o;
}

Outcome inverse_property() {
    Outcome o;
    const std::uint64_t programs = 128;
    for (std::uint64_t seed = 0; seed < programs && o.pass; ++seed) {
        testing::GeneratedKernel g = testing::random_inverse_kernel(seed);
        SourceUnit u = parse_source(g.source);
        SourceUnit t = transform(u).unit;
        const std::size_t total = seed % 17;
        RuntimeStore in = testing::kernel_store(u, g.record, total, static_cast<std::int64_t>(total), 0, seed * 31 + 7);
        if (!(run(t, g.entry, in).store == in)) fail(o, "seed " + std::to_string(seed) + " post-state differs");
    }
    if (o.pass) o.detail = std::to_string(programs) + " random records, post-state == pre-state";
    return o;
}

Outcome footprint() {
    Outcome o;
    auto corpus = build_corpus();
    std::size_t drift_views = 0, drift_full = 0;
    for (const auto& k : corpus) {
        Analysis full = analyze(annotated_variant(k, BenchMode::SoaFull));
        Analysis views = analyze(annotated_variant(k, BenchMode::SoaViews));
        if (full.specs.size() != 1 || views.specs.size() != 1) {
            fail(o, k.name + ": analysis failed");
            continue;
        }
        if (views.specs[0].layout.record_size != 256) fail(o, k.name + ": record_size " + std::to_string(views.specs[0].layout.record_size));
        for (std::size_t n : {0u, 1u, 2u, 64u, 256u, 4096u, 16384u}) {
            const std::size_t v = view_footprint(views.specs[0], n), f = view_footprint(full.specs[0], n);
            if (!(v <= f && f <= n * 256)) fail(o, k.name + " n=" + std::to_string(n) + ": ordering violated");
        }
        if (k.name == "drift") {
            drift_views = view_footprint(views.specs[0], 1);
            drift_full = view_footprint(full.specs[0], 1);
        }
    }
    if (!(drift_views < drift_full)) fail(o, "drift views footprint not below full");
    if (o.pass)
        o.detail = "record_size 256; drift " + std::to_string(drift_views) + " < " + std::to_string(drift_full) +
                   " bytes/element";
    return o;
}

Outcome copy_accounting() {
    Outcome o;
    std::size_t cells = 0;
    for (const auto& k : build_corpus()) {
        for (BenchMode mode : {BenchMode::SoaFull, BenchMode::SoaViews}) {
            Analysis a = analyze(annotated_variant(k, mode));
            const auto& s = a.specs.at(0);
            for (std::size_t n : {0u, 1u, 2u, 64u, 256u}) {
                RunStats st = time_once(k, mode, n, 3);
                ++cells;
                if (st.prologue_copies != n * s.input_leaves.size() || st.epilogue_copies != n * s.output_leaves.size())
                    fail(o, k.name + " " + std::string(to_string(mode)) + " n=" + std::to_string(n) + ": copies " +
                                std::to_string(st.prologue_copies) + "/" + std::to_string(st.epilogue_copies));
            }
        }
    }
    if (o.pass) o.detail = std::to_string(cells) + " runs, counts equal size*|leaves(A)| and size*|leaves(A^)|";
    return o;
}

Outcome legality() {
    Outcome o;
    const std::string head = R"(struct Particle {
    double pos[2];
    double vel[2];
    double mass;
};
double foo(Particle p) { return p.mass; }
double bar(double a, double b) { return a * b; }
void k(Particle *particles, int size) {
)";
    const std::string attrs = "    [[clang::soa_conversion_target(particles)]]\n"
                              "    [[clang::soa_conversion_target_size(size)]]\n";
    const std::string loop = "    for (int i = 0; i < size; i++) {\n";
    auto diag_kinds = [](const std::string& src) {
        std::vector<DiagKind> out;
        for (const auto& d : analyze(parse_source(src)).diagnostics) out.push_back(d.kind);
        return out;
    };
    auto has = [](const std::vector<DiagKind>& v, DiagKind k) { return std::find(v.begin(), v.end(), k) != v.end(); };
    auto whole = diag_kinds(head + attrs + loop + "        double m = foo(particles[i]);\n    }\n}\n");
    auto leaf = diag_kinds(head + attrs + loop + "        double m = bar(particles[i].pos[0], particles[i].mass);\n    }\n}\n");
    auto nosize = diag_kinds(head + "    [[clang::soa_conversion_target(particles)]]\n" + loop + "    }\n}\n");
    if (!has(whole, DiagKind::IllegalCall)) fail(o, "foo(particles[i]) accepted");
    if (!leaf.empty()) fail(o, "per-leaf call rejected");
    if (!has(nosize, DiagKind::MissingSize)) fail(o, "missing target_size accepted");
    if (o.pass) o.detail = "whole-element call and missing size rejected, per-leaf call accepted";
    return o;
}

Outcome non_invasiveness() {
    Outcome o;
    std::size_t runs = 0;
    for (const auto& k : build_corpus()) {
        // What `transform --no-conversion` writes, read back in.
        const std::string path = testing::source_path(k.path);
        const char* argv[] = {"soalens", "transform", "--no-conversion", path.c_str()};
        std::ostringstream out, err;
        if (run_cli(4, argv, out, err) != kExitOk) {
            fail(o, k.name + ": --no-conversion failed: " + err.str());
            continue;
        }
        SourceUnit no_conversion = parse_source(out.str());
        SourceUnit stripped = strip(k.unit);
        if (!(no_conversion == stripped)) fail(o, k.name + ": --no-conversion output differs from strip");
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            for (std::size_t n : {0u, 1u, 7u, 64u}) {
                RuntimeStore in = seed_entry_store(k.unit, k.name, n, seed);
                RunResult a = run(k.unit, k.name, in);  // annotations ignored
                RunResult b = run(stripped, k.name, in);
                RunResult c = run(no_conversion, k.name, in);
                ++runs;
                if (!(a.store == b.store && b.store == c.store)) fail(o, k.name + ": stores differ");
            }
        }
    }
    if (o.pass) o.detail = std::to_string(runs) + " bit-identical runs over the corpus";
    return o;
}

double min_prologue(const KernelCase& k, std::size_t n, int samples) {
    double best = 1e300;
    for (int s = 0; s < samples; ++s) best = std::min(best, time_once(k, BenchMode::SoaFull, n, 1).prologue_seconds);
    return best;
}

Outcome timing_sanity() {
    Outcome o;
    auto corpus = build_corpus();
    const KernelCase* drift = nullptr;
    const KernelCase* force = nullptr;
    for (const auto& k : corpus) {
        if (k.name == "drift") drift = &k;
        if (k.name == "force") force = &k;
    }
    const double small = min_prologue(*drift, 4096, 7);
    const double large = min_prologue(*drift, 16384, 7);
    const double ratio = large / small;
    if (!(ratio >= 2.5 && ratio <= 6.0)) fail(o, "prologue ratio " + std::to_string(ratio) + " outside [2.5, 6]");

    double worst = 1e300;
    for (std::size_t n : {512u, 1024u}) {
        RunStats st = time_once(*force, BenchMode::SoaViews, n, 2);
        const double conv = st.prologue_seconds + st.epilogue_seconds;
        const double dominance = st.body_seconds() / conv;
        worst = std::min(worst, dominance);
        if (!(dominance >= 5.0)) fail(o, "force n=" + std::to_string(n) + " body/conversion " + std::to_string(dominance));
    }
    std::ostringstream d;
    d << "prologue 16384/4096 = " << ratio << ", force body/conversion >= " << worst;
    if (o.pass) o.detail = d.str();
    else o.detail += "; " + d.str();
    return o;
}

Outcome round_trip() {
    Outcome o;
    std::size_t files = 0;
    for (const auto& k : build_corpus()) {
        SourceUnit u = parse_file(testing::source_path(k.path));
        std::string text = emit(u);
        SourceUnit again = parse_source(text);
        ++files;
        if (!(again == u) || emit(again) != text) fail(o, k.path + " is not a fixed point");
    }
    const std::uint64_t programs = 500;
    for (std::uint64_t seed = 0; seed < programs; ++seed) {
        SourceUnit u = parse_source(testing::random_program(seed));
        std::string text = emit(u);
        SourceUnit again = parse_source(text);
        if (!(again == u) || emit(again) != text) fail(o, "generated program " + std::to_string(seed) + " is not a fixed point");
    }
    if (o.pass) o.detail = std::to_string(files) + " corpus files and " + std::to_string(programs) + " generated programs";
    return o;
}

struct Criterion {
    int number;
    std::string name;
    std::function<Outcome()> check;
    double budget_seconds;  // 0: none
    bool timing = false;
};

}  // namespace

int main() {
    const char* flag = std::getenv("SOALENS_TIMING_INFORMATIONAL");
    const bool informational = flag && *flag && std::string(flag) != "0";

    const std::vector<Criterion> criteria{
        {1, "transform fidelity", transform_fidelity, 1.0},
        {2, "differential equivalence", differential_equivalence, 120.0},
        {3, "discard semantics", discard_semantics, 0},
        {4, "inverse property", inverse_property, 0},
        {5, "footprint", footprint, 0},
        {6, "copy accounting", copy_accounting, 0},
        {7, "legality diagnostics", legality, 0},
        {8, "non-invasiveness", non_invasiveness, 0},
        {9, "timing sanity", timing_sanity, 0, true},
        {10, "round-trip parsing", round_trip, 0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            fail(o, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_seconds > 0 && secs >= c.budget_seconds) {
            std::ostringstream why;
            why << "took " << secs << " s, budget " << c.budget_seconds << " s";
            fail(o, why.str());
        }
        std::ostringstream line;
        line << (o.pass ? "PASS" : "FAIL") << " criterion " << c.number << " (" << c.name << "): " << o.detail << " ["
             << secs << " s]";
        if (!o.pass && c.timing && informational) {
            line << " (informational)";
        } else if (!o.pass) {
            ++failures;
        }
        std::cout << line.str() << std::endl;
    }
    std::cout << (failures ? "FAILED: " + std::to_string(failures) + " criteria" : std::string("all criteria pass"))
              << std::endl;
    return failures ? 1 : 0;
}
