#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>

#include "soalens/interp.hpp"

namespace soalens {

double RunStats::body_seconds() const { return std::max(0.0, total_seconds - prologue_seconds - epilogue_seconds); }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Buffer {
    std::vector<Cell> cells;
    std::size_t length = 0;  // elements
    std::size_t stride = 1;  // leaves per element
    std::size_t bytes = 0;   // counted toward temp bytes while live
    bool freed = false;
};

struct Frame {
    std::vector<Cell> cells;
    std::vector<Buffer*> ptrs;
    std::vector<Cell*> refs;
};

struct Ctx {
    Frame* frame = nullptr;
    Frame* globals = nullptr;
    RunStats* stats = nullptr;
    std::vector<std::unique_ptr<Buffer>>* arena = nullptr;
    std::size_t live_temp_bytes = 0;
    PoisonMode mode = PoisonMode::Check;
    std::size_t depth = 0;
    std::size_t max_depth = 0;
    Cell ret;
};

[[noreturn]] void poison_error() { throw PoisonRead("arithmetic on an uninitialized temporary value"); }

// ---------------------------------------------------------------------------
// Scalar representation helpers
// ---------------------------------------------------------------------------

template <ScalarKind K>
struct Repr;
template <>
struct Repr<ScalarKind::Float64> {
    using T = double;
    static T get(std::uint64_t b) { return std::bit_cast<double>(b); }
    static std::uint64_t put(T v) { return std::bit_cast<std::uint64_t>(v); }
};
template <>
struct Repr<ScalarKind::Float32> {
    using T = float;
    static T get(std::uint64_t b) { return std::bit_cast<float>(static_cast<std::uint32_t>(b)); }
    static std::uint64_t put(T v) { return std::bit_cast<std::uint32_t>(v); }
};
template <>
struct Repr<ScalarKind::Int32> {
    using T = std::int32_t;
    static T get(std::uint64_t b) { return static_cast<T>(static_cast<std::int64_t>(b)); }
    static std::uint64_t put(T v) { return static_cast<std::uint64_t>(static_cast<std::int64_t>(v)); }
};
template <>
struct Repr<ScalarKind::Int64> {
    using T = std::int64_t;
    static T get(std::uint64_t b) { return static_cast<T>(b); }
    static std::uint64_t put(T v) { return static_cast<std::uint64_t>(v); }
};
template <>
struct Repr<ScalarKind::Bool> {
    using T = bool;
    static T get(std::uint64_t b) { return b != 0; }
    static std::uint64_t put(T v) { return v ? 1 : 0; }
};

template <typename I>
I saturate(double v) {
    if (std::isnan(v)) return 0;
    if (v <= static_cast<double>(std::numeric_limits<I>::min())) return std::numeric_limits<I>::min();
    if (v >= static_cast<double>(std::numeric_limits<I>::max())) return std::numeric_limits<I>::max();
    return static_cast<I>(v);
}

Cell convert(Cell c, ScalarKind from, ScalarKind to) {
    if (from == to) return c;
    if (c.poison) return Cell{0, true};
    Cell out;
    if (is_floating(from)) {
        double v = cell_as_double(from, c);
        switch (to) {
            case ScalarKind::Float64: out.bits = std::bit_cast<std::uint64_t>(v); break;
            case ScalarKind::Float32: out.bits = std::bit_cast<std::uint32_t>(static_cast<float>(v)); break;
            case ScalarKind::Bool: out.bits = v != 0.0 ? 1 : 0; break;
            case ScalarKind::Int32: out = make_cell_int(to, saturate<std::int32_t>(v)); break;
            case ScalarKind::Int64: out = make_cell_int(to, saturate<std::int64_t>(v)); break;
        }
        return out;
    }
    std::int64_t iv = static_cast<std::int64_t>(c.bits);
    switch (to) {
        case ScalarKind::Float64: out.bits = std::bit_cast<std::uint64_t>(static_cast<double>(iv)); break;
        case ScalarKind::Float32: out.bits = std::bit_cast<std::uint32_t>(static_cast<float>(iv)); break;
        default: out = make_cell_int(to, iv); break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Node interfaces
// ---------------------------------------------------------------------------

struct ValueNode {
    ScalarKind kind = ScalarKind::Int64;
    virtual ~ValueNode() = default;
    virtual Cell eval(Ctx& ctx) const = 0;
};
using ValuePtr = std::unique_ptr<ValueNode>;

// Address of the first leaf of an lvalue; `offset` is added last so
// constant field/index steps fold into the node.
struct PlaceNode {
    std::size_t offset = 0;
    virtual ~PlaceNode() = default;
    virtual Cell* place(Ctx& ctx) const = 0;
};
using PlacePtr = std::unique_ptr<PlaceNode>;

struct PtrNode {
    virtual ~PtrNode() = default;
    virtual Buffer* buffer(Ctx& ctx) const = 0;
};
using PtrPtr = std::unique_ptr<PtrNode>;

struct StmtNode {
    virtual ~StmtNode() = default;
    // true when a return statement executed
    virtual bool exec(Ctx& ctx) const = 0;
};
using StmtPtr = std::unique_ptr<StmtNode>;

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

struct ConstNode : ValueNode {
    Cell value;
    Cell eval(Ctx&) const override { return value; }
};

struct LoadNode : ValueNode {
    PlacePtr src;
    Cell eval(Ctx& ctx) const override {
        Cell c = *src->place(ctx);
        if (c.poison && ctx.mode == PoisonMode::Run) return Cell{};
        return c;
    }
};

struct ConvertNode : ValueNode {
    ValuePtr src;
    Cell eval(Ctx& ctx) const override { return convert(src->eval(ctx), src->kind, kind); }
};

template <ScalarKind K>
Cell arith(BinaryOp op, Cell a, Cell b) {
    using R = Repr<K>;
    using T = typename R::T;
    T x = R::get(a.bits), y = R::get(b.bits);
    if constexpr (std::is_integral_v<T>) {
        using U = std::make_unsigned_t<T>;
        switch (op) {
            case BinaryOp::Add: return Cell{R::put(static_cast<T>(static_cast<U>(x) + static_cast<U>(y))), false};
            case BinaryOp::Sub: return Cell{R::put(static_cast<T>(static_cast<U>(x) - static_cast<U>(y))), false};
            case BinaryOp::Mul: return Cell{R::put(static_cast<T>(static_cast<U>(x) * static_cast<U>(y))), false};
            default:
                if (y == 0) throw DivisionByZero("integer division by zero");
                if (x == std::numeric_limits<T>::min() && y == -1) return Cell{R::put(x), false};
                return Cell{R::put(static_cast<T>(x / y)), false};
        }
    } else {
        switch (op) {
            case BinaryOp::Add: return Cell{R::put(x + y), false};
            case BinaryOp::Sub: return Cell{R::put(x - y), false};
            case BinaryOp::Mul: return Cell{R::put(x * y), false};
            default: return Cell{R::put(x / y), false};
        }
    }
}

template <ScalarKind K>
struct ArithNode : ValueNode {
    BinaryOp op = BinaryOp::Add;
    ValuePtr lhs, rhs;
    Cell eval(Ctx& ctx) const override {
        Cell a = lhs->eval(ctx);
        Cell b = rhs->eval(ctx);
        if (a.poison || b.poison) poison_error();
        return arith<K>(op, a, b);
    }
};

template <ScalarKind K>
bool compare(BinaryOp op, Cell a, Cell b) {
    using R = Repr<K>;
    auto x = R::get(a.bits), y = R::get(b.bits);
    switch (op) {
        case BinaryOp::Lt: return x < y;
        case BinaryOp::Le: return x <= y;
        case BinaryOp::Gt: return x > y;
        case BinaryOp::Ge: return x >= y;
        case BinaryOp::Eq: return x == y;
        default: return x != y;
    }
}

template <ScalarKind K>
struct CompareNode : ValueNode {
    BinaryOp op = BinaryOp::Lt;
    ValuePtr lhs, rhs;
    Cell eval(Ctx& ctx) const override {
        Cell a = lhs->eval(ctx);
        Cell b = rhs->eval(ctx);
        if (a.poison || b.poison) poison_error();
        return Cell{compare<K>(op, a, b) ? 1u : 0u, false};
    }
};

struct LogicalNode : ValueNode {
    bool is_and = true;
    ValuePtr lhs, rhs;  // both bool
    Cell eval(Ctx& ctx) const override {
        Cell a = lhs->eval(ctx);
        if (a.poison) poison_error();
        if ((a.bits != 0) != is_and) return Cell{a.bits, false};
        Cell b = rhs->eval(ctx);
        if (b.poison) poison_error();
        return b;
    }
};

template <ScalarKind K>
struct NegNode : ValueNode {
    ValuePtr operand;
    Cell eval(Ctx& ctx) const override {
        Cell a = operand->eval(ctx);
        if (a.poison) poison_error();
        using R = Repr<K>;
        auto x = R::get(a.bits);
        if constexpr (std::is_integral_v<decltype(x)>) {
            using U = std::make_unsigned_t<decltype(x)>;
            return Cell{R::put(static_cast<decltype(x)>(U{0} - static_cast<U>(x))), false};
        } else {
            return Cell{R::put(-x), false};
        }
    }
};

struct NotNode : ValueNode {
    ValuePtr operand;  // bool
    Cell eval(Ctx& ctx) const override {
        Cell a = operand->eval(ctx);
        if (a.poison) poison_error();
        return Cell{a.bits ? 0u : 1u, false};
    }
};

struct SqrtNode : ValueNode {
    ValuePtr arg;
    Cell eval(Ctx& ctx) const override {
        Cell a = arg->eval(ctx);
        if (a.poison) poison_error();
        return Cell{std::bit_cast<std::uint64_t>(std::sqrt(std::bit_cast<double>(a.bits))), false};
    }
};

struct PowNode : ValueNode {
    ValuePtr base, exp;
    Cell eval(Ctx& ctx) const override {
        Cell a = base->eval(ctx);
        Cell b = exp->eval(ctx);
        if (a.poison || b.poison) poison_error();
        return Cell{std::bit_cast<std::uint64_t>(std::pow(std::bit_cast<double>(a.bits), std::bit_cast<double>(b.bits))),
                    false};
    }
};

template <ScalarKind K>
struct AbsNode : ValueNode {
    ValuePtr arg;
    Cell eval(Ctx& ctx) const override {
        Cell a = arg->eval(ctx);
        if (a.poison) poison_error();
        using R = Repr<K>;
        auto x = R::get(a.bits);
        if constexpr (std::is_integral_v<decltype(x)>) {
            using U = std::make_unsigned_t<decltype(x)>;
            if (x < 0) x = static_cast<decltype(x)>(U{0} - static_cast<U>(x));
            return Cell{R::put(x), false};
        } else {
            return Cell{R::put(std::fabs(x)), false};
        }
    }
};

template <ScalarKind K>
struct MinMaxNode : ValueNode {
    bool is_min = true;
    ValuePtr lhs, rhs;
    Cell eval(Ctx& ctx) const override {
        Cell a = lhs->eval(ctx);
        Cell b = rhs->eval(ctx);
        if (a.poison || b.poison) poison_error();
        using R = Repr<K>;
        auto x = R::get(a.bits), y = R::get(b.bits);
        bool take_a = is_min ? x < y : x > y;
        return take_a ? a : b;
    }
};

// ---------------------------------------------------------------------------
// Places and arrays
// ---------------------------------------------------------------------------

struct LocalPlace : PlaceNode {
    std::size_t slot = 0;
    Cell* place(Ctx& ctx) const override { return ctx.frame->cells.data() + slot + offset; }
};

struct GlobalPlace : PlaceNode {
    std::size_t slot = 0;
    Cell* place(Ctx& ctx) const override { return ctx.globals->cells.data() + slot + offset; }
};

struct RefPlace : PlaceNode {
    std::size_t slot = 0;
    Cell* place(Ctx& ctx) const override { return ctx.frame->refs[slot] + offset; }
};

std::int64_t index_value(const ValueNode& idx, Ctx& ctx) {
    Cell c = idx.eval(ctx);
    if (c.poison) poison_error();
    return static_cast<std::int64_t>(c.bits);
}

Buffer* live(Buffer* b) {
    if (!b) throw RuntimeError("array used before it was allocated");
    if (b->freed) throw UseAfterFree("array used after delete[]");
    return b;
}

struct PtrIndexPlace : PlaceNode {
    PtrPtr base;
    ValuePtr index;  // int64
    Cell* place(Ctx& ctx) const override {
        Buffer* b = live(base->buffer(ctx));
        std::int64_t k = index_value(*index, ctx);
        if (k < 0 || static_cast<std::uint64_t>(k) >= b->length) throw BoundsError(k, b->length);
        return b->cells.data() + static_cast<std::size_t>(k) * b->stride + offset;
    }
};

struct ArrayIndexPlace : PlaceNode {
    PlacePtr base;
    ValuePtr index;  // int64
    std::size_t extent = 0;
    std::size_t stride = 1;
    Cell* place(Ctx& ctx) const override {
        Cell* p = base->place(ctx);
        std::int64_t k = index_value(*index, ctx);
        if (k < 0 || static_cast<std::uint64_t>(k) >= extent) throw BoundsError(k, extent);
        return p + static_cast<std::size_t>(k) * stride + offset;
    }
};

// Constant subscript outside a fixed array: fails whenever evaluated.
struct BadPlace : PlaceNode {
    std::int64_t index = 0;
    std::size_t extent = 0;
    Cell* place(Ctx&) const override { throw BoundsError(index, extent); }
};

struct LocalPtr : PtrNode {
    std::size_t slot = 0;
    Buffer* buffer(Ctx& ctx) const override { return ctx.frame->ptrs[slot]; }
};

struct GlobalPtr : PtrNode {
    std::size_t slot = 0;
    Buffer* buffer(Ctx& ctx) const override { return ctx.globals->ptrs[slot]; }
};

struct NewArrayNode : PtrNode {
    ValuePtr length;  // int64
    std::size_t stride = 1;
    std::size_t element_bytes = 0;
    Buffer* buffer(Ctx& ctx) const override {
        std::int64_t n = index_value(*length, ctx);
        if (n < 0) throw NegativeSize("new[] with negative size " + std::to_string(n));
        auto b = std::make_unique<Buffer>();
        b->length = static_cast<std::size_t>(n);
        b->stride = stride;
        b->cells.assign(b->length * stride, Cell{0, true});
        b->bytes = b->length * element_bytes;
        ctx.live_temp_bytes += b->bytes;
        ctx.stats->peak_temp_bytes = std::max(ctx.stats->peak_temp_bytes, ctx.live_temp_bytes);
        ctx.arena->push_back(std::move(b));
        return ctx.arena->back().get();
    }
};

// ---------------------------------------------------------------------------
// Calls
// ---------------------------------------------------------------------------

struct FunctionCode;

struct ArgBinder {
    enum class Kind : std::uint8_t { Scalar, Pointer, Aggregate } kind = Kind::Scalar;
    std::size_t slot = 0;  // callee frame slot
    std::size_t count = 0;
    ValuePtr value;
    PtrPtr ptr;
    PlacePtr place;
};

struct FunctionCode {
    const FunctionDef* def = nullptr;
    std::size_t cells = 0, ptrs = 0, refs = 0;
    std::vector<std::size_t> param_slots;
    StmtPtr body;
    ScalarKind ret_kind = ScalarKind::Int64;
};

Cell invoke(const FunctionCode& fn, Ctx& ctx, Frame& frame) {
    if (ctx.depth >= ctx.max_depth) throw RuntimeError("call depth limit exceeded in '" + fn.def->name + "'");
    Frame* saved = ctx.frame;
    ctx.frame = &frame;
    ++ctx.depth;
    ctx.ret = Cell{};
    try {
        fn.body->exec(ctx);
    } catch (...) {
        --ctx.depth;
        ctx.frame = saved;
        throw;
    }
    --ctx.depth;
    ctx.frame = saved;
    return ctx.ret;
}

struct CallNode : ValueNode {
    const std::vector<FunctionCode>* functions = nullptr;
    std::size_t index = 0;
    std::vector<ArgBinder> args;
    Cell eval(Ctx& ctx) const override {
        const FunctionCode& fn = (*functions)[index];
        Frame frame;
        frame.cells.resize(fn.cells);
        frame.ptrs.resize(fn.ptrs, nullptr);
        frame.refs.resize(fn.refs, nullptr);
        for (const auto& a : args) {
            switch (a.kind) {
                case ArgBinder::Kind::Scalar: frame.cells[a.slot] = a.value->eval(ctx); break;
                case ArgBinder::Kind::Pointer: frame.ptrs[a.slot] = a.ptr->buffer(ctx); break;
                case ArgBinder::Kind::Aggregate: {
                    Cell* src = a.place->place(ctx);
                    std::copy(src, src + a.count, frame.cells.begin() + static_cast<std::ptrdiff_t>(a.slot));
                    break;
                }
            }
        }
        return invoke(fn, ctx, frame);
    }
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct BlockNode : StmtNode {
    std::vector<StmtPtr> stmts;
    bool exec(Ctx& ctx) const override {
        for (const auto& s : stmts)
            if (s->exec(ctx)) return true;
        return false;
    }
};

struct StoreNode : StmtNode {
    PlacePtr dst;
    ValuePtr value;
    std::uint64_t RunStats::*counter = nullptr;
    bool exec(Ctx& ctx) const override {
        ++ctx.stats->statements;
        Cell* p = dst->place(ctx);
        *p = value->eval(ctx);
        if (counter) ++(ctx.stats->*counter);
        return false;
    }
};

struct CopyNode : StmtNode {
    PlacePtr dst, src;
    std::size_t count = 0;
    bool exec(Ctx& ctx) const override {
        ++ctx.stats->statements;
        Cell* d = dst->place(ctx);
        Cell* s = src->place(ctx);
        std::memmove(d, s, count * sizeof(Cell));
        return false;
    }
};

struct FillNode : StmtNode {
    PlacePtr dst;
    std::size_t count = 0;
    bool exec(Ctx& ctx) const override {
        ++ctx.stats->statements;
        std::fill_n(dst->place(ctx), count, Cell{});
        return false;
    }
};

struct CompoundNode : StmtNode {
    PlacePtr dst;
    ScalarKind target = ScalarKind::Int64;
    ScalarKind compute = ScalarKind::Int64;
    ValuePtr value;  // already in `compute`
    BinaryOp op = BinaryOp::Add;
    bool exec(Ctx& ctx) const override {
        ++ctx.stats->statements;
        Cell* p = dst->place(ctx);
        Cell cur = *p;
        if (cur.poison && ctx.mode == PoisonMode::Run) cur = Cell{};
        Cell v = value->eval(ctx);
        if (cur.poison || v.poison) poison_error();
        Cell a = convert(cur, target, compute);
        Cell r;
        switch (compute) {
            case ScalarKind::Float64: r = arith<ScalarKind::Float64>(op, a, v); break;
            case ScalarKind::Float32: r = arith<ScalarKind::Float32>(op, a, v); break;
            case ScalarKind::Int64: r = arith<ScalarKind::Int64>(op, a, v); break;
            default: r = arith<ScalarKind::Int32>(op, a, v); break;
        }
        *p = convert(r, compute, target);
        return false;
    }
};

struct SetPtrNode : StmtNode {
    bool global = false;
    std::size_t slot = 0;
    PtrPtr src;  // null: unallocated
    bool exec(Ctx& ctx) const override {
        ++ctx.stats->statements;
        Buffer* b = src ? src->buffer(ctx) : nullptr;
        (global ? ctx.globals : ctx.frame)->ptrs[slot] = b;
        return false;
    }
};

struct BindRefNode : StmtNode {
    std::size_t slot = 0;
    PlacePtr target;
    bool exec(Ctx& ctx) const override {
        ++ctx.stats->statements;
        ctx.frame->refs[slot] = target->place(ctx);
        return false;
    }
};

struct EvalNode : StmtNode {
    ValuePtr value;
    bool exec(Ctx& ctx) const override {
        ++ctx.stats->statements;
        value->eval(ctx);
        return false;
    }
};

struct ReturnNode : StmtNode {
    ValuePtr value;
    bool exec(Ctx& ctx) const override {
        ++ctx.stats->statements;
        ctx.ret = value ? value->eval(ctx) : Cell{};
        return true;
    }
};

struct FreeNode : StmtNode {
    bool global = false;
    std::size_t slot = 0;
    bool exec(Ctx& ctx) const override {
        ++ctx.stats->statements;
        Buffer* b = live((global ? ctx.globals : ctx.frame)->ptrs[slot]);
        b->freed = true;
        ctx.live_temp_bytes -= b->bytes;
        b->cells.clear();
        b->cells.shrink_to_fit();
        return false;
    }
};

struct IfNode : StmtNode {
    ValuePtr cond;  // bool
    StmtPtr then_branch, else_branch;
    bool exec(Ctx& ctx) const override {
        ++ctx.stats->statements;
        Cell c = cond->eval(ctx);
        if (c.poison) poison_error();
        if (c.bits) return then_branch->exec(ctx);
        return else_branch ? else_branch->exec(ctx) : false;
    }
};

// Reference view semantics for an annotated loop run on the original array.
struct ViewRestore {
    ValuePtr size, start;  // int64; start may be null
    // AoS target: one buffer, leaf offsets within an element.
    PtrPtr target;
    std::vector<std::size_t> offsets;
    // Flat arrays (aos_conversion_target): one buffer per discarded leaf.
    std::vector<PtrPtr> flats;

    struct Saved {
        std::vector<std::pair<Buffer*, std::size_t>> where;  // buffer, first cell index of the range
        std::vector<Cell> cells;
        std::size_t n = 0;
    };

    Saved save(Ctx& ctx) const {
        Saved s;
        std::int64_t n = index_value(*size, ctx);
        if (n < 0) throw NegativeSize("conversion size " + std::to_string(n) + " is negative");
        std::int64_t first = start ? index_value(*start, ctx) : 0;
        s.n = static_cast<std::size_t>(n);
        auto check = [&](Buffer* b) {
            if (n == 0) return;
            if (first < 0) throw BoundsError(first, b->length);
            if (static_cast<std::uint64_t>(first) + s.n > b->length)
                throw BoundsError(first + n - 1, b->length);
        };
        if (target) {
            Buffer* b = live(target->buffer(ctx));
            check(b);
            s.where.emplace_back(b, static_cast<std::size_t>(first));
            for (std::size_t e = 0; e < s.n; ++e)
                for (std::size_t off : offsets) s.cells.push_back(b->cells[(s.where[0].second + e) * b->stride + off]);
        }
        for (const auto& f : flats) {
            Buffer* b = live(f->buffer(ctx));
            check(b);
            s.where.emplace_back(b, static_cast<std::size_t>(first));
            for (std::size_t e = 0; e < s.n; ++e) s.cells.push_back(b->cells[s.where.back().second + e]);
        }
        return s;
    }

    void restore(const Saved& s) const {
        std::size_t k = 0;
        std::size_t w = 0;
        if (target) {
            auto [b, first] = s.where[w++];
            for (std::size_t e = 0; e < s.n; ++e)
                for (std::size_t off : offsets) b->cells[(first + e) * b->stride + off] = s.cells[k++];
        }
        for (; w < s.where.size(); ++w) {
            auto [b, first] = s.where[w];
            for (std::size_t e = 0; e < s.n; ++e) b->cells[first + e] = s.cells[k++];
        }
    }
};

struct ForNode : StmtNode {
    StmtPtr init, step, body;
    ValuePtr cond;  // bool, may be null
    LoopRole role = LoopRole::None;
    std::unique_ptr<ViewRestore> view;

    bool run_loop(Ctx& ctx) const {
        if (init && init->exec(ctx)) return true;
        while (true) {
            if (cond) {
                Cell c = cond->eval(ctx);
                if (c.poison) poison_error();
                if (!c.bits) return false;
            }
            if (body->exec(ctx)) return true;
            if (step && step->exec(ctx)) return true;
        }
    }

    bool exec(Ctx& ctx) const override {
        ++ctx.stats->statements;
        if (role != LoopRole::None) {
            auto t0 = Clock::now();
            bool r = run_loop(ctx);
            (role == LoopRole::Prologue ? ctx.stats->prologue_seconds : ctx.stats->epilogue_seconds) +=
                seconds_since(t0);
            return r;
        }
        if (view) {
            auto saved = view->save(ctx);
            bool r = run_loop(ctx);
            view->restore(saved);
            return r;
        }
        return run_loop(ctx);
    }
};

// ---------------------------------------------------------------------------
// Compiler
// ---------------------------------------------------------------------------

struct Slot {
    enum class Store : std::uint8_t { Cells, Ptr, Ref } store = Store::Cells;
    bool global = false;
    std::size_t index = 0;
};

template <template <ScalarKind> class Node>
std::unique_ptr<ValueNode> by_kind(ScalarKind k) {
    switch (k) {
        case ScalarKind::Float64: return std::make_unique<Node<ScalarKind::Float64>>();
        case ScalarKind::Float32: return std::make_unique<Node<ScalarKind::Float32>>();
        case ScalarKind::Int32: return std::make_unique<Node<ScalarKind::Int32>>();
        case ScalarKind::Int64: return std::make_unique<Node<ScalarKind::Int64>>();
        case ScalarKind::Bool: return std::make_unique<Node<ScalarKind::Int32>>();
    }
    return nullptr;
}

// Sets the operand fields of a templated node created by by_kind.
template <template <ScalarKind> class Node, typename F>
void with_node(ValueNode& n, ScalarKind k, F&& f) {
    switch (k) {
        case ScalarKind::Float64: f(static_cast<Node<ScalarKind::Float64>&>(n)); break;
        case ScalarKind::Float32: f(static_cast<Node<ScalarKind::Float32>&>(n)); break;
        case ScalarKind::Int64: f(static_cast<Node<ScalarKind::Int64>&>(n)); break;
        default: f(static_cast<Node<ScalarKind::Int32>&>(n)); break;
    }
}

}  // namespace

class Program {
public:
    Program(const SourceUnit& unit, InterpOptions options) : unit_(unit), options_(options), types_(unit) {
        for (const auto& r : unit.records) layouts_.emplace(r.name, build_layout(r, unit));
        scopes_.emplace_back();
        current_ = &global_counts_;
        for (const auto& g : unit.globals) global_init_.push_back(decl(g, /*global=*/true));
        functions_.resize(unit.functions.size());
        for (std::size_t i = 0; i < unit.functions.size(); ++i) {
            functions_[i].def = &unit.functions[i];
            fn_index_.emplace(unit.functions[i].name, i);
        }
        for (auto& fn : functions_) compile_function(fn);
    }

    RunResult run(const std::string& entry, RuntimeStore store) const {
        auto it = fn_index_.find(entry);
        if (it == fn_index_.end()) throw RuntimeError("no function named '" + entry + "'");
        const FunctionCode& fn = functions_[it->second];

        RunResult result;
        std::vector<std::unique_ptr<Buffer>> arena;
        Frame globals;
        globals.cells.resize(global_counts_.cells);
        globals.ptrs.resize(global_counts_.ptrs, nullptr);
        Ctx ctx;
        ctx.globals = &globals;
        ctx.frame = &globals;
        ctx.stats = &result.stats;
        ctx.arena = &arena;
        ctx.mode = options_.mode;
        ctx.max_depth = options_.max_call_depth;

        auto t0 = Clock::now();
        for (std::size_t g = 0; g < unit_.globals.size(); ++g) {
            const VarDecl& d = unit_.globals[g];
            const Binding* b = store.find(d.name);
            if (!b) {
                global_init_[g]->exec(ctx);
                continue;
            }
            if (!(b->type == d.type) || b->cells.size() != leaf_count(d.type))
                throw RuntimeError("store binding '" + d.name + "' does not match the global's type");
            std::copy(b->cells.begin(), b->cells.end(),
                      globals.cells.begin() + static_cast<std::ptrdiff_t>(global_slot(d.name)));
        }

        Frame frame;
        frame.cells.resize(fn.cells);
        frame.ptrs.resize(fn.ptrs, nullptr);
        frame.refs.resize(fn.refs, nullptr);
        std::vector<std::pair<std::string, Buffer*>> arrays;
        for (std::size_t k = 0; k < fn.def->params.size(); ++k) {
            const Param& p = fn.def->params[k];
            Binding* b = store.find(p.name);
            if (!b) throw RuntimeError("store has no binding for parameter '" + p.name + "'");
            if (!(b->type == p.type)) throw RuntimeError("store binding '" + p.name + "' does not match the parameter type");
            std::size_t leaves = leaf_count(p.type);
            if (p.type.pointer) {
                auto buf = std::make_unique<Buffer>();
                buf->stride = leaves;
                buf->length = leaves == 0 ? 0 : b->cells.size() / leaves;
                buf->cells = std::move(b->cells);
                frame.ptrs[fn.param_slots[k]] = buf.get();
                arrays.emplace_back(p.name, buf.get());
                arena.push_back(std::move(buf));
            } else {
                if (b->cells.size() != leaves) throw RuntimeError("store binding '" + p.name + "' has the wrong size");
                std::copy(b->cells.begin(), b->cells.end(),
                          frame.cells.begin() + static_cast<std::ptrdiff_t>(fn.param_slots[k]));
            }
        }

        Cell ret = invoke(fn, ctx, frame);
        result.stats.total_seconds = seconds_since(t0);

        for (auto& [name, buf] : arrays) store.find(name)->cells = std::move(buf->cells);
        for (const auto& d : unit_.globals) {
            std::size_t slot = global_slot(d.name);
            std::size_t n = leaf_count(d.type);
            store.set(d.name, Binding{d.type, std::vector<Cell>(globals.cells.begin() + static_cast<std::ptrdiff_t>(slot),
                                                                globals.cells.begin() + static_cast<std::ptrdiff_t>(slot + n))});
        }
        result.store = std::move(store);
        if (!fn.def->return_type.is_void()) result.return_value = ret;
        return result;
    }

private:
    struct Counts {
        std::size_t cells = 0, ptrs = 0, refs = 0;
    };

    // -- types -------------------------------------------------------------

    const LayoutModel& layout(const std::string& record) const { return layouts_.at(record); }

    std::size_t leaf_count(const Type& t) const {
        std::size_t one = 1;
        if (t.kind == Type::Kind::Record) one = layout(t.record).leaves.size();
        if (t.extent && !t.pointer) one *= static_cast<std::size_t>(*t.extent);
        return one;
    }

    std::size_t element_bytes(const Type& element) const {
        if (element.kind == Type::Kind::Record) return layout(element.record).record_size;
        return scalar_size(element.scalar);
    }

    std::size_t field_offset(const std::string& record, const std::string& field) const {
        const RecordDef* r = unit_.find_record(record);
        std::size_t off = 0;
        for (const auto& f : r->fields) {
            if (f.name == field) return off;
            off += leaf_count(f.type);
        }
        throw InternalError("unknown field '" + field + "'");
    }

    Type type_of(const Expr& e) const {
        auto t = types_.type_of(e);
        if (!t) throw InternalError("interpreter given an ill-typed expression: " + describe(e));
        return *t;
    }

    static std::string describe(const Expr& e) {
        if (const auto* id = e.get_if<Ident>()) return id->name;
        return "expression at line " + std::to_string(e.loc.line);
    }

    // -- scopes ------------------------------------------------------------

    void push() {
        scopes_.emplace_back();
        types_.push();
    }
    void pop() {
        scopes_.pop_back();
        types_.pop();
    }

    Slot declare(const std::string& name, const Type& type, bool global, bool ref = false) {
        Slot s;
        s.global = global;
        if (ref) {
            s.store = Slot::Store::Ref;
            s.index = current_->refs++;
        } else if (type.pointer) {
            s.store = Slot::Store::Ptr;
            s.index = current_->ptrs++;
        } else {
            s.index = current_->cells;
            current_->cells += leaf_count(type);
        }
        scopes_.back()[name] = s;
        types_.declare(name, type);
        return s;
    }

    const Slot& lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto hit = it->find(name);
            if (hit != it->end()) return hit->second;
        }
        throw InternalError("unresolved name '" + name + "'");
    }

    std::size_t global_slot(const std::string& name) const { return scopes_.front().at(name).index; }

    // -- expressions -------------------------------------------------------

    static ValuePtr constant(Cell c, ScalarKind k) {
        auto n = std::make_unique<ConstNode>();
        n->value = c;
        n->kind = k;
        return n;
    }

    static ValuePtr convert_to(ValuePtr v, ScalarKind k) {
        if (v->kind == k) return v;
        if (auto* c = dynamic_cast<ConstNode*>(v.get())) return constant(convert(c->value, v->kind, k), k);
        auto n = std::make_unique<ConvertNode>();
        n->kind = k;
        n->src = std::move(v);
        return n;
    }

    ValuePtr value_as(const Expr& e, ScalarKind k) { return convert_to(value(e), k); }

    PlacePtr place(const Expr& e) {
        if (const auto* id = e.get_if<Ident>()) {
            const Slot& s = lookup(id->name);
            if (s.store == Slot::Store::Ref) {
                auto n = std::make_unique<RefPlace>();
                n->slot = s.index;
                return n;
            }
            if (s.store != Slot::Store::Cells) throw InternalError("array base '" + id->name + "' used as a value");
            if (s.global) {
                auto n = std::make_unique<GlobalPlace>();
                n->slot = s.index;
                return n;
            }
            auto n = std::make_unique<LocalPlace>();
            n->slot = s.index;
            return n;
        }
        if (const auto* fa = e.get_if<FieldAccess>()) {
            Type base = type_of(*fa->base);
            PlacePtr p = place(*fa->base);
            p->offset += field_offset(base.record, fa->field);
            return p;
        }
        if (const auto* ix = e.get_if<Index>()) {
            Type base = type_of(*ix->base);
            std::size_t stride = leaf_count(base.element());
            if (base.pointer) {
                auto n = std::make_unique<PtrIndexPlace>();
                n->base = pointer(*ix->base);
                n->index = value_as(*ix->index, ScalarKind::Int64);
                return n;
            }
            std::size_t extent = static_cast<std::size_t>(*base.extent);
            const auto* lit = ix->index->get_if<Literal>();
            if (lit && lit->kind == ScalarKind::Int64) {
                if (lit->int_value < 0 || static_cast<std::size_t>(lit->int_value) >= extent) {
                    auto bad = std::make_unique<BadPlace>();
                    bad->index = lit->int_value;
                    bad->extent = extent;
                    return bad;
                }
                PlacePtr p = place(*ix->base);
                p->offset += static_cast<std::size_t>(lit->int_value) * stride;
                return p;
            }
            auto n = std::make_unique<ArrayIndexPlace>();
            n->base = place(*ix->base);
            n->index = value_as(*ix->index, ScalarKind::Int64);
            n->extent = extent;
            n->stride = stride;
            return n;
        }
        throw InternalError("expression is not addressable: " + describe(e));
    }

    PtrPtr pointer(const Expr& e) {
        if (const auto* id = e.get_if<Ident>()) {
            const Slot& s = lookup(id->name);
            if (s.store != Slot::Store::Ptr) throw InternalError("'" + id->name + "' is not an array base");
            if (s.global) {
                auto n = std::make_unique<GlobalPtr>();
                n->slot = s.index;
                return n;
            }
            auto n = std::make_unique<LocalPtr>();
            n->slot = s.index;
            return n;
        }
        if (const auto* na = e.get_if<NewArray>()) {
            auto n = std::make_unique<NewArrayNode>();
            n->length = value_as(*na->length, ScalarKind::Int64);
            n->stride = leaf_count(na->element);
            n->element_bytes = element_bytes(na->element);
            return n;
        }
        throw InternalError("unsupported array expression: " + describe(e));
    }

    ValuePtr value(const Expr& e) {
        return std::visit(
            [&](const auto& n) -> ValuePtr {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, Literal>) {
                    if (n.kind == ScalarKind::Bool) return constant(make_cell_int(ScalarKind::Bool, n.bool_value), n.kind);
                    if (is_floating(n.kind)) return constant(make_cell(n.kind, n.float_value), n.kind);
                    return constant(make_cell_int(n.kind, n.int_value), n.kind);
                } else if constexpr (std::is_same_v<N, Ident> || std::is_same_v<N, Index> ||
                                     std::is_same_v<N, FieldAccess>) {
                    Type t = type_of(e);
                    if (!t.is_scalar()) throw InternalError("aggregate used as a scalar value: " + describe(e));
                    auto load = std::make_unique<LoadNode>();
                    load->kind = t.scalar;
                    load->src = place(e);
                    return load;
                } else if constexpr (std::is_same_v<N, Unary>) {
                    if (n.op == UnaryOp::Not) {
                        auto node = std::make_unique<NotNode>();
                        node->kind = ScalarKind::Bool;
                        node->operand = value_as(*n.operand, ScalarKind::Bool);
                        return node;
                    }
                    ScalarKind k = promote(type_of(*n.operand).scalar);
                    auto node = by_kind<NegNode>(k);
                    node->kind = k;
                    with_node<NegNode>(*node, k, [&](auto& x) { x.operand = value_as(*n.operand, k); });
                    return node;
                } else if constexpr (std::is_same_v<N, Binary>) {
                    return binary(n);
                } else if constexpr (std::is_same_v<N, Call>) {
                    return call(n, e);
                } else {
                    throw InternalError("new[] used outside a declaration");
                }
            },
            e.node);
    }

    ValuePtr binary(const Binary& b) {
        if (is_logical(b.op)) {
            auto node = std::make_unique<LogicalNode>();
            node->kind = ScalarKind::Bool;
            node->is_and = b.op == BinaryOp::And;
            node->lhs = value_as(*b.lhs, ScalarKind::Bool);
            node->rhs = value_as(*b.rhs, ScalarKind::Bool);
            return node;
        }
        ScalarKind k = common_type(type_of(*b.lhs).scalar, type_of(*b.rhs).scalar);
        if (is_comparison(b.op)) {
            auto node = by_kind<CompareNode>(k);
            node->kind = ScalarKind::Bool;
            with_node<CompareNode>(*node, k, [&](auto& x) {
                x.op = b.op;
                x.lhs = value_as(*b.lhs, k);
                x.rhs = value_as(*b.rhs, k);
            });
            return node;
        }
        auto node = by_kind<ArithNode>(k);
        node->kind = k;
        with_node<ArithNode>(*node, k, [&](auto& x) {
            x.op = b.op;
            x.lhs = value_as(*b.lhs, k);
            x.rhs = value_as(*b.rhs, k);
        });
        return node;
    }

    ValuePtr call(const Call& c, const Expr& e) {
        if (find_builtin(c.callee)) {
            if (c.callee == "sqrt") {
                auto node = std::make_unique<SqrtNode>();
                node->kind = ScalarKind::Float64;
                node->arg = value_as(c.args[0], ScalarKind::Float64);
                return node;
            }
            if (c.callee == "pow") {
                auto node = std::make_unique<PowNode>();
                node->kind = ScalarKind::Float64;
                node->base = value_as(c.args[0], ScalarKind::Float64);
                node->exp = value_as(c.args[1], ScalarKind::Float64);
                return node;
            }
            if (c.callee == "abs") {
                ScalarKind k = promote(type_of(c.args[0]).scalar);
                auto node = by_kind<AbsNode>(k);
                node->kind = k;
                with_node<AbsNode>(*node, k, [&](auto& x) { x.arg = value_as(c.args[0], k); });
                return node;
            }
            ScalarKind k = common_type(type_of(c.args[0]).scalar, type_of(c.args[1]).scalar);
            auto node = by_kind<MinMaxNode>(k);
            node->kind = k;
            with_node<MinMaxNode>(*node, k, [&](auto& x) {
                x.is_min = c.callee == "min";
                x.lhs = value_as(c.args[0], k);
                x.rhs = value_as(c.args[1], k);
            });
            return node;
        }
        auto it = fn_index_.find(c.callee);
        if (it == fn_index_.end()) throw InternalError("call to unknown function '" + c.callee + "'");
        const FunctionDef& def = unit_.functions[it->second];
        auto node = std::make_unique<CallNode>();
        node->functions = &functions_;
        node->index = it->second;
        node->kind = def.return_type.is_scalar() ? def.return_type.scalar : ScalarKind::Int64;
        // Callee slots are assigned in declaration order, mirroring compile_function.
        Counts callee;
        for (std::size_t i = 0; i < def.params.size(); ++i) {
            const Type& pt = def.params[i].type;
            ArgBinder a;
            if (pt.pointer) {
                a.kind = ArgBinder::Kind::Pointer;
                a.slot = callee.ptrs++;
                a.ptr = pointer(c.args[i]);
            } else if (pt.is_scalar()) {
                a.kind = ArgBinder::Kind::Scalar;
                a.slot = callee.cells++;
                a.value = value_as(c.args[i], pt.scalar);
            } else {
                a.kind = ArgBinder::Kind::Aggregate;
                a.slot = callee.cells;
                a.count = leaf_count(pt);
                callee.cells += a.count;
                a.place = place(c.args[i]);
            }
            node->args.push_back(std::move(a));
        }
        (void)e;
        return node;
    }

    // -- statements --------------------------------------------------------

    StmtPtr decl(const VarDecl& d, bool global) {
        // The initializer is compiled before the name enters scope.
        ValuePtr init_value;
        PtrPtr init_ptr;
        PlacePtr init_place;
        if (d.init) {
            if (d.type.pointer)
                init_ptr = pointer(*d.init);
            else if (d.type.is_scalar())
                init_value = value_as(*d.init, d.type.scalar);
            else
                init_place = place(*d.init);
        }
        Slot s = declare(d.name, d.type, global);
        if (d.type.pointer) {
            auto n = std::make_unique<SetPtrNode>();
            n->global = global;
            n->slot = s.index;
            n->src = std::move(init_ptr);
            return n;
        }
        PlacePtr dst = slot_place(s);
        if (d.type.is_scalar()) {
            auto n = std::make_unique<StoreNode>();
            n->dst = std::move(dst);
            n->value = init_value ? std::move(init_value) : constant(Cell{}, d.type.scalar);
            return n;
        }
        if (init_place) {
            auto n = std::make_unique<CopyNode>();
            n->dst = std::move(dst);
            n->src = std::move(init_place);
            n->count = leaf_count(d.type);
            return n;
        }
        auto n = std::make_unique<FillNode>();
        n->dst = std::move(dst);
        n->count = leaf_count(d.type);
        return n;
    }

    static PlacePtr slot_place(const Slot& s) {
        if (s.global) {
            auto p = std::make_unique<GlobalPlace>();
            p->slot = s.index;
            return p;
        }
        auto p = std::make_unique<LocalPlace>();
        p->slot = s.index;
        return p;
    }

    StmtPtr assign(const Expr& target, const Expr& value_expr, std::uint64_t RunStats::*counter) {
        Type t = type_of(target);
        if (t.pointer) {
            const Slot& s = lookup(target.as<Ident>().name);
            auto n = std::make_unique<SetPtrNode>();
            n->global = s.global;
            n->slot = s.index;
            n->src = pointer(value_expr);
            return n;
        }
        if (t.is_scalar()) {
            auto n = std::make_unique<StoreNode>();
            n->dst = place(target);
            n->value = value_as(value_expr, t.scalar);
            n->counter = counter;
            return n;
        }
        auto n = std::make_unique<CopyNode>();
        n->dst = place(target);
        n->src = place(value_expr);
        n->count = leaf_count(t);
        return n;
    }

    StmtPtr stmt(const Stmt& s, LoopRole role = LoopRole::None) {
        return std::visit(
            [&](const auto& n) -> StmtPtr {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, VarDecl>) {
                    return decl(n, false);
                } else if constexpr (std::is_same_v<N, RefBinding>) {
                    Type t = type_of(n.target);
                    auto node = std::make_unique<BindRefNode>();
                    node->target = place(n.target);
                    node->slot = declare(n.name, t, false, /*ref=*/true).index;
                    return node;
                } else if constexpr (std::is_same_v<N, Assign>) {
                    std::uint64_t RunStats::*counter = nullptr;
                    if (role == LoopRole::Prologue) counter = &RunStats::prologue_copies;
                    if (role == LoopRole::Epilogue) counter = &RunStats::epilogue_copies;
                    return assign(n.target, n.value, counter);
                } else if constexpr (std::is_same_v<N, CompoundAssign>) {
                    Type t = type_of(n.target);
                    auto node = std::make_unique<CompoundNode>();
                    node->target = t.scalar;
                    node->compute = common_type(t.scalar, type_of(n.value).scalar);
                    node->op = n.op;
                    node->dst = place(n.target);
                    node->value = value_as(n.value, node->compute);
                    return node;
                } else if constexpr (std::is_same_v<N, For>) {
                    return loop(n);
                } else if constexpr (std::is_same_v<N, If>) {
                    auto node = std::make_unique<IfNode>();
                    node->cond = value_as(n.cond, ScalarKind::Bool);
                    push();
                    node->then_branch = stmt(*n.then_branch);
                    pop();
                    if (n.else_branch) {
                        push();
                        node->else_branch = stmt(**n.else_branch);
                        pop();
                    }
                    return node;
                } else if constexpr (std::is_same_v<N, ExprStmt>) {
                    auto node = std::make_unique<EvalNode>();
                    node->value = value(n.expr);
                    return node;
                } else if constexpr (std::is_same_v<N, Return>) {
                    auto node = std::make_unique<ReturnNode>();
                    if (n.value) node->value = value_as(*n.value, ret_kind_);
                    return node;
                } else if constexpr (std::is_same_v<N, Block>) {
                    auto node = std::make_unique<BlockNode>();
                    push();
                    for (const auto& x : n.stmts) node->stmts.push_back(stmt(x, role));
                    pop();
                    return node;
                } else {
                    const Slot& sl = lookup(n.name);
                    auto node = std::make_unique<FreeNode>();
                    node->global = sl.global;
                    node->slot = sl.index;
                    return node;
                }
            },
            s.node);
    }

    StmtPtr loop(const For& f) {
        auto node = std::make_unique<ForNode>();
        node->role = f.attrs.role;
        if (options_.reference_views && f.attrs.has_conversion() && f.attrs.target && f.attrs.target_size)
            node->view = view_restore(f.attrs);
        push();
        if (f.init) node->init = stmt(**f.init);
        if (f.cond) node->cond = value_as(*f.cond, ScalarKind::Bool);
        if (f.step) node->step = stmt(**f.step);
        node->body = stmt(*f.body, f.attrs.role);
        pop();
        return node;
    }

    std::unique_ptr<ViewRestore> view_restore(const AttributeSet& a) {
        const RecordDef* record = nullptr;
        if (a.direction == Direction::AosToSoa) {
            const Type* t = types_.lookup(*a.target);
            if (!t || !t->pointer || t->kind != Type::Kind::Record) return nullptr;
            record = unit_.find_record(t->record);
        } else {
            record = unit_.find_record(*a.target);
        }
        if (!record) return nullptr;
        const LayoutModel& lay = layout(record->name);
        auto in_list = [](const std::optional<std::vector<std::string>>& list, const std::string& f, bool absent) {
            if (!list) return absent;
            return std::find(list->begin(), list->end(), f) != list->end();
        };
        auto v = std::make_unique<ViewRestore>();
        v->size = value_as(*a.target_size, ScalarKind::Int64);
        if (a.start_idx) v->start = value_as(*a.start_idx, ScalarKind::Int64);
        std::vector<std::size_t> discarded;
        for (std::size_t i = 0; i < lay.leaves.size(); ++i) {
            const std::string& top = lay.leaves[i].top_field();
            if (in_list(a.inputs, top, true) && !in_list(a.outputs, top, false)) discarded.push_back(i);
        }
        if (a.direction == Direction::AosToSoa) {
            v->target = pointer(make_ident(*a.target));
            v->offsets = discarded;
        } else {
            for (std::size_t i : discarded) v->flats.push_back(pointer(make_ident(lay.leaves[i].mangled_name)));
        }
        return v;
    }

    void compile_function(FunctionCode& fn) {
        Counts counts;
        current_ = &counts;
        ret_kind_ = fn.def->return_type.is_scalar() ? fn.def->return_type.scalar : ScalarKind::Int64;
        fn.ret_kind = ret_kind_;
        push();
        for (const auto& p : fn.def->params) fn.param_slots.push_back(declare(p.name, p.type, false).index);
        auto body = std::make_unique<BlockNode>();
        for (const auto& s : fn.def->body.stmts) body->stmts.push_back(stmt(s));
        pop();
        fn.body = std::move(body);
        fn.cells = counts.cells;
        fn.ptrs = counts.ptrs;
        fn.refs = counts.refs;
        current_ = &global_counts_;
    }

    const SourceUnit& unit_;
    InterpOptions options_;
    TypeScope types_;
    std::map<std::string, LayoutModel> layouts_;
    std::vector<std::map<std::string, Slot>> scopes_;
    Counts global_counts_;
    Counts* current_ = nullptr;
    std::vector<StmtPtr> global_init_;
    std::vector<FunctionCode> functions_;
    std::map<std::string, std::size_t> fn_index_;
    ScalarKind ret_kind_ = ScalarKind::Int64;
};

Interpreter::Interpreter(const SourceUnit& unit, InterpOptions options)
    : program_(std::make_unique<Program>(unit, options)) {}
Interpreter::~Interpreter() = default;
Interpreter::Interpreter(Interpreter&&) noexcept = default;
Interpreter& Interpreter::operator=(Interpreter&&) noexcept = default;

RunResult Interpreter::run(const std::string& entry, RuntimeStore store) const {
    return program_->run(entry, std::move(store));
}

RunResult run(const SourceUnit& unit, const std::string& entry, RuntimeStore store, InterpOptions options) {
    return Interpreter(unit, options).run(entry, std::move(store));
}

}  // namespace soalens
