#include <algorithm>
#include <atomic>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "soalens/bench.hpp"

namespace soalens {

bool VerifyTable::all_pass() const { return failures() == 0; }

std::size_t VerifyTable::failures() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return !c.pass; }));
}

namespace {

// Runs job(i) for i in [0, count) on a small worker pool.
template <typename F>
void parallel_for(std::size_t count, F&& job) {
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (std::size_t i = next++; i < count; i = next++) job(i);
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(loop);
    loop();
    for (auto& t : pool) t.join();
}

const KernelCase* find_kernel(const std::vector<KernelCase>& corpus, const std::string& name) {
    for (const auto& k : corpus)
        if (k.name == name) return &k;
    return nullptr;
}

}  // namespace

VerifyTable verify_all(const std::vector<KernelCase>& corpus, const VerifyOptions& options) {
    struct Pair {
        const KernelCase* kernel;
        BenchMode mode;
        SourceUnit original;
        SourceUnit transformed;
    };
    std::vector<Pair> pairs;
    for (const auto& k : corpus)
        for (BenchMode m : options.modes) {
            if (m == BenchMode::Aos) continue;  // nothing to compare
            SourceUnit annotated = annotated_variant(k, m);
            SourceUnit lowered = transform(annotated).unit;
            pairs.push_back({&k, m, std::move(annotated), std::move(lowered)});
        }

    VerifyTable table;
    for (const auto& p : pairs)
        for (std::size_t n : options.sizes)
            for (std::uint64_t seed : options.seeds) {
                VerifyCell c;
                c.kernel = p.kernel->name;
                c.mode = p.mode;
                c.seed = seed;
                c.n = n;
                table.cells.push_back(std::move(c));
            }

    const std::size_t per_pair = options.sizes.size() * options.seeds.size();
    parallel_for(table.cells.size(), [&](std::size_t i) {
        VerifyCell& c = table.cells[i];
        const Pair& p = pairs[i / per_pair];
        try {
            Verdict v = differential_check(p.original, p.transformed, c.kernel, c.seed, c.n);
            c.pass = v.pass;
            c.stats = v.transformed_stats;
            if (!v.pass && !v.mismatches.empty()) {
                const auto& m = v.mismatches.front();
                c.detail = m.key + ": expected " + m.expected + ", got " + m.actual;
            }
        } catch (const Error& e) {
            c.pass = false;
            c.detail = e.what();
        }
    });
    return table;
}

std::string format_verify(const VerifyTable& table) {
    // kernel x mode summary, then each failure
    std::ostringstream os;
    struct Tally {
        std::size_t pass = 0, total = 0;
    };
    std::vector<std::pair<std::string, Tally>> rows;
    for (const auto& c : table.cells) {
        std::string key = c.kernel + " " + std::string(to_string(c.mode));
        auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.first == key; });
        if (it == rows.end()) {
            rows.emplace_back(key, Tally{});
            it = rows.end() - 1;
        }
        ++it->second.total;
        if (c.pass) ++it->second.pass;
    }
    for (const auto& [key, t] : rows)
        os << std::left << std::setw(20) << key << ' ' << t.pass << '/' << t.total
           << (t.pass == t.total ? "  pass" : "  FAIL") << '\n';
    for (const auto& c : table.cells)
        if (!c.pass)
            os << "  " << c.kernel << ' ' << to_string(c.mode) << " seed=" << c.seed << " n=" << c.n << ": "
               << c.detail << '\n';
    os << (table.all_pass() ? "all pass" : std::to_string(table.failures()) + " failing") << " ("
       << table.cells.size() << " checks)\n";
    return os.str();
}

RunStats time_once(const KernelCase& kernel, BenchMode mode, std::size_t n, std::uint64_t seed) {
    SourceUnit u = lowered_variant(kernel, mode);
    InterpOptions o;
    o.mode = PoisonMode::Run;
    Interpreter interp(u, o);
    return interp.run(kernel.name, seed_entry_store(kernel.unit, kernel.name, n, seed)).stats;
}

namespace {

void summarize(BenchRow& row, Complexity complexity) {
    row.samples = row.times.size();
    if (row.times.empty()) return;
    double total = std::accumulate(row.times.begin(), row.times.end(), 0.0);
    row.avg = total / static_cast<double>(row.samples);
    auto [lo, hi] = std::minmax_element(row.times.begin(), row.times.end());
    row.min = *lo;
    row.max = *hi;
    row.min_index = static_cast<std::size_t>(lo - row.times.begin());
    row.max_index = static_cast<std::size_t>(hi - row.times.begin());
    double n = static_cast<double>(row.n);
    double work = complexity == Complexity::Quadratic ? n * std::max(0.0, n - 1) : n;
    row.throughput = total > 0 ? static_cast<double>(row.samples) * work / total : 0.0;
}

}  // namespace

BenchReport bench_all(const std::vector<KernelCase>& corpus, const BenchOptions& options) {
    BenchReport report;
    std::vector<const KernelCase*> kernels;
    if (options.kernels.empty()) {
        for (const auto& k : corpus) kernels.push_back(&k);
    } else {
        for (const auto& name : options.kernels) {
            const KernelCase* k = find_kernel(corpus, name);
            if (!k) throw Error("unknown kernel '" + name + "'");
            kernels.push_back(k);
        }
    }
    for (std::size_t n : options.sizes)
        for (BenchMode mode : options.modes)
            for (const KernelCase* k : kernels) {
                BenchRow row;
                row.kernel = k->name;
                row.mode = mode;
                row.n = n;
                SourceUnit lowered = lowered_variant(*k, mode);
                if (options.native_cc) {
                    row.native = true;
                    row.times = run_native(*options.native_cc, lowered, k->name, n, options.samples, options.seed);
                } else {
                    InterpOptions o;
                    o.mode = PoisonMode::Run;
                    Interpreter interp(lowered, o);
                    RuntimeStore input = seed_entry_store(k->unit, k->name, n, options.seed);
                    double conversion = 0, body = 0;
                    for (std::size_t s = 0; s < options.samples; ++s) {
                        RunStats st = interp.run(k->name, input).stats;
                        row.times.push_back(st.total_seconds);
                        conversion += st.prologue_seconds + st.epilogue_seconds;
                        body += st.body_seconds();
                    }
                    if (options.samples) {
                        row.conversion_avg = conversion / static_cast<double>(options.samples);
                        row.body_avg = body / static_cast<double>(options.samples);
                    }
                }
                summarize(row, k->complexity);
                report.rows.push_back(std::move(row));
            }
    return report;
}

std::string format_report(const BenchReport& report) {
    std::ostringstream os;
    const std::string rule(31, '=');
    std::size_t last_n = SIZE_MAX;
    std::optional<BenchMode> last_mode;
    for (const auto& r : report.rows) {
        if (r.n != last_n || r.mode != last_mode) {
            os << rule << "\n  " << r.n << " particles (" << r.samples << " samples), " << to_string(r.mode)
               << (r.native ? " native" : "") << '\n'
               << rule << '\n';
            last_n = r.n;
            last_mode = r.mode;
        }
        std::string label = r.kernel + " kernel:";
        os << std::left << std::setw(16) << label << r.avg << "  (avg=" << r.avg << ",#measurements=" << r.samples
           << ",max=" << r.max << "(value #" << r.max_index << "),min=" << r.min << "(value #" << r.min_index
           << "),+" << (r.avg > 0 ? (r.max - r.avg) / r.avg * 100.0 : 0.0) << '\n';
    }
    return os.str();
}

std::string format_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "kernel,mode,n,samples,avg,min,max,throughput\n";
    os << std::setprecision(9);
    for (const auto& r : report.rows)
        os << r.kernel << ',' << to_string(r.mode) << ',' << r.n << ',' << r.samples << ',' << r.avg << ',' << r.min
           << ',' << r.max << ',' << r.throughput << '\n';
    return os.str();
}

std::string format_conversion(const BenchReport& report) {
    std::ostringstream os;
    os << "conversion vs body (avg seconds)\n";
    for (const auto& r : report.rows) {
        if (r.mode == BenchMode::Aos || r.native) continue;
        os << "  " << std::left << std::setw(8) << r.kernel << std::setw(10) << to_string(r.mode) << " n=" << r.n
           << "  conversion=" << r.conversion_avg << "  body=" << r.body_avg;
        if (r.conversion_avg > 0) os << "  ratio=" << r.body_avg / r.conversion_avg;
        os << '\n';
    }
    return os.str();
}

}  // namespace soalens
