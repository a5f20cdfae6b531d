#include "fixtures.hpp"

#include "soalens/frontend.hpp"

namespace soalens::testing {

std::string source_path(const std::string& relative) { return std::string(SOALENS_SOURCE_DIR) + "/" + relative; }

std::string read_source(const std::string& relative) { return read_text_file(source_path(relative)); }

const char* const kSmallDrift = R"(struct Particle {
    double pos[2];
    double vel[2];
    double mass;
    bool updated;
};

void drift(Particle *particles, int size, double dt) {
    [[clang::soa_conversion_target(particles)]]
    [[clang::soa_conversion_target_size(size)]]
    [[clang::soa_conversion_inputs(pos, vel, updated)]]
    [[clang::soa_conversion_outputs(pos, updated)]]
    for (int i = 0; i < size; i++) {
        auto &p = particles[i];
        p.pos[0] += p.vel[0] * dt;
        p.pos[1] += p.vel[1] * dt;
        p.updated = true;
    }
}
)";

Binding scalar_binding(ScalarKind kind, double v) { return Binding{Type::scalar_type(kind), {make_cell(kind, v)}}; }

Binding int_binding(std::int64_t v) {
    return Binding{Type::scalar_type(ScalarKind::Int64), {make_cell_int(ScalarKind::Int64, v)}};
}

RuntimeStore kernel_store(const SourceUnit& unit, const std::string& record, std::size_t total, std::int64_t size,
                          std::int64_t start, std::uint64_t seed) {
    RuntimeStore s = seed_store(unit, record, total, seed, "data");
    s.set("size", int_binding(size));
    s.set("start", int_binding(start));
    return s;
}

}  // namespace soalens::testing
