#include "spinr/phantom.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spinr/rng.hpp"

namespace spinr {

namespace {

void emit_sphere_shell(const PhantomSpec::SphereShell& s, Rng& rng,
                       std::vector<Scatterer>& out) {
    if (s.count == 0 || !(s.radius > 0.0))
        throw std::invalid_argument("phantom: sphere shell needs count >= 1 and radius > 0");
    // Fibonacci lattice; the seeded azimuth offset decorrelates repeated shells.
    const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
    const double phase = rng.uniform(0.0, kTwoPi);
    for (std::size_t i = 0; i < s.count; ++i) {
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(s.count);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * static_cast<double>(i) + phase;
        out.push_back({s.center + s.radius * Vec3{r * std::cos(phi), r * std::sin(phi), z},
                       s.sigma});
    }
}

void emit_box_shell(const PhantomSpec::BoxShell& b, Rng& rng, std::vector<Scatterer>& out) {
    if (b.count == 0) throw std::invalid_argument("phantom: box shell needs count >= 1");
    const Vec3 e = b.max - b.min;
    if (!(e.x > 0.0 && e.y > 0.0 && e.z > 0.0))
        throw std::invalid_argument("phantom: box shell needs min < max");
    // Face areas: +-x, +-y, +-z.
    const double areas[6] = {e.y * e.z, e.y * e.z, e.x * e.z, e.x * e.z, e.x * e.y, e.x * e.y};
    double total = 0.0;
    for (double a : areas) total += a;
    for (std::size_t i = 0; i < b.count; ++i) {
        double pick = rng.uniform(0.0, total);
        int face = 0;
        for (; face < 5; ++face) {
            if (pick < areas[face]) break;
            pick -= areas[face];
        }
        const double u = rng.next_double();
        const double v = rng.next_double();
        Vec3 p = b.min;
        switch (face) {
            case 0: p = {b.min.x, b.min.y + u * e.y, b.min.z + v * e.z}; break;
            case 1: p = {b.max.x, b.min.y + u * e.y, b.min.z + v * e.z}; break;
            case 2: p = {b.min.x + u * e.x, b.min.y, b.min.z + v * e.z}; break;
            case 3: p = {b.min.x + u * e.x, b.max.y, b.min.z + v * e.z}; break;
            case 4: p = {b.min.x + u * e.x, b.min.y + v * e.y, b.min.z}; break;
            case 5: p = {b.min.x + u * e.x, b.min.y + v * e.y, b.max.z}; break;
        }
        out.push_back({p, b.sigma});
    }
}

void emit_obj_vertices(const PhantomSpec::ObjVertices& o, std::vector<Scatterer>& out) {
    std::ifstream in(o.path);
    if (!in) throw std::runtime_error("phantom: cannot open OBJ file " + o.path);
    std::vector<Vec3> vertices;
    std::string line;
    while (std::getline(in, line)) {
        if (line.size() < 2 || line[0] != 'v' || !(line[1] == ' ' || line[1] == '\t')) continue;
        std::istringstream ls(line.substr(1));
        Vec3 p;
        if (ls >> p.x >> p.y >> p.z) vertices.push_back(p);
    }
    if (vertices.empty()) throw std::runtime_error("phantom: no vertices in " + o.path);
    if (o.max_points == 0 || vertices.size() <= o.max_points) {
        for (const auto& v : vertices) out.push_back({v, o.sigma});
        return;
    }
    // Even-stride subsample keeps the selection independent of any seed.
    for (std::size_t i = 0; i < o.max_points; ++i) {
        const std::size_t idx = i * vertices.size() / o.max_points;
        out.push_back({vertices[idx], o.sigma});
    }
}

}  // namespace

std::vector<Scatterer> sample_phantom(const PhantomSpec& spec, std::uint64_t seed) {
    std::vector<Scatterer> out;
    Rng rng(seed);
    for (const auto& prim : spec.primitives) {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, PhantomSpec::Point>) {
                    out.push_back({p.position, p.sigma});
                } else if constexpr (std::is_same_v<T, PhantomSpec::SphereShell>) {
                    emit_sphere_shell(p, rng, out);
                } else if constexpr (std::is_same_v<T, PhantomSpec::BoxShell>) {
                    emit_box_shell(p, rng, out);
                } else {
                    emit_obj_vertices(p, out);
                }
            },
            prim);
    }
    if (out.empty()) throw std::invalid_argument("phantom: no scatterers produced");
    for (const auto& s : out) {
        if (!(s.sigma >= 0.0)) throw std::invalid_argument("phantom: sigma must be >= 0");
        if (!spec.bounds.contains(s.position))
            throw std::invalid_argument("phantom: scatterer outside scene bounds");
    }
    return out;
}

}  // namespace spinr
