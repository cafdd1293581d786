#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "spinr/geometry.hpp"

namespace spinr {

struct Scatterer {
    Vec3 position;
    double sigma = 0.0;
};

// Desk-scale test scenes built from discrete scatterer sets: explicit
// points, quasi-uniformly sampled sphere and box shells, or vertices read
// from an OBJ mesh.
struct PhantomSpec {
    struct Point {
        Vec3 position;
        double sigma = 1.0;
    };
    struct SphereShell {
        Vec3 center;
        double radius = 0.0;
        double sigma = 1.0;
        std::size_t count = 0;
    };
    struct BoxShell {
        Vec3 min;
        Vec3 max;
        double sigma = 1.0;
        std::size_t count = 0;
    };
    struct ObjVertices {
        std::string path;
        double sigma = 1.0;
        std::size_t max_points = 0;  // 0 = all vertices
    };
    using Primitive = std::variant<Point, SphereShell, BoxShell, ObjVertices>;

    SceneBounds bounds;
    std::vector<Primitive> primitives;
};

// Expands the primitives into scatterers. Sphere shells use a Fibonacci
// lattice with a seed-dependent azimuth offset; box shells draw seeded
// uniform samples on the faces, weighted by face area. Throws when the
// result is empty or any scatterer falls outside bounds.
std::vector<Scatterer> sample_phantom(const PhantomSpec& spec, std::uint64_t seed);

}  // namespace spinr
