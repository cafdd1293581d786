#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace spinr {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, vacuum
inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator*(const Vec3& v, double s) { return s * v; }
inline Vec3 operator/(const Vec3& v, double s) { return {v.x / s, v.y / s, v.z / s}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a = a + b; return a; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline double squared_distance(const Vec3& a, const Vec3& b) {
    const Vec3 d = a - b;
    return dot(d, d);
}

inline bool finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Axis-aligned bounded spatial domain the reconstruction operates on.
struct SceneBounds {
    Vec3 min_corner;
    Vec3 max_corner;

    SceneBounds() = default;
    SceneBounds(const Vec3& lo, const Vec3& hi) : min_corner(lo), max_corner(hi) {
        if (!(lo.x < hi.x && lo.y < hi.y && lo.z < hi.z)) {
            throw std::invalid_argument("SceneBounds: min_corner must be < max_corner componentwise");
        }
    }

    Vec3 center() const { return 0.5 * (min_corner + max_corner); }
    Vec3 extent() const { return max_corner - min_corner; }
    double volume() const {
        const Vec3 e = extent();
        return e.x * e.y * e.z;
    }
    bool contains(const Vec3& p) const {
        return p.x >= min_corner.x && p.x <= max_corner.x && p.y >= min_corner.y &&
               p.y <= max_corner.y && p.z >= min_corner.z && p.z <= max_corner.z;
    }
    std::array<Vec3, 8> corners() const {
        std::array<Vec3, 8> out;
        int i = 0;
        for (double cx : {min_corner.x, max_corner.x})
            for (double cy : {min_corner.y, max_corner.y})
                for (double cz : {min_corner.z, max_corner.z}) out[i++] = {cx, cy, cz};
        return out;
    }
};

// Distance from a point to the closed box (0 when inside).
inline double distance_to_bounds(const Vec3& p, const SceneBounds& b) {
    const double dx = std::max({b.min_corner.x - p.x, 0.0, p.x - b.max_corner.x});
    const double dy = std::max({b.min_corner.y - p.y, 0.0, p.y - b.max_corner.y});
    const double dz = std::max({b.min_corner.z - p.z, 0.0, p.z - b.max_corner.z});
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace spinr
