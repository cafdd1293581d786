#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "spinr/geometry.hpp"

namespace spinr {

// Dense scalar grid over the scene: backprojection output, field export, and
// metrics input. Cells are cubes of side voxel_size; intensities are stored
// x-fastest, z-slowest.
struct Volume {
    Vec3 origin;
    double voxel_size = 0.0;
    std::array<std::size_t, 3> dims{0, 0, 0};
    std::vector<double> intensities;

    Volume() = default;
    Volume(const Vec3& origin_, double voxel_size_, const std::array<std::size_t, 3>& dims_)
        : origin(origin_), voxel_size(voxel_size_), dims(dims_),
          intensities(dims_[0] * dims_[1] * dims_[2], 0.0) {
        if (!(voxel_size > 0.0)) throw std::invalid_argument("Volume: voxel_size must be > 0");
        for (std::size_t d : dims)
            if (d < 1) throw std::invalid_argument("Volume: dims must be >= 1");
    }

    static Volume over(const SceneBounds& bounds, std::size_t res) {
        const Vec3 ext = bounds.extent();
        const double h = ext.x / static_cast<double>(res);
        if (std::abs(ext.y - ext.x) > 1e-9 * ext.x || std::abs(ext.z - ext.x) > 1e-9 * ext.x)
            throw std::invalid_argument("Volume::over: bounds must be cubic");
        return Volume(bounds.min_corner, h, {res, res, res});
    }

    std::size_t cell_count() const { return dims[0] * dims[1] * dims[2]; }
    std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return (iz * dims[1] + iy) * dims[0] + ix;
    }
    double& at(std::size_t ix, std::size_t iy, std::size_t iz) {
        return intensities[index(ix, iy, iz)];
    }
    double at(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return intensities[index(ix, iy, iz)];
    }
    Vec3 voxel_center(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return origin + voxel_size * Vec3{static_cast<double>(ix) + 0.5,
                                          static_cast<double>(iy) + 0.5,
                                          static_cast<double>(iz) + 0.5};
    }
    std::array<std::size_t, 3> unflatten(std::size_t flat) const {
        const std::size_t ix = flat % dims[0];
        const std::size_t iy = (flat / dims[0]) % dims[1];
        const std::size_t iz = flat / (dims[0] * dims[1]);
        return {ix, iy, iz};
    }
    bool same_grid(const Volume& other) const {
        return dims == other.dims && std::abs(voxel_size - other.voxel_size) < 1e-12 &&
               distance(origin, other.origin) < 1e-12;
    }
};

}  // namespace spinr
