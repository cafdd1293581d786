#pragma once

#include <complex>
#include <vector>

#include "spinr/dataset.hpp"
#include "spinr/volume.hpp"

namespace spinr {

enum class BackprojectionOutput {
    Magnitude,     // |coherent sum| per voxel
    CoherentReal,  // Re(coherent sum), clamped to >= 0
};

// Frequency-domain matched filter accumulated per voxel:
//   A(v) = sum_poses sum_{k in window} Z~_k conj(K_k(tau_pose(v)))
// with K_k the unit-amplitude spectral kernel (1/N) e^{i 2pi f0 tau} D_k.
// Linear in the measurements; (voxel, pose) pairs with a coincident sensor
// are skipped.
std::vector<std::complex<double>> backproject_complex(const MeasurementSet& data,
                                                      const Vec3& origin, double voxel_size,
                                                      const std::array<std::size_t, 3>& dims);

// Dense intensity volume from the coherent accumulation.
Volume backproject(const MeasurementSet& data, const Vec3& origin, double voxel_size,
                   const std::array<std::size_t, 3>& dims,
                   BackprojectionOutput output = BackprojectionOutput::Magnitude);

Volume backproject(const MeasurementSet& data, const SceneBounds& bounds, std::size_t res,
                   BackprojectionOutput output = BackprojectionOutput::Magnitude);

}  // namespace spinr
