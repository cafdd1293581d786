#pragma once

// Shared desk-scale configuration used across the test suites: an
// AWR1843-like chirp, a 0.36 m cube scene, and a cylindrical aperture of
// radius 0.23 m around it.

#include "spinr/aperture.hpp"
#include "spinr/geometry.hpp"
#include "spinr/signal.hpp"

namespace fixtures {

// 70.295e12 Hz/s slope, 5 MHz ADC, 256 samples, f0 = 0 (training pipeline).
inline spinr::ChirpConfig desk_chirp() { return spinr::ChirpConfig(0.0, 70.295e12, 5e6, 256); }

// Same chirp with a 77 GHz carrier.
inline spinr::ChirpConfig desk_chirp_carrier() {
    return spinr::ChirpConfig(77e9, 70.295e12, 5e6, 256);
}

// Bandwidth exactly 4 GHz at the same ADC settings (S = 4e9 * fs / N).
inline spinr::ChirpConfig chirp_4ghz() { return spinr::ChirpConfig(0.0, 7.8125e13, 5e6, 256); }

inline spinr::SceneBounds desk_bounds() {
    return spinr::SceneBounds({-0.18, -0.18, -0.18}, {0.18, 0.18, 0.18});
}

inline spinr::CylindricalApertureSpec desk_aperture(std::size_t n_z = 4,
                                                    std::size_t n_theta = 90) {
    spinr::CylindricalApertureSpec spec;
    spec.radius = 0.23;
    spec.z_min = -0.05;
    spec.z_max = 0.05;
    spec.n_z = n_z;
    spec.n_theta = n_theta;
    return spec;
}

}  // namespace fixtures
