#pragma once

#include <cstdint>

#include "spinr/aperture.hpp"
#include "spinr/dataset.hpp"
#include "spinr/phantom.hpp"

namespace spinr {

struct SimulateOptions {
    double noise_sigma = 0.0;  // complex-Gaussian std per bin (sqrt(E|z|^2))
    std::uint64_t seed = 0;
    bool mono_convert = false;   // convert multistatic pairs to virtual monostatic
    bool full_spectrum = false;  // also store all N bins per pose (for tf-ts)
    int guard = 2;               // extra window bins each side
};

// Samples the phantom, generates the aperture poses, evaluates the closed
// form spectral model over the bin window for every pose, then applies
// optional per-bin complex Gaussian noise and optional multistatic-to-
// monostatic conversion (reference point: scene-bounds center).
// Deterministic given the seed and a fixed thread count.
MeasurementSet simulate(const PhantomSpec& phantom, const CylindricalApertureSpec& aperture,
                        const ChirpConfig& cfg, const SimulateOptions& options = {});

}  // namespace spinr
