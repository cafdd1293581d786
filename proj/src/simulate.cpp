#include "spinr/simulate.hpp"

#include <cmath>

#include "spinr/forward.hpp"
#include "spinr/parallel.hpp"
#include "spinr/rng.hpp"

namespace spinr {

MeasurementSet simulate(const PhantomSpec& phantom, const CylindricalApertureSpec& aperture,
                        const ChirpConfig& cfg, const SimulateOptions& options) {
    const auto scatterers = sample_phantom(phantom, options.seed);
    std::vector<QuadraturePoint> points(scatterers.size());
    std::vector<double> sigmas(scatterers.size());
    for (std::size_t i = 0; i < scatterers.size(); ++i) {
        points[i] = {scatterers[i].position, 1.0};  // discrete scatterers, unit measure
        sigmas[i] = scatterers[i].sigma;
    }

    MeasurementSet set;
    set.chirp = cfg;
    set.bounds = phantom.bounds;
    set.poses = generate_poses(aperture);
    set.window = bin_window(cfg, phantom.bounds, set.poses, options.guard);
    set.noise_sigma = options.noise_sigma;
    set.seed = options.seed;

    const std::size_t width = set.window.width();
    const std::size_t n = cfg.num_samples;
    set.values.resize(set.poses.size() * width);
    if (options.full_spectrum) set.full_spectrum.resize(set.poses.size() * n);
    const BinWindow all_bins(0, static_cast<int>(n) - 1, 0);

    parallel_for(set.poses.size(), [&](std::size_t lo, std::size_t hi, unsigned) {
        for (std::size_t p = lo; p < hi; ++p) {
            if (options.full_spectrum) {
                const auto full = spectral_forward(cfg, set.poses[p], points, sigmas, all_bins);
                std::copy(full.values.begin(), full.values.end(),
                          set.full_spectrum.begin() + p * n);
                for (std::size_t j = 0; j < width; ++j) {
                    set.values[p * width + j] =
                        full.values[static_cast<std::size_t>(set.window.k_min) + j];
                }
            } else {
                const auto resp = spectral_forward(cfg, set.poses[p], points, sigmas, set.window);
                std::copy(resp.values.begin(), resp.values.end(), set.values.begin() + p * width);
            }
        }
    });

    if (options.noise_sigma > 0.0) {
        // One sequential draw stream, pose-major then bin-major, so the file
        // is reproducible byte-for-byte under a fixed seed. When the full
        // spectrum is stored the window values are its slice, keeping both
        // views of the measurement consistent.
        Rng noise(options.seed + 0x9e3779b97f4a7c15ULL);
        const double comp_std = options.noise_sigma / std::sqrt(2.0);
        for (std::size_t p = 0; p < set.poses.size(); ++p) {
            if (options.full_spectrum) {
                for (std::size_t k = 0; k < n; ++k) {
                    const std::complex<double> z{comp_std * noise.normal(),
                                                 comp_std * noise.normal()};
                    set.full_spectrum[p * n + k] += z;
                    if (set.window.contains(static_cast<int>(k))) {
                        set.values[p * width + (k - static_cast<std::size_t>(set.window.k_min))] += z;
                    }
                }
            } else {
                for (std::size_t j = 0; j < width; ++j) {
                    set.values[p * width + j] += std::complex<double>{comp_std * noise.normal(),
                                                                      comp_std * noise.normal()};
                }
            }
        }
    }

    if (options.mono_convert) {
        const Vec3 x_ref = phantom.bounds.center();
        for (std::size_t p = 0; p < set.poses.size(); ++p) {
            if (set.poses[p].monostatic()) continue;
            const std::complex<double> phasor =
                std::polar(1.0, -mono_compensation_phase(set.poses[p], cfg, x_ref));
            for (std::size_t j = 0; j < width; ++j) set.values[p * width + j] *= phasor;
            if (options.full_spectrum) {
                for (std::size_t k = 0; k < n; ++k) set.full_spectrum[p * n + k] *= phasor;
            }
            const Vec3 mid = 0.5 * (set.poses[p].tx + set.poses[p].rx);
            set.poses[p] = {mid, mid};
        }
        set.mono_converted = true;
    }

    set.validate();
    return set;
}

}  // namespace spinr
