#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "spinr/aperture.hpp"
#include "spinr/response.hpp"
#include "spinr/scene_field.hpp"
#include "spinr/signal.hpp"

namespace spinr {

// Differentiable forward models mapping a sampled reflectivity field plus a
// pose to synthetic radar responses. The spectral model evaluates
//   Z_k = sum_i w_i sigma_i / (N r_t r_r) e^{i phi_i} D_k(alpha_i)
// directly at the window bins; the time-domain model synthesizes the beat
// superposition over all N samples; the range-quantized model drops each
// scatterer into its nearest bin with no leakage. All three share the
// amplitude convention 1/(N R_T R_R) and are linear in sigma, and
// spectral_forward == truncate(dft(time_forward)) up to floating-point
// reassociation.

struct PathGeometry {
    double r_t = 0.0;  // Tx -> point, m
    double r_r = 0.0;  // point -> Rx, m
    double tau = 0.0;  // (r_t + r_r) / c, s
};

PathGeometry path_geometry(const SensorPose& pose, const Vec3& point, double c);

// Operation counters for the benchmark harness. Incremented in bulk per
// call, so the hot loops stay free of atomics.
struct ForwardCounters {
    std::atomic<std::uint64_t> spectral_kernel_evals{0};  // |window| * |points|
    std::atomic<std::uint64_t> time_sample_evals{0};      // N * |points|
    std::atomic<std::uint64_t> rq_scatterer_adds{0};      // |points|
};
ForwardCounters& forward_counters();
void reset_forward_counters();

SpectralResponse spectral_forward(const ChirpConfig& cfg, const SensorPose& pose,
                                  std::span<const QuadraturePoint> points,
                                  std::span<const double> sigmas, const BinWindow& window);

// d(loss)/d(sigma_i) given upstream = d(loss)/d(Z_k) for each window bin,
// under the real inner product on complex values.
std::vector<double> spectral_backward(const ChirpConfig& cfg, const SensorPose& pose,
                                      std::span<const QuadraturePoint> points,
                                      const BinWindow& window,
                                      std::span<const std::complex<double>> upstream);

// Beat-signal superposition before any transform: sample n =
// sum_i w_i sigma_i / (r_t r_r) e^{i phi_i} e^{i alpha_i n}.
std::vector<std::complex<double>> time_forward(const ChirpConfig& cfg, const SensorPose& pose,
                                               std::span<const QuadraturePoint> points,
                                               std::span<const double> sigmas);

// Adjoint of time_forward: upstream holds d(loss)/d(sample_n).
std::vector<double> time_backward(const ChirpConfig& cfg, const SensorPose& pose,
                                  std::span<const QuadraturePoint> points,
                                  std::span<const std::complex<double>> upstream);

// 1/N-normalized DFT. Radix-2 when the length is a power of two, direct
// summation otherwise; the two agree to ~1e-15.
std::vector<std::complex<double>> dft(std::span<const std::complex<double>> samples);
// Exact inverse of dft (no normalization on the way back).
std::vector<std::complex<double>> idft(std::span<const std::complex<double>> bins);

SpectralResponse truncate(std::span<const std::complex<double>> bins, const BinWindow& window);

// Range-quantized model: each scatterer's contribution w sigma / (r_t r_r)
// e^{i phi} (its on-bin spectral value) lands wholly in bin
// round(fractional_bin(tau)); half-bin ties round up toward the farther bin.
// No leakage is modeled. Scatterers landing outside the window are dropped
// and counted in *dropped when given.
SpectralResponse rq_forward(const ChirpConfig& cfg, const SensorPose& pose,
                            std::span<const QuadraturePoint> points,
                            std::span<const double> sigmas, const BinWindow& window,
                            std::size_t* dropped = nullptr);

std::vector<double> rq_backward(const ChirpConfig& cfg, const SensorPose& pose,
                                std::span<const QuadraturePoint> points, const BinWindow& window,
                                std::span<const std::complex<double>> upstream);

}  // namespace spinr
