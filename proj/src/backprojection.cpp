#include "spinr/backprojection.hpp"

#include <cmath>

#include "spinr/parallel.hpp"
#include "spinr/signal.hpp"

namespace spinr {

std::vector<std::complex<double>> backproject_complex(const MeasurementSet& data,
                                                      const Vec3& origin, double voxel_size,
                                                      const std::array<std::size_t, 3>& dims) {
    data.validate();
    if (data.poses.empty()) throw std::invalid_argument("backproject: dataset has no measurements");
    const ChirpConfig& cfg = data.chirp;
    const std::size_t n = cfg.num_samples;
    const double nn = static_cast<double>(n);
    const BinWindow& window = data.window;
    const std::size_t width = window.width();

    std::vector<std::complex<double>> beta_phasors(width);
    for (std::size_t j = 0; j < width; ++j) {
        const double beta =
            kTwoPi * static_cast<double>(window.k_min + static_cast<int>(j)) / nn;
        beta_phasors[j] = std::polar(1.0, -beta);
    }

    Volume grid(origin, voxel_size, dims);  // geometry helper only
    std::vector<std::complex<double>> accum(grid.cell_count(), {0.0, 0.0});

    parallel_for(grid.cell_count(), [&](std::size_t lo, std::size_t hi, unsigned) {
        for (std::size_t flat = lo; flat < hi; ++flat) {
            const auto [ix, iy, iz] = grid.unflatten(flat);
            const Vec3 v = grid.voxel_center(ix, iy, iz);
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t p = 0; p < data.poses.size(); ++p) {
                const SensorPose& pose = data.poses[p];
                const double r_t = distance(pose.tx, v);
                const double r_r = distance(pose.rx, v);
                if (r_t == 0.0 || r_r == 0.0) continue;  // voxel on a sensor element
                const double tau = (r_t + r_r) / cfg.c;
                const double alpha = cfg.angular_freq(tau);
                const double phi = kTwoPi * cfg.f0 * tau;
                const std::complex<double> e_ialpha_conj = std::polar(1.0, -alpha);
                const std::complex<double> numer_conj =
                    1.0 - std::polar(1.0, -alpha * nn);
                const auto meas = data.window_values(p);
                std::complex<double> pose_acc{0.0, 0.0};
                for (std::size_t j = 0; j < width; ++j) {
                    // conj(D_k) = conj(numer) / conj(denom)
                    const std::complex<double> den_conj =
                        1.0 - e_ialpha_conj * std::conj(beta_phasors[j]);
                    std::complex<double> d_conj;
                    if (std::norm(den_conj) < 1e-8) {
                        d_conj = std::conj(dirichlet_kernel(
                            alpha, n, static_cast<std::size_t>(window.k_min) + j));
                    } else {
                        d_conj = numer_conj / den_conj;
                    }
                    pose_acc += meas[j] * d_conj;
                }
                acc += pose_acc * std::polar(1.0 / nn, -phi);
            }
            accum[flat] = acc;
        }
    });
    return accum;
}

Volume backproject(const MeasurementSet& data, const Vec3& origin, double voxel_size,
                   const std::array<std::size_t, 3>& dims, BackprojectionOutput output) {
    const auto accum = backproject_complex(data, origin, voxel_size, dims);
    Volume vol(origin, voxel_size, dims);
    for (std::size_t i = 0; i < accum.size(); ++i) {
        vol.intensities[i] = output == BackprojectionOutput::Magnitude
                                 ? std::abs(accum[i])
                                 : std::max(accum[i].real(), 0.0);
    }
    return vol;
}

Volume backproject(const MeasurementSet& data, const SceneBounds& bounds, std::size_t res,
                   BackprojectionOutput output) {
    const Volume proto = Volume::over(bounds, res);
    return backproject(data, proto.origin, proto.voxel_size, proto.dims, output);
}

}  // namespace spinr
