#include "spinr/aperture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spinr {

void CylindricalApertureSpec::validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("aperture: radius must be > 0");
    if (!(z_max >= z_min)) throw std::invalid_argument("aperture: z_max must be >= z_min");
    if (n_z < 1 || n_theta < 1) throw std::invalid_argument("aperture: n_z and n_theta must be >= 1");
    if (tx_offsets.empty() || rx_offsets.empty())
        throw std::invalid_argument("aperture: offset lists must be non-empty");
    for (const auto& o : tx_offsets)
        if (!finite(o)) throw std::invalid_argument("aperture: non-finite tx offset");
    for (const auto& o : rx_offsets)
        if (!finite(o)) throw std::invalid_argument("aperture: non-finite rx offset");
}

std::vector<SensorPose> generate_poses(const CylindricalApertureSpec& spec) {
    spec.validate();
    std::vector<SensorPose> poses;
    poses.reserve(spec.pose_count());
    for (std::size_t iz = 0; iz < spec.n_z; ++iz) {
        const double z =
            spec.n_z == 1
                ? spec.z_min
                : spec.z_min + (spec.z_max - spec.z_min) * static_cast<double>(iz) /
                                   static_cast<double>(spec.n_z - 1);
        for (std::size_t it = 0; it < spec.n_theta; ++it) {
            const double theta = kTwoPi * static_cast<double>(it) / static_cast<double>(spec.n_theta);
            const double ct = std::cos(theta);
            const double st = std::sin(theta);
            const Vec3 station = spec.center + Vec3{spec.radius * ct, spec.radius * st, z};
            const Vec3 tangent{-st, ct, 0.0};
            const Vec3 vertical{0.0, 0.0, 1.0};
            const Vec3 inward{-ct, -st, 0.0};  // toward the cylinder axis
            auto place = [&](const Vec3& off) {
                return station + off.x * tangent + off.y * vertical + off.z * inward;
            };
            for (const auto& to : spec.tx_offsets) {
                const Vec3 tx = place(to);
                for (const auto& ro : spec.rx_offsets) {
                    poses.push_back(SensorPose{tx, place(ro)});
                }
            }
        }
    }
    return poses;
}

std::vector<Vec3> mimo_tx_offsets_77ghz() {
    const double lambda = kSpeedOfLight / 77e9;
    return {{-2.0 * lambda, 0.0, 0.0}, {0.0, 0.0, 0.0}, {2.0 * lambda, 0.0, 0.0}};
}

std::vector<Vec3> mimo_rx_offsets_77ghz() {
    const double half = 0.5 * kSpeedOfLight / 77e9;
    return {{-1.5 * half, 0.0, 0.0}, {-0.5 * half, 0.0, 0.0}, {0.5 * half, 0.0, 0.0},
            {1.5 * half, 0.0, 0.0}};
}

double mono_compensation_phase(const SensorPose& pose, const ChirpConfig& cfg, const Vec3& x_ref) {
    const Vec3 mid = 0.5 * (pose.tx + pose.rx);
    const double path_multi = distance(pose.tx, x_ref) + distance(pose.rx, x_ref);
    const double path_mono = 2.0 * distance(mid, x_ref);
    const double dtau = (path_multi - path_mono) / cfg.c;
    const double dalpha = cfg.angular_freq(dtau);
    return kTwoPi * cfg.f0 * dtau + dalpha * (static_cast<double>(cfg.num_samples) - 1.0) / 2.0;
}

std::pair<SensorPose, SpectralResponse> mono_convert(const SensorPose& pose,
                                                     const SpectralResponse& response,
                                                     const ChirpConfig& cfg, const Vec3& x_ref) {
    if (pose.monostatic()) return {pose, response};
    const Vec3 mid = 0.5 * (pose.tx + pose.rx);
    const std::complex<double> phasor = std::polar(1.0, -mono_compensation_phase(pose, cfg, x_ref));
    SpectralResponse converted = response;
    for (auto& v : converted.values) v *= phasor;
    return {SensorPose{mid, mid}, std::move(converted)};
}

BinWindow bin_window(const ChirpConfig& cfg, const SceneBounds& bounds,
                     const std::vector<SensorPose>& poses, int guard) {
    if (poses.empty()) throw std::invalid_argument("bin_window: need at least one pose");
    if (guard < 0) throw std::invalid_argument("bin_window: guard must be >= 0");
    const auto corners = bounds.corners();
    double path_min = std::numeric_limits<double>::infinity();
    double path_max = 0.0;
    for (const auto& pose : poses) {
        path_min = std::min(path_min,
                            distance_to_bounds(pose.tx, bounds) + distance_to_bounds(pose.rx, bounds));
        for (const auto& corner : corners) {
            path_max = std::max(path_max, distance(pose.tx, corner) + distance(pose.rx, corner));
        }
    }
    const double bin_lo = fractional_bin(cfg, path_min / cfg.c);
    const double bin_hi = fractional_bin(cfg, path_max / cfg.c);  // throws when >= N
    const int n_max = static_cast<int>(cfg.num_samples) - 1;
    const int k_min = std::max(0, static_cast<int>(std::floor(bin_lo)) - guard);
    const int k_max = std::min(n_max, static_cast<int>(std::ceil(bin_hi)) + guard);
    return BinWindow(k_min, k_max, guard);
}

}  // namespace spinr
