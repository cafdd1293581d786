#pragma once

#include <utility>
#include <vector>

#include "spinr/geometry.hpp"
#include "spinr/response.hpp"
#include "spinr/signal.hpp"

namespace spinr {

// One transmit/receive pair. tx == rx is a monostatic element.
struct SensorPose {
    Vec3 tx;
    Vec3 rx;
    bool monostatic() const { return tx.x == rx.x && tx.y == rx.y && tx.z == rx.z; }
};

// Cylindrical inverse synthetic aperture: the scene sits on a turntable and
// the sensor rides a vertical actuator, which is equivalent to sensor
// stations on a cylinder around a static scene. MIMO element offsets are
// expressed in each station's local frame: x along the horizontal tangent,
// y vertical, z toward the cylinder axis.
struct CylindricalApertureSpec {
    double radius = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
    std::size_t n_z = 1;
    std::size_t n_theta = 1;
    Vec3 center;
    std::vector<Vec3> tx_offsets{{0.0, 0.0, 0.0}};
    std::vector<Vec3> rx_offsets{{0.0, 0.0, 0.0}};

    void validate() const;
    std::size_t pose_count() const {
        return n_z * n_theta * tx_offsets.size() * rx_offsets.size();
    }
};

// One pose per (z, theta, tx_offset, rx_offset), z-major then theta,
// theta = 2pi j / n_theta starting at +x.
std::vector<SensorPose> generate_poses(const CylindricalApertureSpec& spec);

// 3-Tx / 4-Rx linear layout along the station tangent: receive elements at
// half-wavelength pitch for a 77 GHz carrier (~1.95 mm), transmit elements
// at four times that pitch, giving a filled 12-element virtual array.
std::vector<Vec3> mimo_tx_offsets_77ghz();
std::vector<Vec3> mimo_rx_offsets_77ghz();

// First-order phase accrued by the forward model when the round-trip path to
// reference point x_ref changes from (R_T + R_R) to 2 R_mid: the carrier term
// 2pi f0 dtau plus the Dirichlet ramp (N-1)/2 * dalpha. Constant across bins.
double mono_compensation_phase(const SensorPose& pose, const ChirpConfig& cfg, const Vec3& x_ref);

// Multistatic-to-monostatic conversion: virtual element at the Tx-Rx
// midpoint, response multiplied by the unit phasor e^{-i dpsi}. Monostatic
// input is returned unchanged. Per-bin magnitudes are preserved exactly.
std::pair<SensorPose, SpectralResponse> mono_convert(const SensorPose& pose,
                                                     const SpectralResponse& response,
                                                     const ChirpConfig& cfg, const Vec3& x_ref);

// Smallest bin range covering every round-trip delay from any pose to any
// point of bounds, widened by `guard` bins each side and clamped to [0, N-1].
// The upper delay is evaluated at box corners (exact for a convex path sum);
// the lower delay uses point-to-box distances, a bound that is exact for
// monostatic poses, so in-bounds scatterers never fall below the window.
BinWindow bin_window(const ChirpConfig& cfg, const SceneBounds& bounds,
                     const std::vector<SensorPose>& poses, int guard);

}  // namespace spinr
