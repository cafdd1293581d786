#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "spinr/aperture.hpp"
#include "spinr/geometry.hpp"
#include "spinr/response.hpp"
#include "spinr/signal.hpp"

namespace spinr {

// Poses plus complex frequency-domain responses restricted to a bin window;
// both simulator output and reconstruction input. The optional full-spectrum
// block (all N bins per pose) exists so time-domain supervision can
// regenerate measurement-side time signals.
struct MeasurementSet {
    ChirpConfig chirp;
    BinWindow window;
    SceneBounds bounds;
    std::vector<SensorPose> poses;
    // poses.size() * window.width(), row-major per pose
    std::vector<std::complex<double>> values;
    // empty, or poses.size() * chirp.num_samples
    std::vector<std::complex<double>> full_spectrum;
    bool mono_converted = false;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    std::size_t pose_count() const { return poses.size(); }
    bool has_full_spectrum() const { return !full_spectrum.empty(); }

    std::span<const std::complex<double>> window_values(std::size_t pose_index) const {
        return {values.data() + pose_index * window.width(), window.width()};
    }
    std::span<const std::complex<double>> spectrum(std::size_t pose_index) const {
        return {full_spectrum.data() + pose_index * chirp.num_samples, chirp.num_samples};
    }
    SpectralResponse response(std::size_t pose_index) const {
        auto v = window_values(pose_index);
        SpectralResponse r = SpectralResponse::zeros(window, chirp.num_samples);
        std::copy(v.begin(), v.end(), r.values.begin());
        return r;
    }

    void validate() const {
        if (values.size() != poses.size() * window.width())
            throw std::invalid_argument("MeasurementSet: value payload length mismatch");
        if (!full_spectrum.empty() && full_spectrum.size() != poses.size() * chirp.num_samples)
            throw std::invalid_argument("MeasurementSet: full-spectrum payload length mismatch");
        if (window.k_max >= static_cast<int>(chirp.num_samples))
            throw std::invalid_argument("MeasurementSet: window exceeds DFT length");
    }
};

// Binary dataset file errors; each failure mode is distinguishable.
class FormatError : public std::runtime_error {
  public:
    enum class Kind { BadMagic, BadVersion, Truncated, BadHeader, IoFailure };
    FormatError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

// Little-endian container: magic "SPNR", u32 version, u64 JSON-header
// length, UTF-8 JSON header, poses as 6 x f64, then window values as
// 2 x f32 per bin per pose (2 x f64 when f64_payload is set), then the
// optional full-spectrum block in the same precision.
void write_dataset(const std::filesystem::path& path, const MeasurementSet& set,
                   bool f64_payload = false);
MeasurementSet read_dataset(const std::filesystem::path& path);

}  // namespace spinr
