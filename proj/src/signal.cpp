#include "spinr/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace spinr {

ChirpConfig::ChirpConfig(double f0_, double slope_, double sample_rate_, std::size_t num_samples_,
                         double c_)
    : f0(f0_), slope(slope_), sample_rate(sample_rate_), num_samples(num_samples_), c(c_) {
    if (!(slope > 0.0)) throw std::invalid_argument("ChirpConfig: slope must be > 0");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("ChirpConfig: sample_rate must be > 0");
    if (num_samples < 2) throw std::invalid_argument("ChirpConfig: num_samples must be >= 2");
    if (!(c > 0.0)) throw std::invalid_argument("ChirpConfig: c must be > 0");
    if (!(f0 >= 0.0)) throw std::invalid_argument("ChirpConfig: f0 must be >= 0");
}

double wrap_phase(double phi) {
    double w = std::remainder(phi, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    return w;
}

ToneParams::ToneParams(double magnitude_, double phase_, double angular_freq_)
    : magnitude(magnitude_), phase(wrap_phase(phase_)), angular_freq(angular_freq_) {
    if (!(magnitude >= 0.0)) throw std::invalid_argument("ToneParams: magnitude must be >= 0");
}

double range_resolution(const ChirpConfig& cfg) { return cfg.c / (2.0 * cfg.bandwidth()); }

double beat_frequency(const ChirpConfig& cfg, double distance) {
    if (distance < 0.0) throw std::invalid_argument("beat_frequency: distance must be >= 0");
    return 2.0 * cfg.slope * distance / cfg.c;
}

double fractional_bin(const ChirpConfig& cfg, double round_trip_delay) {
    if (round_trip_delay < 0.0)
        throw std::invalid_argument("fractional_bin: delay must be >= 0");
    const double n = static_cast<double>(cfg.num_samples);
    const double bin = cfg.slope * round_trip_delay * n / cfg.sample_rate;
    if (bin >= n)
        throw std::domain_error("fractional_bin: scatterer beyond unambiguous range (bin >= N)");
    return bin;
}

std::vector<std::complex<double>> beat_signal(const ChirpConfig& cfg, double delay,
                                              double amplitude) {
    if (delay < 0.0) throw std::invalid_argument("beat_signal: delay must be >= 0");
    const std::complex<double> carrier = std::polar(amplitude, kTwoPi * cfg.f0 * delay);
    const double alpha = cfg.angular_freq(delay);
    std::vector<std::complex<double>> samples(cfg.num_samples);
    for (std::size_t n = 0; n < cfg.num_samples; ++n) {
        samples[n] = carrier * std::polar(1.0, alpha * static_cast<double>(n));
    }
    return samples;
}

std::complex<double> dirichlet_kernel(double alpha, std::size_t n, std::size_t k) {
    const double nn = static_cast<double>(n);
    const double beta = kTwoPi * static_cast<double>(k) / nn;
    const double delta = std::remainder(alpha - beta, kTwoPi);
    if (std::abs(delta) < kOnBinTolerance) {
        if (delta == 0.0) return {nn, 0.0};
        // Removable singularity: series limit of the ratio to second order.
        const double mag = nn * (1.0 - (nn * nn - 1.0) * delta * delta / 24.0);
        return std::polar(mag, delta * (nn - 1.0) / 2.0);
    }
    // (1 - e^{i alpha N})/(1 - e^{i delta}) rewritten as
    // e^{i delta (N-1)/2} sin(N delta/2)/sin(delta/2), which stays accurate
    // arbitrarily close to a bin where the subtraction form cancels.
    const double ratio = std::sin(0.5 * nn * delta) / std::sin(0.5 * delta);
    const double phase = delta * (nn - 1.0) / 2.0;
    return ratio * std::complex<double>(std::cos(phase), std::sin(phase));
}

std::complex<double> tone_dft(const ToneParams& tone, std::size_t n, std::size_t k) {
    if (k >= n) throw std::invalid_argument("tone_dft: bin index out of range");
    const std::complex<double> scale =
        std::polar(tone.magnitude / static_cast<double>(n), tone.phase);
    return scale * dirichlet_kernel(tone.angular_freq, n, k);
}

std::vector<double> dirichlet_envelope(double alpha, std::size_t n) {
    if (n < 2) throw std::invalid_argument("dirichlet_envelope: need N >= 2");
    std::vector<double> mags(n);
    for (std::size_t k = 0; k < n; ++k) {
        mags[k] = std::abs(tone_dft(ToneParams(1.0, 0.0, alpha), n, k));
    }
    return mags;
}

}  // namespace spinr
