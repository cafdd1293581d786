#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "spinr/geometry.hpp"

namespace spinr {

// FMCW waveform math. A transmitted chirp mixed with its echo yields a beat
// signal b(t) = e^{j2pi f0 tau} * e^{j2pi (S tau) t}; the residual video
// phase term (-0.5 S tau^2) is dropped as negligible. Sampled at fs over N
// samples, a scatterer at round-trip delay tau is a pure tone of angular
// frequency alpha = 2pi S tau / fs rad/sample whose 1/N-scaled DFT has the
// closed form implemented by tone_dft below. All DFTs in this library use
// the 1/N forward convention so closed-form and brute-force values agree.

struct ChirpConfig {
    double f0 = 0.0;           // chirp start frequency, Hz (0 in the training pipeline)
    double slope = 0.0;        // chirp slope S, Hz/s
    double sample_rate = 0.0;  // ADC rate fs, Hz
    std::size_t num_samples = 0;  // N samples per chirp
    double c = kSpeedOfLight;  // propagation speed, m/s

    ChirpConfig() = default;
    ChirpConfig(double f0_, double slope_, double sample_rate_, std::size_t num_samples_,
                double c_ = kSpeedOfLight);

    double bandwidth() const { return slope * static_cast<double>(num_samples) / sample_rate; }
    double duration() const { return static_cast<double>(num_samples) / sample_rate; }
    // Angular frequency (rad/sample) of the beat tone for round-trip delay tau.
    double angular_freq(double round_trip_delay) const {
        return kTwoPi * slope * round_trip_delay / sample_rate;
    }
};

// A sampled complex exponential s_n = M e^{i(alpha n + phi)}.
struct ToneParams {
    double magnitude = 0.0;     // M >= 0
    double phase = 0.0;         // phi, wrapped to (-pi, pi] at construction
    double angular_freq = 0.0;  // alpha, rad/sample

    ToneParams() = default;
    ToneParams(double magnitude_, double phase_, double angular_freq_);
};

// Wrap an angle to (-pi, pi].
double wrap_phase(double phi);

// Range resolution c / (2B), B = S N / fs. Independent of f0 and chirp
// duration at fixed bandwidth.
double range_resolution(const ChirpConfig& cfg);

// Beat frequency 2 S d / c of a scatterer at one-way distance d.
double beat_frequency(const ChirpConfig& cfg, double distance);

// Fractional DFT bin S tau N / fs at which a scatterer with round-trip delay
// tau concentrates energy. Throws std::domain_error when the result reaches
// bin N (beyond the unambiguous range of the sampled chirp).
double fractional_bin(const ChirpConfig& cfg, double round_trip_delay);

// N samples of the beat signal for one scatterer:
//   sample n = amplitude * e^{i 2pi f0 tau} * e^{i 2pi S tau n / fs}.
std::vector<std::complex<double>> beat_signal(const ChirpConfig& cfg, double delay,
                                              double amplitude);

// Deviation |alpha - beta_k| (mod 2pi) below which the Dirichlet ratio is
// evaluated by its series limit; the direct form loses too many digits to
// cancellation in 1 - e^{i delta} beyond this point.
inline constexpr double kOnBinTolerance = 1e-9;

// The on-bin-safe Dirichlet ratio D_k(alpha) = (1 - e^{i alpha N}) / (1 - e^{i(alpha - beta_k)})
// with beta_k = 2pi k / N. Equals N when alpha sits exactly on bin k.
std::complex<double> dirichlet_kernel(double alpha, std::size_t n, std::size_t k);

// Closed-form 1/N-scaled DFT of the tone at bin k:
//   Z_k = (M/N) e^{i phi} (1 - e^{i alpha N}) / (1 - e^{i(alpha - beta_k)}).
std::complex<double> tone_dft(const ToneParams& tone, std::size_t n, std::size_t k);

// |tone_dft| at every bin for M = 1, phi = 0: the leakage envelope
// |sin(N(alpha-beta_k)/2) / sin((alpha-beta_k)/2)| / N.
std::vector<double> dirichlet_envelope(double alpha, std::size_t n);

}  // namespace spinr
