#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace spinr {

// Contiguous range of DFT bins covering the round-trip delays realizable
// from the scene, plus guard bins absorbing Dirichlet side-lobes.
struct BinWindow {
    int k_min = 0;
    int k_max = 0;
    int guard = 0;

    BinWindow() = default;
    BinWindow(int k_min_, int k_max_, int guard_ = 0) : k_min(k_min_), k_max(k_max_), guard(guard_) {
        if (k_min < 0 || k_max < k_min)
            throw std::invalid_argument("BinWindow: need 0 <= k_min <= k_max");
    }

    std::size_t width() const { return static_cast<std::size_t>(k_max - k_min + 1); }
    bool contains(int k) const { return k >= k_min && k <= k_max; }
};

// Complex values at selected DFT bins for one pose; the unit of supervision.
struct SpectralResponse {
    std::vector<int> bins;                      // strictly increasing, all in [0, N)
    std::vector<std::complex<double>> values;   // same length as bins
    std::size_t n_fft = 0;                      // DFT length N the bins refer to

    SpectralResponse() = default;
    SpectralResponse(std::vector<int> bins_, std::vector<std::complex<double>> values_,
                     std::size_t n_fft_)
        : bins(std::move(bins_)), values(std::move(values_)), n_fft(n_fft_) {
        validate();
    }

    static SpectralResponse zeros(const BinWindow& window, std::size_t n_fft_) {
        std::vector<int> b(window.width());
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = window.k_min + static_cast<int>(i);
        return SpectralResponse(std::move(b), std::vector<std::complex<double>>(window.width()),
                                n_fft_);
    }

    void validate() const {
        if (bins.size() != values.size())
            throw std::invalid_argument("SpectralResponse: bins/values length mismatch");
        for (std::size_t i = 0; i < bins.size(); ++i) {
            if (bins[i] < 0 || static_cast<std::size_t>(bins[i]) >= n_fft)
                throw std::invalid_argument("SpectralResponse: bin out of [0, N)");
            if (i > 0 && bins[i] <= bins[i - 1])
                throw std::invalid_argument("SpectralResponse: bins must be strictly increasing");
            if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
                throw std::invalid_argument("SpectralResponse: non-finite value");
        }
    }
};

}  // namespace spinr
