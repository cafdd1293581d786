#include "spinr/forward.hpp"

#include <cmath>
#include <stdexcept>

namespace spinr {

namespace {

// Per-window table of conj(e^{i beta_k}), shared across scatterers of one call.
std::vector<std::complex<double>> window_phasors(const BinWindow& window, std::size_t n) {
    std::vector<std::complex<double>> t(window.width());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double beta = kTwoPi * static_cast<double>(window.k_min + static_cast<int>(i)) /
                            static_cast<double>(n);
        t[i] = std::polar(1.0, -beta);
    }
    return t;
}

// |1 - e^{i alpha} conj_beta|^2 below this means alpha sits within ~1e-4 rad
// of the bin, where the subtraction has lost enough digits that the kernel is
// recomputed through the sin-ratio form.
constexpr double kDenormThreshold = 1e-8;

struct PointTerm {
    std::complex<double> coeff;     // w sigma / (N r_t r_r) e^{i phi}
    std::complex<double> e_ialpha;  // e^{i alpha}
    std::complex<double> numer;     // 1 - e^{i alpha N}
    double alpha;
};

PointTerm make_term(const ChirpConfig& cfg, const PathGeometry& g, double amplitude) {
    PointTerm t;
    t.alpha = cfg.angular_freq(g.tau);
    const double phi = kTwoPi * cfg.f0 * g.tau;
    t.coeff = std::polar(amplitude, phi);
    t.e_ialpha = std::polar(1.0, t.alpha);
    t.numer = 1.0 - std::polar(1.0, t.alpha * static_cast<double>(cfg.num_samples));
    return t;
}

}  // namespace

PathGeometry path_geometry(const SensorPose& pose, const Vec3& point, double c) {
    PathGeometry g;
    g.r_t = distance(pose.tx, point);
    g.r_r = distance(pose.rx, point);
    if (g.r_t == 0.0 || g.r_r == 0.0)
        throw std::domain_error("forward: scatterer coincides with a sensor element");
    g.tau = (g.r_t + g.r_r) / c;
    return g;
}

ForwardCounters& forward_counters() {
    static ForwardCounters counters;
    return counters;
}

void reset_forward_counters() {
    forward_counters().spectral_kernel_evals.store(0);
    forward_counters().time_sample_evals.store(0);
    forward_counters().rq_scatterer_adds.store(0);
}

SpectralResponse spectral_forward(const ChirpConfig& cfg, const SensorPose& pose,
                                  std::span<const QuadraturePoint> points,
                                  std::span<const double> sigmas, const BinWindow& window) {
    if (points.size() != sigmas.size())
        throw std::invalid_argument("spectral_forward: points/sigmas length mismatch");
    if (window.k_max >= static_cast<int>(cfg.num_samples))
        throw std::invalid_argument("spectral_forward: window exceeds DFT length");
    const std::size_t n = cfg.num_samples;
    const double nn = static_cast<double>(n);
    SpectralResponse out = SpectralResponse::zeros(window, n);
    const auto table = window_phasors(window, n);
    forward_counters().spectral_kernel_evals += window.width() * points.size();

    for (std::size_t i = 0; i < points.size(); ++i) {
        const PathGeometry g = path_geometry(pose, points[i].position, cfg.c);
        const PointTerm t =
            make_term(cfg, g, points[i].weight * sigmas[i] / (nn * g.r_t * g.r_r));
        for (std::size_t j = 0; j < table.size(); ++j) {
            const std::complex<double> den = 1.0 - t.e_ialpha * table[j];
            if (std::norm(den) < kDenormThreshold) {
                out.values[j] += t.coeff * dirichlet_kernel(
                                               t.alpha, n,
                                               static_cast<std::size_t>(window.k_min) + j);
            } else {
                out.values[j] += t.coeff * t.numer / den;
            }
        }
    }
    return out;
}

std::vector<double> spectral_backward(const ChirpConfig& cfg, const SensorPose& pose,
                                      std::span<const QuadraturePoint> points,
                                      const BinWindow& window,
                                      std::span<const std::complex<double>> upstream) {
    if (upstream.size() != window.width())
        throw std::invalid_argument("spectral_backward: upstream length != window width");
    const std::size_t n = cfg.num_samples;
    const double nn = static_cast<double>(n);
    const auto table = window_phasors(window, n);
    std::vector<double> grads(points.size());

    for (std::size_t i = 0; i < points.size(); ++i) {
        const PathGeometry g = path_geometry(pose, points[i].position, cfg.c);
        // Kernel per sigma, without the sigma factor itself.
        const PointTerm t = make_term(cfg, g, points[i].weight / (nn * g.r_t * g.r_r));
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < table.size(); ++j) {
            const std::complex<double> den = 1.0 - t.e_ialpha * table[j];
            std::complex<double> d;
            if (std::norm(den) < kDenormThreshold) {
                d = dirichlet_kernel(t.alpha, n, static_cast<std::size_t>(window.k_min) + j);
            } else {
                d = t.numer / den;
            }
            acc += std::conj(d) * upstream[j];
        }
        grads[i] = (std::conj(t.coeff) * acc).real();
    }
    return grads;
}

std::vector<std::complex<double>> time_forward(const ChirpConfig& cfg, const SensorPose& pose,
                                               std::span<const QuadraturePoint> points,
                                               std::span<const double> sigmas) {
    if (points.size() != sigmas.size())
        throw std::invalid_argument("time_forward: points/sigmas length mismatch");
    const std::size_t n = cfg.num_samples;
    std::vector<std::complex<double>> samples(n, {0.0, 0.0});
    forward_counters().time_sample_evals += n * points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const PathGeometry g = path_geometry(pose, points[i].position, cfg.c);
        const double alpha = cfg.angular_freq(g.tau);
        const double phi = kTwoPi * cfg.f0 * g.tau;
        std::complex<double> cur =
            std::polar(points[i].weight * sigmas[i] / (g.r_t * g.r_r), phi);
        const std::complex<double> rot = std::polar(1.0, alpha);
        for (std::size_t s = 0; s < n; ++s) {
            samples[s] += cur;
            cur *= rot;
        }
    }
    return samples;
}

std::vector<double> time_backward(const ChirpConfig& cfg, const SensorPose& pose,
                                  std::span<const QuadraturePoint> points,
                                  std::span<const std::complex<double>> upstream) {
    const std::size_t n = cfg.num_samples;
    if (upstream.size() != n)
        throw std::invalid_argument("time_backward: upstream length != num_samples");
    std::vector<double> grads(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const PathGeometry g = path_geometry(pose, points[i].position, cfg.c);
        const double alpha = cfg.angular_freq(g.tau);
        const double phi = kTwoPi * cfg.f0 * g.tau;
        const std::complex<double> base =
            std::polar(points[i].weight / (g.r_t * g.r_r), phi);
        const std::complex<double> rot = std::polar(1.0, -alpha);
        std::complex<double> cur{1.0, 0.0};
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t s = 0; s < n; ++s) {
            acc += upstream[s] * cur;
            cur *= rot;
        }
        grads[i] = (std::conj(base) * acc).real();
    }
    return grads;
}

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place radix-2, e^{-i 2pi kn/N} convention, no normalization.
void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -kTwoPi / static_cast<double>(len);
        const std::complex<double> wlen = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace

std::vector<std::complex<double>> dft(std::span<const std::complex<double>> samples) {
    const std::size_t n = samples.size();
    if (n == 0) return {};
    std::vector<std::complex<double>> out(samples.begin(), samples.end());
    if (is_pow2(n)) {
        fft_pow2(out);
    } else {
        std::vector<std::complex<double>> bins(n, {0.0, 0.0});
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t s = 0; s < n; ++s) {
                const double ang = -kTwoPi * static_cast<double>(k) * static_cast<double>(s) /
                                   static_cast<double>(n);
                bins[k] += samples[s] * std::polar(1.0, ang);
            }
        }
        out = std::move(bins);
    }
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<std::complex<double>> idft(std::span<const std::complex<double>> bins) {
    // x_n = sum_k X_k e^{i beta_k n} = conj(N * dft(conj(X)))_n
    std::vector<std::complex<double>> tmp(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) tmp[i] = std::conj(bins[i]);
    auto f = dft(tmp);
    const double n = static_cast<double>(bins.size());
    for (auto& v : f) v = std::conj(v) * n;
    return f;
}

SpectralResponse truncate(std::span<const std::complex<double>> bins, const BinWindow& window) {
    if (window.k_max >= static_cast<int>(bins.size()))
        throw std::invalid_argument("truncate: window exceeds bin count");
    SpectralResponse out = SpectralResponse::zeros(window, bins.size());
    for (std::size_t j = 0; j < window.width(); ++j) {
        out.values[j] = bins[static_cast<std::size_t>(window.k_min) + j];
    }
    return out;
}

SpectralResponse rq_forward(const ChirpConfig& cfg, const SensorPose& pose,
                            std::span<const QuadraturePoint> points,
                            std::span<const double> sigmas, const BinWindow& window,
                            std::size_t* dropped) {
    if (points.size() != sigmas.size())
        throw std::invalid_argument("rq_forward: points/sigmas length mismatch");
    const double nn = static_cast<double>(cfg.num_samples);
    SpectralResponse out = SpectralResponse::zeros(window, cfg.num_samples);
    forward_counters().rq_scatterer_adds += points.size();
    std::size_t drop_count = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const PathGeometry g = path_geometry(pose, points[i].position, cfg.c);
        const double frac = cfg.slope * g.tau * nn / cfg.sample_rate;
        // Half-bin ties round up, toward the farther bin.
        const int bin = static_cast<int>(std::floor(frac + 0.5));
        if (!window.contains(bin)) {
            ++drop_count;
            continue;
        }
        const double phi = kTwoPi * cfg.f0 * g.tau;
        out.values[static_cast<std::size_t>(bin - window.k_min)] +=
            std::polar(points[i].weight * sigmas[i] / (g.r_t * g.r_r), phi);
    }
    if (dropped) *dropped = drop_count;
    return out;
}

std::vector<double> rq_backward(const ChirpConfig& cfg, const SensorPose& pose,
                                std::span<const QuadraturePoint> points, const BinWindow& window,
                                std::span<const std::complex<double>> upstream) {
    if (upstream.size() != window.width())
        throw std::invalid_argument("rq_backward: upstream length != window width");
    const double nn = static_cast<double>(cfg.num_samples);
    std::vector<double> grads(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const PathGeometry g = path_geometry(pose, points[i].position, cfg.c);
        const double frac = cfg.slope * g.tau * nn / cfg.sample_rate;
        const int bin = static_cast<int>(std::floor(frac + 0.5));
        if (!window.contains(bin)) continue;  // dropped scatterers carry no gradient
        const double phi = kTwoPi * cfg.f0 * g.tau;
        const std::complex<double> base = std::polar(points[i].weight / (g.r_t * g.r_r), phi);
        grads[i] =
            (std::conj(base) * upstream[static_cast<std::size_t>(bin - window.k_min)]).real();
    }
    return grads;
}

}  // namespace spinr
