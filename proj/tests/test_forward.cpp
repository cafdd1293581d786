#include "spinr/forward.hpp"

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "spinr/rng.hpp"

using namespace spinr;

namespace {

struct Scene {
    std::vector<QuadraturePoint> points;
    std::vector<double> sigmas;
};

Scene random_scene(std::size_t count, Rng& rng, const SceneBounds& bounds) {
    Scene s;
    for (std::size_t i = 0; i < count; ++i) {
        s.points.push_back({{rng.uniform(bounds.min_corner.x, bounds.max_corner.x),
                             rng.uniform(bounds.min_corner.y, bounds.max_corner.y),
                             rng.uniform(bounds.min_corner.z, bounds.max_corner.z)},
                            rng.uniform(0.5, 1.5)});
        s.sigmas.push_back(rng.next_double());
    }
    return s;
}

// Scale-relative cross-model error: |spectral - dft(time)| per bin, relative
// to the window peak of the oracle route.
double cross_model_error(const ChirpConfig& cfg, const SensorPose& pose, const Scene& scene,
                         const BinWindow& window) {
    const auto spectral = spectral_forward(cfg, pose, scene.points, scene.sigmas, window);
    const auto oracle = truncate(dft(time_forward(cfg, pose, scene.points, scene.sigmas)), window);
    double scale = 0.0;
    for (const auto& v : oracle.values) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    for (std::size_t j = 0; j < window.width(); ++j) {
        worst = std::max(worst, std::abs(spectral.values[j] - oracle.values[j]));
    }
    return worst / scale;
}

// Monostatic pose/scatterer pair whose beat tone lands exactly on `bin`.
struct OnBinSetup {
    SensorPose pose;
    Vec3 scatterer;
    double dist;
};

OnBinSetup on_bin_setup(const ChirpConfig& cfg, int bin) {
    const double tau = static_cast<double>(bin) * cfg.sample_rate /
                       (cfg.slope * static_cast<double>(cfg.num_samples));
    const double d = cfg.c * tau / 2.0;
    return {{{d, 0.0, 0.0}, {d, 0.0, 0.0}}, {0.0, 0.0, 0.0}, d};
}

}  // namespace

TEST_SUITE("forward") {

TEST_CASE("empty scene maps to zero everywhere") {
    const auto cfg = fixtures::desk_chirp();
    const SensorPose pose{{0.3, 0.0, 0.0}, {0.3, 0.0, 0.0}};
    Rng rng(1);
    auto scene = random_scene(20, rng, fixtures::desk_bounds());
    std::fill(scene.sigmas.begin(), scene.sigmas.end(), 0.0);
    const BinWindow window(0, 15);
    for (const auto& v : spectral_forward(cfg, pose, scene.points, scene.sigmas, window).values)
        CHECK(std::abs(v) == 0.0);
    for (const auto& v : time_forward(cfg, pose, scene.points, scene.sigmas))
        CHECK(std::abs(v) == 0.0);
    for (const auto& v : rq_forward(cfg, pose, scene.points, scene.sigmas, window).values)
        CHECK(std::abs(v) == 0.0);
}

TEST_CASE("single on-bin scatterer concentrates exactly") {
    const auto cfg = fixtures::chirp_4ghz();
    const auto setup = on_bin_setup(cfg, 6);
    const QuadraturePoint pt{setup.scatterer, 1.0};
    const double sigma = 1.0;
    const BinWindow window(0, 15);
    const auto resp = spectral_forward(cfg, setup.pose, std::span<const QuadraturePoint>(&pt, 1),
                                       std::span<const double>(&sigma, 1), window);
    const double expected = 1.0 / (setup.dist * setup.dist);
    CHECK(std::abs(resp.values[6]) == doctest::Approx(expected).epsilon(1e-12));
    for (std::size_t j = 0; j < window.width(); ++j) {
        if (j != 6) CHECK(std::abs(resp.values[j]) < 1e-12);
    }
    // Cross-check against the time-domain + DFT route.
    const auto oracle =
        truncate(dft(time_forward(cfg, setup.pose, std::span<const QuadraturePoint>(&pt, 1),
                                  std::span<const double>(&sigma, 1))),
                 window);
    for (std::size_t j = 0; j < window.width(); ++j) {
        CHECK(std::abs(resp.values[j] - oracle.values[j]) <= 1e-10);
    }
}

TEST_CASE("cross-model equivalence on random scenes") {
    const auto cfg = fixtures::desk_chirp();
    const auto bounds = fixtures::desk_bounds();
    const BinWindow window(0, 15);
    Rng rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const double theta = rng.uniform(0.0, kTwoPi);
        const SensorPose pose{{0.23 * std::cos(theta), 0.23 * std::sin(theta), 0.02},
                              {0.23 * std::cos(theta), 0.23 * std::sin(theta), 0.02}};
        const auto scene = random_scene(100, rng, bounds);
        CHECK(cross_model_error(cfg, pose, scene, window) <= 1e-9);
    }
}

TEST_CASE("cross-model equivalence with a carrier") {
    const auto cfg = fixtures::desk_chirp_carrier();
    Rng rng(43);
    const SensorPose pose{{0.23, 0.0, 0.0}, {0.25, 0.01, 0.0}};
    const auto scene = random_scene(60, rng, fixtures::desk_bounds());
    CHECK(cross_model_error(cfg, pose, scene, BinWindow(0, 15)) <= 1e-9);
}

TEST_CASE("linearity in sigma") {
    const auto cfg = fixtures::desk_chirp();
    const SensorPose pose{{0.3, 0.0, 0.0}, {0.3, 0.0, 0.0}};
    const BinWindow window(0, 15);
    Rng rng(7);
    const auto scene = random_scene(30, rng, fixtures::desk_bounds());
    std::vector<double> s1(30), s2(30), mix(30);
    const double a = 1.3, b = -0.4;
    for (std::size_t i = 0; i < 30; ++i) {
        s1[i] = rng.next_double();
        s2[i] = rng.next_double();
        mix[i] = a * s1[i] + b * s2[i];
    }
    const auto z1 = spectral_forward(cfg, pose, scene.points, s1, window);
    const auto z2 = spectral_forward(cfg, pose, scene.points, s2, window);
    const auto zm = spectral_forward(cfg, pose, scene.points, mix, window);
    for (std::size_t j = 0; j < window.width(); ++j) {
        CHECK(std::abs(zm.values[j] - (a * z1.values[j] + b * z2.values[j])) <=
              1e-12 * std::abs(zm.values[j]) + 1e-15);
    }
    const auto t1 = time_forward(cfg, pose, scene.points, s1);
    const auto t2 = time_forward(cfg, pose, scene.points, s2);
    const auto tm = time_forward(cfg, pose, scene.points, mix);
    for (std::size_t n = 0; n < tm.size(); ++n) {
        CHECK(std::abs(tm[n] - (a * t1[n] + b * t2[n])) <= 1e-12 * std::abs(tm[n]) + 1e-13);
    }
    const auto r1 = rq_forward(cfg, pose, scene.points, s1, window);
    const auto r2 = rq_forward(cfg, pose, scene.points, s2, window);
    const auto rm = rq_forward(cfg, pose, scene.points, mix, window);
    for (std::size_t j = 0; j < window.width(); ++j) {
        CHECK(std::abs(rm.values[j] - (a * r1.values[j] + b * r2.values[j])) <=
              1e-12 * std::abs(rm.values[j]) + 1e-15);
    }
}

TEST_CASE("single scatterer reproduces the beat signal") {
    const auto cfg = fixtures::desk_chirp_carrier();
    const SensorPose pose{{0.26, 0.0, 0.0}, {0.3, 0.0, 0.0}};
    const QuadraturePoint pt{{0.0, 0.05, 0.0}, 0.8};
    const double sigma = 0.6;
    const auto g = path_geometry(pose, pt.position, cfg.c);
    const auto samples = time_forward(cfg, pose, std::span<const QuadraturePoint>(&pt, 1),
                                      std::span<const double>(&sigma, 1));
    const auto beat = beat_signal(cfg, g.tau, pt.weight * sigma / (g.r_t * g.r_r));
    for (std::size_t n = 0; n < samples.size(); ++n) {
        CHECK(std::abs(samples[n] - beat[n]) <= 1e-12 * std::abs(beat[n]) + 1e-15);
    }
}

TEST_CASE("translation by one range resolution shifts the peak bin by one") {
    const auto cfg = fixtures::desk_chirp();
    const double dres = range_resolution(cfg);
    const SensorPose pose{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    const BinWindow window(0, 31);
    auto peak_at = [&](double dist) {
        const QuadraturePoint pt{{dist, 0.0, 0.0}, 1.0};
        const double sigma = 1.0;
        const auto resp = spectral_forward(cfg, pose, std::span<const QuadraturePoint>(&pt, 1),
                                           std::span<const double>(&sigma, 1), window);
        std::size_t best = 0;
        for (std::size_t j = 1; j < resp.values.size(); ++j) {
            if (std::abs(resp.values[j]) > std::abs(resp.values[best])) best = j;
        }
        return best;
    };
    auto time_peak_at = [&](double dist) {
        const QuadraturePoint pt{{dist, 0.0, 0.0}, 1.0};
        const double sigma = 1.0;
        const auto bins = dft(time_forward(cfg, pose, std::span<const QuadraturePoint>(&pt, 1),
                                           std::span<const double>(&sigma, 1)));
        std::size_t best = 0;
        for (std::size_t j = 1; j < 32; ++j) {
            if (std::abs(bins[j]) > std::abs(bins[best])) best = j;
        }
        return best;
    };
    const double d0 = 0.3;
    for (int step = 0; step < 3; ++step) {
        const double d = d0 + dres * step;
        CHECK(peak_at(d + dres) == peak_at(d) + 1);
        CHECK(time_peak_at(d + dres) == time_peak_at(d) + 1);
    }
}

TEST_CASE("dft routes and inverse") {
    Rng rng(12);
    SUBCASE("constant sequence concentrates at bin zero") {
        std::vector<std::complex<double>> c(64, {0.7, -0.3});
        const auto bins = dft(c);
        CHECK(std::abs(bins[0] - std::complex<double>(0.7, -0.3)) <= 1e-14);
        for (std::size_t k = 1; k < bins.size(); ++k) CHECK(std::abs(bins[k]) <= 1e-14);
    }
    SUBCASE("radix-2 path matches the naive summation") {
        std::vector<std::complex<double>> x(256);
        for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const auto fast = dft(x);
        const auto naive = oracles::brute_dft(x);
        for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(fast[k] - naive[k]) <= 1e-12);
    }
    SUBCASE("non-power-of-two lengths work") {
        std::vector<std::complex<double>> x(60);
        for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const auto a = dft(x);
        const auto b = oracles::brute_dft(x);
        for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12);
    }
    SUBCASE("dft then idft is the identity") {
        for (std::size_t n : {16u, 81u}) {
            std::vector<std::complex<double>> x(n);
            for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            const auto back = idft(dft(x));
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(back[i] - x[i]) <= 1e-12);
        }
    }
}

TEST_CASE("range quantization") {
    const auto cfg = fixtures::chirp_4ghz();
    const BinWindow window(0, 15);
    SUBCASE("on-bin scatterer matches the spectral model at its bin") {
        const auto setup = on_bin_setup(cfg, 6);
        const QuadraturePoint pt{setup.scatterer, 1.0};
        const double sigma = 1.0;
        const auto rq = rq_forward(cfg, setup.pose, std::span<const QuadraturePoint>(&pt, 1),
                                   std::span<const double>(&sigma, 1), window);
        const auto sp = spectral_forward(cfg, setup.pose, std::span<const QuadraturePoint>(&pt, 1),
                                         std::span<const double>(&sigma, 1), window);
        CHECK(std::abs(rq.values[6] - sp.values[6]) <= 1e-12 * std::abs(sp.values[6]));
        for (std::size_t j = 0; j < window.width(); ++j) {
            if (j != 6) CHECK(std::abs(rq.values[j]) == 0.0);
        }
    }
    SUBCASE("half-bin scatterer: one quantized bin vs a leakage spread") {
        // Round-trip delay at fractional bin 6.5; the tie rounds up to bin 7.
        const double tau = 6.5 * cfg.sample_rate / (cfg.slope * 256.0);
        const double d = cfg.c * tau / 2.0;
        const SensorPose pose{{d, 0.0, 0.0}, {d, 0.0, 0.0}};
        const QuadraturePoint pt{{0.0, 0.0, 0.0}, 1.0};
        const double sigma = 1.0;
        const auto rq = rq_forward(cfg, pose, std::span<const QuadraturePoint>(&pt, 1),
                                   std::span<const double>(&sigma, 1), window);
        std::size_t nonzero = 0;
        for (std::size_t j = 0; j < window.width(); ++j) {
            if (std::abs(rq.values[j]) > 0.0) {
                ++nonzero;
                CHECK(j == 7);
            }
        }
        CHECK(nonzero == 1);
        const auto sp = spectral_forward(cfg, pose, std::span<const QuadraturePoint>(&pt, 1),
                                         std::span<const double>(&sigma, 1), window);
        double peak = 0.0;
        for (const auto& v : sp.values) peak = std::max(peak, std::abs(v));
        std::size_t spread = 0;
        for (const auto& v : sp.values) {
            if (std::abs(v) > 0.05 * peak) ++spread;
        }
        CHECK(spread >= 4);  // Dirichlet tails reach several bins
    }
    SUBCASE("out-of-window scatterers are dropped and counted") {
        const QuadraturePoint pt{{0.9, 0.0, 0.0}, 1.0};  // far beyond the window
        const double sigma = 1.0;
        const SensorPose pose{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
        std::size_t dropped = 0;
        const auto rq = rq_forward(cfg, pose, std::span<const QuadraturePoint>(&pt, 1),
                                   std::span<const double>(&sigma, 1), window, &dropped);
        CHECK(dropped == 1);
        for (const auto& v : rq.values) CHECK(std::abs(v) == 0.0);
    }
}

TEST_CASE("spectral backward") {
    const auto cfg = fixtures::desk_chirp();
    const SensorPose pose{{0.28, 0.05, 0.0}, {0.28, -0.05, 0.0}};
    const BinWindow window(0, 15);
    Rng rng(21);
    const auto scene = random_scene(25, rng, fixtures::desk_bounds());
    SUBCASE("zero upstream gives zero gradients") {
        std::vector<std::complex<double>> up(window.width(), {0.0, 0.0});
        for (double g : spectral_backward(cfg, pose, scene.points, window, up)) CHECK(g == 0.0);
    }
    SUBCASE("doubling upstream doubles the gradient exactly") {
        std::vector<std::complex<double>> up(window.width());
        for (auto& u : up) u = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        auto twice = up;
        for (auto& u : twice) u *= 2.0;
        const auto g1 = spectral_backward(cfg, pose, scene.points, window, up);
        const auto g2 = spectral_backward(cfg, pose, scene.points, window, twice);
        for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g2[i] == 2.0 * g1[i]);
    }
    SUBCASE("matches finite differences through a squared-error loss") {
        std::vector<std::complex<double>> target(window.width());
        for (auto& t : target) t = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        auto loss_of = [&](const std::vector<double>& sig) {
            const auto z = spectral_forward(cfg, pose, scene.points, sig, window);
            double acc = 0.0;
            for (std::size_t j = 0; j < z.values.size(); ++j)
                acc += std::norm(z.values[j] - target[j]);
            return acc;
        };
        const auto z0 = spectral_forward(cfg, pose, scene.points, scene.sigmas, window);
        std::vector<std::complex<double>> up(window.width());
        for (std::size_t j = 0; j < up.size(); ++j) up[j] = 2.0 * (z0.values[j] - target[j]);
        const auto grad = spectral_backward(cfg, pose, scene.points, window, up);
        auto sig = scene.sigmas;
        const double h = 1e-6;
        for (int check = 0; check < 20; ++check) {
            const std::size_t i = static_cast<std::size_t>(rng.next_u64() % sig.size());
            const double saved = sig[i];
            sig[i] = saved + h;
            const double hi = loss_of(sig);
            sig[i] = saved - h;
            const double lo = loss_of(sig);
            sig[i] = saved;
            const double fd = (hi - lo) / (2.0 * h);
            CHECK(std::abs(fd - grad[i]) / std::max(std::abs(fd), 1e-10) < 1e-6);
        }
    }
}

TEST_CASE("time and rq backward match finite differences") {
    const auto cfg = fixtures::desk_chirp();
    const SensorPose pose{{0.3, 0.0, 0.0}, {0.3, 0.0, 0.0}};
    const BinWindow window(0, 15);
    Rng rng(31);
    const auto scene = random_scene(15, rng, fixtures::desk_bounds());
    SUBCASE("time-domain adjoint") {
        std::vector<std::complex<double>> target(cfg.num_samples);
        for (auto& t : target) t = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        auto loss_of = [&](const std::vector<double>& sig) {
            const auto s = time_forward(cfg, pose, scene.points, sig);
            double acc = 0.0;
            for (std::size_t n = 0; n < s.size(); ++n) acc += std::norm(s[n] - target[n]);
            return acc;
        };
        const auto s0 = time_forward(cfg, pose, scene.points, scene.sigmas);
        std::vector<std::complex<double>> up(cfg.num_samples);
        for (std::size_t n = 0; n < up.size(); ++n) up[n] = 2.0 * (s0[n] - target[n]);
        const auto grad = time_backward(cfg, pose, scene.points, up);
        auto sig = scene.sigmas;
        const double h = 1e-6;
        for (std::size_t i = 0; i < sig.size(); ++i) {
            const double saved = sig[i];
            sig[i] = saved + h;
            const double hi = loss_of(sig);
            sig[i] = saved - h;
            const double lo = loss_of(sig);
            sig[i] = saved;
            CHECK(std::abs((hi - lo) / (2.0 * h) - grad[i]) /
                      std::max(std::abs(grad[i]), 1e-10) <
                  1e-6);
        }
    }
    SUBCASE("rq gradient routes through the quantized bin") {
        std::vector<std::complex<double>> up(window.width());
        for (auto& u : up) u = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        auto loss_of = [&](const std::vector<double>& sig) {
            const auto z = rq_forward(cfg, pose, scene.points, sig, window);
            double acc = 0.0;
            for (std::size_t j = 0; j < z.values.size(); ++j) {
                acc += up[j].real() * z.values[j].real() + up[j].imag() * z.values[j].imag();
            }
            return acc;
        };
        const auto grad = rq_backward(cfg, pose, scene.points, window, up);
        auto sig = scene.sigmas;
        const double h = 1e-6;
        for (std::size_t i = 0; i < sig.size(); ++i) {
            const double saved = sig[i];
            sig[i] = saved + h;
            const double hi = loss_of(sig);
            sig[i] = saved - h;
            const double lo = loss_of(sig);
            sig[i] = saved;
            CHECK(std::abs((hi - lo) / (2.0 * h) - grad[i]) <=
                  1e-6 * std::max(std::abs(grad[i]), 1e-10) + 1e-12);
        }
    }
}

TEST_CASE("operation counters follow the cost contract") {
    const auto cfg = fixtures::desk_chirp();
    const SensorPose pose{{0.3, 0.0, 0.0}, {0.3, 0.0, 0.0}};
    const BinWindow window(2, 13);
    Rng rng(51);
    const auto scene = random_scene(37, rng, fixtures::desk_bounds());
    reset_forward_counters();
    (void)spectral_forward(cfg, pose, scene.points, scene.sigmas, window);
    CHECK(forward_counters().spectral_kernel_evals.load() == window.width() * 37);
    (void)time_forward(cfg, pose, scene.points, scene.sigmas);
    CHECK(forward_counters().time_sample_evals.load() == cfg.num_samples * 37);
    (void)rq_forward(cfg, pose, scene.points, scene.sigmas, window);
    CHECK(forward_counters().rq_scatterer_adds.load() == 37);
}

TEST_CASE("scatterer on a sensor element is rejected") {
    const auto cfg = fixtures::desk_chirp();
    const SensorPose pose{{0.1, 0.0, 0.0}, {0.2, 0.0, 0.0}};
    const QuadraturePoint pt{{0.1, 0.0, 0.0}, 1.0};
    const double sigma = 1.0;
    CHECK_THROWS_AS(spectral_forward(cfg, pose, std::span<const QuadraturePoint>(&pt, 1),
                                     std::span<const double>(&sigma, 1), BinWindow(0, 15)),
                    std::domain_error);
}

}  // TEST_SUITE
