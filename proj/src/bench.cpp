#include "spinr/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "spinr/rng.hpp"

namespace spinr {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0, Clock::time_point t1) {
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

BenchRow time_model(const std::string& name, std::size_t count, std::size_t reps,
                    const std::function<void()>& pass, std::uint64_t ops) {
    pass();  // warmup
    std::vector<double> times(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        pass();
        times[r] = elapsed_ms(t0, Clock::now());
    }
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(reps);
    double var = 0.0;
    for (double t : times) var += (t - mean) * (t - mean);
    return {name, count, reps, mean, std::sqrt(var / static_cast<double>(reps)), ops};
}

}  // namespace

std::vector<BenchRow> bench_forward(const ChirpConfig& cfg, const SensorPose& pose,
                                    const SceneBounds& scene, const BinWindow& window,
                                    const std::vector<std::size_t>& counts, std::size_t reps,
                                    std::uint64_t seed) {
    if (reps < 1) throw std::invalid_argument("bench_forward: reps must be >= 1");
    std::vector<BenchRow> rows;
    Rng rng(seed);
    for (std::size_t count : counts) {
        if (count < 1) throw std::invalid_argument("bench_forward: counts must be >= 1");
        std::vector<QuadraturePoint> points(count);
        std::vector<double> sigmas(count);
        for (std::size_t i = 0; i < count; ++i) {
            points[i] = {{rng.uniform(scene.min_corner.x, scene.max_corner.x),
                          rng.uniform(scene.min_corner.y, scene.max_corner.y),
                          rng.uniform(scene.min_corner.z, scene.max_corner.z)},
                         1.0};
            sigmas[i] = rng.next_double();
        }

        // One counted pass per model to pin the cost-scaling contract.
        reset_forward_counters();
        (void)spectral_forward(cfg, pose, points, sigmas, window);
        const std::uint64_t spectral_ops = forward_counters().spectral_kernel_evals.load();
        if (spectral_ops != window.width() * count)
            throw std::logic_error("bench_forward: spectral kernel-eval count off contract");

        reset_forward_counters();
        (void)truncate(dft(time_forward(cfg, pose, points, sigmas)), window);
        const std::uint64_t time_ops = forward_counters().time_sample_evals.load();
        if (time_ops != cfg.num_samples * count)
            throw std::logic_error("bench_forward: time sample-eval count off contract");

        reset_forward_counters();
        (void)rq_forward(cfg, pose, points, sigmas, window);
        const std::uint64_t rq_ops = forward_counters().rq_scatterer_adds.load();
        if (rq_ops != count)
            throw std::logic_error("bench_forward: rq scatterer count off contract");

        rows.push_back(time_model(
            "spectral", count, reps,
            [&] { (void)spectral_forward(cfg, pose, points, sigmas, window); }, spectral_ops));
        rows.push_back(time_model(
            "time+dft", count, reps,
            [&] { (void)truncate(dft(time_forward(cfg, pose, points, sigmas)), window); },
            time_ops));
        rows.push_back(time_model(
            "rq", count, reps, [&] { (void)rq_forward(cfg, pose, points, sigmas, window); },
            rq_ops));
    }
    return rows;
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("bench: cannot open " + path.string());
    out << "model,scatterers,reps,mean_ms,std_ms,ops\n";
    for (const auto& r : rows) {
        out << r.model << "," << r.scatterers << "," << r.reps << "," << r.mean_ms << ","
            << r.std_ms << "," << r.ops << "\n";
    }
}

}  // namespace spinr
