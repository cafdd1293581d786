#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spinr/forward.hpp"

namespace spinr {

struct BenchRow {
    std::string model;  // "spectral", "time+dft", "rq"
    std::size_t scatterers = 0;
    std::size_t reps = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
    std::uint64_t ops = 0;  // operation-counter delta for one pass
};

// Times the three forward models on identical random scenes (one pose, the
// given window). Verifies the operation-count formulas
// (|window|*|points| spectral kernel evals, N*|points| time samples,
// |points| rq adds) against the counters and throws on mismatch.
std::vector<BenchRow> bench_forward(const ChirpConfig& cfg, const SensorPose& pose,
                                    const SceneBounds& scene, const BinWindow& window,
                                    const std::vector<std::size_t>& counts, std::size_t reps,
                                    std::uint64_t seed = 0);

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);

}  // namespace spinr
