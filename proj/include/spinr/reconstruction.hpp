#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "spinr/dataset.hpp"
#include "spinr/forward.hpp"
#include "spinr/scene_field.hpp"

namespace spinr {

struct LossConfig {
    double lambda = 0.5;              // weight of the complex-component term
    double magnitude_epsilon = 1e-12;  // stabilizes |Z| at 0
};

struct OptimizerConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t epochs = 10;
    std::size_t batch_size = 64;  // measurements per step
    std::uint64_t seed = 0;

    void validate() const;
};

enum class FitMode { Spectral, TfTs, TfSs, Rq };

struct LayerStat {
    std::string layer;
    double mean = 0.0;
    double stddev = 0.0;
};

struct StepRecord {
    std::size_t step = 0;
    double loss = 0.0;
    std::vector<LayerStat> layer_stats;
    double millis = 0.0;
    bool nan_flag = false;
};

// {"step":..,"loss":..,"layers":{name:{"mean":..,"std":..}},"millis":..,"nan":..}
std::string to_jsonl_line(const StepRecord& record);

struct TrainLog {
    std::vector<StepRecord> steps;
    // One JSON object per line, one line per optimizer step.
    void write_jsonl(const std::filesystem::path& path) const;
};

// Frequency-domain loss
//   L = sum_k (|Z_k| - |Z~_k|)^2 + lambda sum_k ((Re - Re~)^2 + (Im - Im~)^2)
// with |Z| = sqrt(Re^2 + Im^2 + eps). Returns the loss and dL/dZ_k
// (dL/dRe + i dL/dIm) per predicted bin. Throws when bins differ.
std::pair<double, std::vector<std::complex<double>>> spectral_loss(const SpectralResponse& pred,
                                                                   const SpectralResponse& meas,
                                                                   const LossConfig& cfg);

// Mean squared error over samples, real and imaginary parts summed per
// sample, with exact gradient with respect to pred.
std::pair<double, std::vector<std::complex<double>>> temporal_loss(
    std::span<const std::complex<double>> pred, std::span<const std::complex<double>> meas);

// Arithmetic mean and population standard deviation per layer slice.
std::vector<LayerStat> grad_stats(std::span<const double> gradients,
                                  std::span<const LayerSlice> layers);

using StepCallback = std::function<void(const StepRecord&)>;

// Gradient-descent reconstruction: epochs x ceil(poses/batch) steps of
// (sample batch, run the mode's forward model at the quadrature points,
// mode's loss, backprop through forward model and field, bias-corrected
// moment update). Batches are drawn without replacement and reshuffled per
// epoch from the run seed; given a fixed seed and thread count 1 the run is
// bit-deterministic. Throws on a non-finite loss, reporting the step index
// and last gradient statistics. TfTs requires a dataset with a full-spectrum
// block.
TrainLog fit(const MeasurementSet& data, SceneField& field, FitMode mode,
             const std::vector<QuadraturePoint>& quadrature, const OptimizerConfig& opt,
             const LossConfig& loss_cfg = {}, const StepCallback& on_step = {});

}  // namespace spinr
