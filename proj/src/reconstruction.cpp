#include "spinr/reconstruction.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "spinr/parallel.hpp"
#include "spinr/rng.hpp"

namespace spinr {

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("optimizer: learning_rate must be > 0");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
        throw std::invalid_argument("optimizer: betas must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("optimizer: epsilon must be > 0");
    if (batch_size < 1) throw std::invalid_argument("optimizer: batch_size must be >= 1");
    if (epochs < 1) throw std::invalid_argument("optimizer: epochs must be >= 1");
}

std::pair<double, std::vector<std::complex<double>>> spectral_loss(const SpectralResponse& pred,
                                                                   const SpectralResponse& meas,
                                                                   const LossConfig& cfg) {
    if (pred.bins != meas.bins || pred.n_fft != meas.n_fft)
        throw std::invalid_argument("spectral_loss: bin layout mismatch");
    if (!(cfg.lambda >= 0.0) || !(cfg.magnitude_epsilon > 0.0))
        throw std::invalid_argument("spectral_loss: bad LossConfig");
    double loss = 0.0;
    std::vector<std::complex<double>> grads(pred.values.size());
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
        const double re = pred.values[i].real();
        const double im = pred.values[i].imag();
        const double re_d = re - meas.values[i].real();
        const double im_d = im - meas.values[i].imag();
        const double mag_p = std::sqrt(re * re + im * im + cfg.magnitude_epsilon);
        const double mag_m = std::sqrt(std::norm(meas.values[i]) + cfg.magnitude_epsilon);
        const double mag_d = mag_p - mag_m;
        loss += mag_d * mag_d + cfg.lambda * (re_d * re_d + im_d * im_d);
        grads[i] = {2.0 * mag_d * (re / mag_p) + 2.0 * cfg.lambda * re_d,
                    2.0 * mag_d * (im / mag_p) + 2.0 * cfg.lambda * im_d};
    }
    return {loss, std::move(grads)};
}

std::pair<double, std::vector<std::complex<double>>> temporal_loss(
    std::span<const std::complex<double>> pred, std::span<const std::complex<double>> meas) {
    if (pred.size() != meas.size())
        throw std::invalid_argument("temporal_loss: length mismatch");
    const double inv_n = 1.0 / static_cast<double>(pred.size());
    double loss = 0.0;
    std::vector<std::complex<double>> grads(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const std::complex<double> d = pred[i] - meas[i];
        loss += std::norm(d) * inv_n;
        grads[i] = 2.0 * inv_n * d;
    }
    return {loss, std::move(grads)};
}

std::vector<LayerStat> grad_stats(std::span<const double> gradients,
                                  std::span<const LayerSlice> layers) {
    if (gradients.empty()) throw std::invalid_argument("grad_stats: empty gradient vector");
    std::vector<LayerStat> stats;
    stats.reserve(layers.size());
    for (const auto& layer : layers) {
        const double* ptr = gradients.data() + layer.offset;
        const double n = static_cast<double>(layer.size);
        double mean = 0.0;
        for (std::size_t i = 0; i < layer.size; ++i) mean += ptr[i];
        mean /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < layer.size; ++i) {
            const double d = ptr[i] - mean;
            var += d * d;
        }
        stats.push_back({layer.name, mean, std::sqrt(var / n)});
    }
    return stats;
}

std::string to_jsonl_line(const StepRecord& s) {
    std::ostringstream out;
    char buf[64];
    out << "{\"step\":" << s.step << ",\"loss\":";
    std::snprintf(buf, sizeof(buf), "%.17g", s.loss);
    out << buf << ",\"layers\":{";
    for (std::size_t i = 0; i < s.layer_stats.size(); ++i) {
        const auto& ls = s.layer_stats[i];
        if (i) out << ",";
        out << "\"" << ls.layer << "\":{\"mean\":";
        std::snprintf(buf, sizeof(buf), "%.17g", ls.mean);
        out << buf << ",\"std\":";
        std::snprintf(buf, sizeof(buf), "%.17g", ls.stddev);
        out << buf << "}";
    }
    std::snprintf(buf, sizeof(buf), "%.6g", s.millis);
    out << "},\"millis\":" << buf << ",\"nan\":" << (s.nan_flag ? "true" : "false") << "}";
    return out.str();
}

void TrainLog::write_jsonl(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("TrainLog: cannot open " + path.string());
    for (const auto& s : steps) out << to_jsonl_line(s) << "\n";
}

namespace {

// One measurement's forward model, loss against the dataset, and gradient
// with respect to the sampled sigma values.
double measurement_pass(const MeasurementSet& data, std::size_t pose_index, FitMode mode,
                        std::span<const QuadraturePoint> points, std::span<const double> sigmas,
                        const LossConfig& loss_cfg,
                        const std::vector<std::vector<std::complex<double>>>& time_targets,
                        std::vector<double>& dsigma_out) {
    const SensorPose& pose = data.poses[pose_index];
    const ChirpConfig& cfg = data.chirp;
    double loss = 0.0;
    switch (mode) {
        case FitMode::Spectral: {
            const SpectralResponse pred = spectral_forward(cfg, pose, points, sigmas, data.window);
            auto [l, dz] = spectral_loss(pred, data.response(pose_index), loss_cfg);
            loss = l;
            dsigma_out = spectral_backward(cfg, pose, points, data.window, dz);
            break;
        }
        case FitMode::Rq: {
            const SpectralResponse pred = rq_forward(cfg, pose, points, sigmas, data.window);
            auto [l, dz] = spectral_loss(pred, data.response(pose_index), loss_cfg);
            loss = l;
            dsigma_out = rq_backward(cfg, pose, points, data.window, dz);
            break;
        }
        case FitMode::TfSs: {
            const auto samples = time_forward(cfg, pose, points, sigmas);
            const auto bins = dft(samples);
            const SpectralResponse pred = truncate(bins, data.window);
            auto [l, dz] = spectral_loss(pred, data.response(pose_index), loss_cfg);
            loss = l;
            // Adjoint of truncate(dft(.)): d/ds_n = (1/N) sum_{k in window} dz_k e^{i beta_k n}
            std::vector<std::complex<double>> dbins(cfg.num_samples, {0.0, 0.0});
            for (std::size_t j = 0; j < dz.size(); ++j)
                dbins[static_cast<std::size_t>(data.window.k_min) + j] = dz[j];
            auto dsamples = idft(dbins);
            const double inv_n = 1.0 / static_cast<double>(cfg.num_samples);
            for (auto& v : dsamples) v *= inv_n;
            dsigma_out = time_backward(cfg, pose, points, dsamples);
            break;
        }
        case FitMode::TfTs: {
            const auto samples = time_forward(cfg, pose, points, sigmas);
            auto [l, dg] = temporal_loss(samples, time_targets[pose_index]);
            loss = l;
            dsigma_out = time_backward(cfg, pose, points, dg);
            break;
        }
    }
    return loss;
}

std::string nan_diagnostic(std::size_t step, const std::vector<LayerStat>& stats) {
    std::ostringstream os;
    os << "fit: non-finite loss at step " << step << "; gradient stats:";
    for (const auto& s : stats)
        os << " " << s.layer << "(mean=" << s.mean << ",std=" << s.stddev << ")";
    return os.str();
}

}  // namespace

TrainLog fit(const MeasurementSet& data, SceneField& field, FitMode mode,
             const std::vector<QuadraturePoint>& quadrature, const OptimizerConfig& opt,
             const LossConfig& loss_cfg, const StepCallback& on_step) {
    opt.validate();
    data.validate();
    if (data.poses.empty()) throw std::invalid_argument("fit: dataset has no measurements");
    if (quadrature.empty()) throw std::invalid_argument("fit: empty quadrature");
    if (mode == FitMode::TfTs && !data.has_full_spectrum())
        throw std::invalid_argument("fit: tf-ts mode needs a dataset with a full-spectrum block");

    std::vector<Vec3> positions(quadrature.size());
    for (std::size_t i = 0; i < quadrature.size(); ++i) positions[i] = quadrature[i].position;

    // Measurement-side time signals for temporal supervision.
    std::vector<std::vector<std::complex<double>>> time_targets;
    if (mode == FitMode::TfTs) {
        time_targets.resize(data.pose_count());
        parallel_for(data.pose_count(), [&](std::size_t lo, std::size_t hi, unsigned) {
            for (std::size_t p = lo; p < hi; ++p) time_targets[p] = idft(data.spectrum(p));
        });
    }

    const std::size_t n_params = field.param_count();
    std::vector<double> m(n_params, 0.0), v(n_params, 0.0), grad(n_params);
    std::vector<double> sigmas(quadrature.size());
    std::vector<double> dsigma(quadrature.size());
    const auto layer_slices = field.layers();

    std::vector<std::size_t> order(data.pose_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(opt.seed);

    TrainLog log;
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += opt.batch_size) {
            const auto t0 = std::chrono::steady_clock::now();
            const std::size_t batch_n = std::min(opt.batch_size, order.size() - start);
            field.query(std::span<const Vec3>(positions), std::span<double>(sigmas));

            std::fill(dsigma.begin(), dsigma.end(), 0.0);
            const unsigned shards =
                static_cast<unsigned>(std::min<std::size_t>(thread_count(), batch_n));
            std::vector<std::vector<double>> shard_dsigma(shards);
            std::vector<double> shard_loss(shards, 0.0);
            parallel_for(batch_n, [&](std::size_t lo, std::size_t hi, unsigned tid) {
                auto& acc = shard_dsigma[tid];
                acc.assign(quadrature.size(), 0.0);
                std::vector<double> local;
                for (std::size_t b = lo; b < hi; ++b) {
                    shard_loss[tid] += measurement_pass(data, order[start + b], mode, quadrature,
                                                        sigmas, loss_cfg, time_targets, local);
                    for (std::size_t i = 0; i < local.size(); ++i) acc[i] += local[i];
                }
            });
            double loss = 0.0;
            for (unsigned t = 0; t < shards; ++t) {
                loss += shard_loss[t];
                const auto& acc = shard_dsigma[t];
                if (acc.empty()) continue;
                for (std::size_t i = 0; i < dsigma.size(); ++i) dsigma[i] += acc[i];
            }
            const double inv_batch = 1.0 / static_cast<double>(batch_n);
            loss *= inv_batch;
            for (auto& g : dsigma) g *= inv_batch;

            std::fill(grad.begin(), grad.end(), 0.0);
            backward_sharded(field, positions, dsigma, grad);
            auto stats = grad_stats(grad, layer_slices);

            if (!std::isfinite(loss)) {
                StepRecord bad{step, loss, stats, 0.0, true};
                log.steps.push_back(bad);
                throw std::runtime_error(nan_diagnostic(step, stats));
            }

            // Bias-corrected moment update.
            const double t_num = static_cast<double>(step + 1);
            const double bc1 = 1.0 - std::pow(opt.beta1, t_num);
            const double bc2 = 1.0 - std::pow(opt.beta2, t_num);
            auto params = field.params();
            for (std::size_t i = 0; i < n_params; ++i) {
                m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * grad[i];
                v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * grad[i] * grad[i];
                params[i] -=
                    opt.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + opt.epsilon);
            }

            const auto t1 = std::chrono::steady_clock::now();
            StepRecord rec{step, loss, std::move(stats),
                           std::chrono::duration<double, std::milli>(t1 - t0).count(), false};
            if (on_step) on_step(rec);
            log.steps.push_back(std::move(rec));
            ++step;
        }
    }
    return log;
}

}  // namespace spinr
