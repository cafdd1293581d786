// Command-line driver for the radar simulation / reconstruction pipeline:
//   simulate       synthesize a measurement set from a phantom and aperture
//   fit            reconstruct a reflectivity field from a measurement set
//   backproject    classical coherent backprojection baseline
//   export-volume  sample a trained field checkpoint onto a dense volume
//   eval           metric report for a reconstructed volume vs ground truth
//   bench          forward-model latency comparison
//   leakage        closed-form DFT leakage profile of a single tone

#include <complex>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "spinr/backprojection.hpp"
#include "spinr/bench.hpp"
#include "spinr/io.hpp"
#include "spinr/metrics.hpp"
#include "spinr/parallel.hpp"
#include "spinr/reconstruction.hpp"
#include "spinr/simulate.hpp"

namespace {

using namespace spinr;
using nlohmann::json;

void emit_error(const std::string& error_class, const std::string& message) {
    json j{{"error", error_class}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

std::string format_error_class(FormatError::Kind kind) {
    switch (kind) {
        case FormatError::Kind::BadMagic: return "bad_magic";
        case FormatError::Kind::BadVersion: return "bad_version";
        case FormatError::Kind::Truncated: return "truncated";
        case FormatError::Kind::BadHeader: return "bad_header";
        case FormatError::Kind::IoFailure: return "io_failure";
    }
    return "format_error";
}

FitMode parse_mode(const std::string& mode) {
    if (mode == "spectral") return FitMode::Spectral;
    if (mode == "tf-ts") return FitMode::TfTs;
    if (mode == "tf-ss") return FitMode::TfSs;
    if (mode == "rq") return FitMode::Rq;
    throw CLI::ValidationError("--mode", "expected spectral|tf-ts|tf-ss|rq");
}

SceneBounds field_bounds(const SceneField& field) {
    if (const auto* grid = dynamic_cast<const VoxelGridField*>(&field)) {
        const Vec3 ext = grid->voxel_size() * Vec3{static_cast<double>(grid->dims()[0]),
                                                   static_cast<double>(grid->dims()[1]),
                                                   static_cast<double>(grid->dims()[2])};
        return SceneBounds(grid->origin(), grid->origin() + ext);
    }
    return dynamic_cast<const CoordinateNetworkField&>(field).bounds();
}

int run(int argc, char** argv) {
    CLI::App app{"frequency-domain FMCW radar simulation and volumetric reconstruction"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = all cores, 1 = bit-reproducible)");

    // -- simulate
    auto* sim = app.add_subcommand("simulate", "synthesize radar measurements");
    std::string phantom_path, aperture_path, chirp_path, sim_out;
    SimulateOptions sim_opts;
    bool sim_f64 = false;
    sim->add_option("--phantom", phantom_path, "phantom JSON")->required();
    sim->add_option("--aperture", aperture_path, "aperture JSON")->required();
    sim->add_option("--chirp", chirp_path, "chirp JSON")->required();
    sim->add_option("--out", sim_out, "output dataset path")->required();
    sim->add_option("--noise", sim_opts.noise_sigma, "complex-Gaussian noise std per bin");
    sim->add_option("--seed", sim_opts.seed, "RNG seed");
    sim->add_option("--guard", sim_opts.guard, "guard bins each side of the window");
    sim->add_flag("--mono", sim_opts.mono_convert, "multistatic-to-monostatic conversion");
    sim->add_flag("--full-spectrum", sim_opts.full_spectrum, "store all N bins per pose");
    sim->add_flag("--f64", sim_f64, "store payload as f64 instead of f32");

    // -- fit
    auto* fit_cmd = app.add_subcommand("fit", "reconstruct a reflectivity field");
    std::string fit_data, fit_mode_str = "spectral", fit_field = "grid", fit_out, fit_log;
    std::string quad_rule = "voxel-centers";
    OptimizerConfig opt;
    LossConfig loss_cfg;
    std::size_t grid_res = 64, quad_res = 64;
    double omega0 = 30.0;
    std::vector<std::size_t> hidden{128, 128, 128};
    bool lr_set = false;
    fit_cmd->add_option("--data", fit_data, "input dataset")->required();
    fit_cmd->add_option("--mode", fit_mode_str, "spectral|tf-ts|tf-ss|rq");
    fit_cmd->add_option("--field", fit_field, "grid|net");
    fit_cmd->add_option("--epochs", opt.epochs, "training epochs");
    fit_cmd->add_option("--batch", opt.batch_size, "measurements per step");
    fit_cmd->add_option("--lr", opt.learning_rate, "learning rate (default 1e-2 grid, 1e-3 net)")
        ->each([&](const std::string&) { lr_set = true; });
    fit_cmd->add_option("--seed", opt.seed, "run seed");
    fit_cmd->add_option("--out", fit_out, "output field checkpoint")->required();
    fit_cmd->add_option("--log", fit_log, "JSONL training log");
    fit_cmd->add_option("--grid-res", grid_res, "grid-field resolution per axis");
    fit_cmd->add_option("--quad-res", quad_res, "quadrature resolution per axis");
    fit_cmd->add_option("--quad-rule", quad_rule, "voxel-centers|stratified");
    fit_cmd->add_option("--lambda", loss_cfg.lambda, "complex-component loss weight");
    fit_cmd->add_option("--omega0", omega0, "first-layer frequency scale (net field)");
    fit_cmd->add_option("--hidden", hidden, "hidden layer widths (net field)");

    // -- backproject
    auto* bp = app.add_subcommand("backproject", "coherent backprojection baseline");
    std::string bp_data, bp_out;
    std::size_t bp_res = 64;
    bool bp_real = false;
    bp->add_option("--data", bp_data, "input dataset")->required();
    bp->add_option("--grid", bp_res, "volume resolution per axis");
    bp->add_option("--out", bp_out, "output volume")->required();
    bp->add_flag("--real-part", bp_real, "coherent real part instead of magnitude");

    // -- export-volume
    auto* ex = app.add_subcommand("export-volume", "sample a field checkpoint onto a volume");
    std::string ex_ckpt, ex_out;
    std::size_t ex_res = 64;
    ex->add_option("--ckpt", ex_ckpt, "field checkpoint")->required();
    ex->add_option("--grid", ex_res, "volume resolution per axis");
    ex->add_option("--out", ex_out, "output volume")->required();

    // -- eval
    auto* ev = app.add_subcommand("eval", "metric report for a volume pair");
    std::string ev_pred, ev_gt, ev_report;
    double ev_threshold = 0.5;
    ev->add_option("--pred", ev_pred, "reconstructed volume")->required();
    ev->add_option("--gt", ev_gt, "ground-truth volume")->required();
    ev->add_option("--report", ev_report, "output JSON report")->required();
    ev->add_option("--threshold", ev_threshold, "relative threshold for binarization/extraction");

    // -- bench
    auto* be = app.add_subcommand("bench", "forward-model latency comparison");
    std::string be_counts = "1e2,1e3,1e4", be_out;
    std::size_t be_reps = 20;
    std::uint64_t be_seed = 0;
    be->add_option("--counts", be_counts, "comma-separated scatterer counts");
    be->add_option("--reps", be_reps, "repetitions per measurement");
    be->add_option("--seed", be_seed, "scene RNG seed");
    be->add_option("--out", be_out, "output CSV")->required();

    // -- leakage
    auto* lk = app.add_subcommand("leakage", "DFT leakage profile of a tone");
    double lk_alpha = 0.0, lk_alpha_bins = -1.0;
    std::size_t lk_n = 256;
    std::string lk_out;
    lk->add_option("--alpha", lk_alpha, "tone angular frequency, rad/sample");
    lk->add_option("--alpha-bins", lk_alpha_bins, "tone frequency in fractional bins");
    lk->add_option("--n", lk_n, "DFT length");
    lk->add_option("--out", lk_out, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);
    set_thread_count(threads);

    if (sim->parsed()) {
        const auto phantom = load_phantom_spec(phantom_path);
        const auto aperture = load_aperture_spec(aperture_path);
        const auto chirp = load_chirp_config(chirp_path);
        const MeasurementSet set = simulate(phantom, aperture, chirp, sim_opts);
        write_dataset(sim_out, set, sim_f64);
        std::cout << "wrote " << sim_out << ": " << set.pose_count() << " poses, window ["
                  << set.window.k_min << ", " << set.window.k_max << "]\n";
        return 0;
    }

    if (fit_cmd->parsed()) {
        const MeasurementSet data = read_dataset(fit_data);
        const FitMode mode = parse_mode(fit_mode_str);
        std::unique_ptr<SceneField> field;
        if (fit_field == "grid") {
            field = std::make_unique<VoxelGridField>(VoxelGridField::over(data.bounds, grid_res));
            if (!lr_set) opt.learning_rate = 1e-2;
        } else if (fit_field == "net") {
            field = std::make_unique<CoordinateNetworkField>(data.bounds, hidden, omega0, opt.seed);
            if (!lr_set) opt.learning_rate = 1e-3;
        } else {
            throw CLI::ValidationError("--field", "expected grid|net");
        }
        const QuadratureRule rule = quad_rule == "stratified" ? QuadratureRule::StratifiedRandom
                                                              : QuadratureRule::VoxelCenters;
        const auto quadrature =
            sample_quadrature(data.bounds, rule, {quad_res, quad_res, quad_res}, opt.seed);
        std::ofstream log_stream;
        StepCallback on_step;
        if (!fit_log.empty()) {
            log_stream.open(fit_log);
            if (!log_stream) throw std::runtime_error("fit: cannot open log " + fit_log);
            on_step = [&log_stream](const StepRecord& rec) {
                log_stream << to_jsonl_line(rec) << "\n" << std::flush;
            };
        }
        TrainLog log = fit(data, *field, mode, quadrature, opt, loss_cfg, on_step);
        save_field(fit_out, *field);
        std::cout << "wrote " << fit_out << ": " << log.steps.size() << " steps, final loss "
                  << (log.steps.empty() ? 0.0 : log.steps.back().loss) << "\n";
        return 0;
    }

    if (bp->parsed()) {
        const MeasurementSet data = read_dataset(bp_data);
        const Volume vol = backproject(data, data.bounds, bp_res,
                                       bp_real ? BackprojectionOutput::CoherentReal
                                               : BackprojectionOutput::Magnitude);
        write_volume(bp_out, vol);
        std::cout << "wrote " << bp_out << "\n";
        return 0;
    }

    if (ex->parsed()) {
        const auto field = load_field(ex_ckpt);
        const SceneBounds bounds = field_bounds(*field);
        Volume vol = Volume::over(bounds, ex_res);
        std::vector<Vec3> centers(vol.cell_count());
        for (std::size_t flat = 0; flat < centers.size(); ++flat) {
            const auto [ix, iy, iz] = vol.unflatten(flat);
            centers[flat] = vol.voxel_center(ix, iy, iz);
        }
        field->query(centers, vol.intensities);
        write_volume(ex_out, vol);
        std::cout << "wrote " << ex_out << "\n";
        return 0;
    }

    if (ev->parsed()) {
        const Volume pred = read_volume(ev_pred);
        const Volume gt = read_volume(ev_gt);
        const auto policy = ThresholdPolicy::relative(ev_threshold);
        const PointCloud cloud_pred = extract_points(pred, policy);
        const PointCloud cloud_gt = extract_points(gt, policy);
        double psnr_sum = 0.0, ssim_sum = 0.0;
        for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
            psnr_sum += psnr(mip(pred, axis), mip(gt, axis));
            ssim_sum += ssim(mip(pred, axis), mip(gt, axis));
        }
        json report{{"iou", iou(pred, gt, policy)},
                    {"chamfer_m", chamfer(cloud_pred, cloud_gt)},
                    {"hausdorff_m", hausdorff(cloud_pred, cloud_gt)},
                    {"psnr_db", psnr_sum / 3.0},
                    {"ssim", ssim_sum / 3.0}};
        std::ofstream out(ev_report);
        if (!out) throw std::runtime_error("eval: cannot open " + ev_report);
        out << report.dump(2) << "\n";
        std::cout << report.dump() << "\n";
        return 0;
    }

    if (be->parsed()) {
        std::vector<std::size_t> counts;
        std::stringstream ss(be_counts);
        std::string item;
        while (std::getline(ss, item, ',')) {
            counts.push_back(static_cast<std::size_t>(std::stod(item)));
        }
        // AWR1843-like chirp over the standard desk scene, one monostatic pose.
        const ChirpConfig cfg(0.0, 70.295e12, 5e6, 256);
        const SceneBounds scene({-0.18, -0.18, -0.18}, {0.18, 0.18, 0.18});
        const SensorPose pose{{0.23, 0.0, 0.0}, {0.23, 0.0, 0.0}};
        const BinWindow window = bin_window(cfg, scene, {pose}, 2);
        const auto rows = bench_forward(cfg, pose, scene, window, counts, be_reps, be_seed);
        write_bench_csv(be_out, rows);
        for (const auto& r : rows) {
            std::cout << r.model << " n=" << r.scatterers << " mean=" << r.mean_ms
                      << "ms std=" << r.std_ms << "ms ops=" << r.ops << "\n";
        }
        return 0;
    }

    if (lk->parsed()) {
        const double alpha =
            lk_alpha_bins >= 0.0 ? kTwoPi * lk_alpha_bins / static_cast<double>(lk_n) : lk_alpha;
        std::ofstream out(lk_out);
        if (!out) throw std::runtime_error("leakage: cannot open " + lk_out);
        out << "k,magnitude,re,im\n";
        char buf[128];
        for (std::size_t k = 0; k < lk_n; ++k) {
            const auto z = tone_dft(ToneParams(1.0, 0.0, alpha), lk_n, k);
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", k, std::abs(z), z.real(),
                          z.imag());
            out << buf;
        }
        std::cout << "wrote " << lk_out << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const FormatError& e) {
        emit_error(format_error_class(e.kind()), e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        emit_error("invalid_argument", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        emit_error("domain_error", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("runtime_error", e.what());
        return 1;
    }
}
