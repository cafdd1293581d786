#include "spinr/scene_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinr/parallel.hpp"
#include "spinr/rng.hpp"

namespace spinr {

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double softplus_inverse(double y) {
    if (!(y > 0.0)) throw std::invalid_argument("softplus_inverse: need y > 0");
    if (y > 30.0) return y;
    return std::log(std::expm1(y));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<QuadraturePoint> sample_quadrature(const SceneBounds& bounds, QuadratureRule rule,
                                               const std::array<std::size_t, 3>& resolution,
                                               std::uint64_t seed) {
    for (std::size_t r : resolution)
        if (r < 1) throw std::invalid_argument("sample_quadrature: resolution must be >= 1");
    const Vec3 ext = bounds.extent();
    const Vec3 h{ext.x / static_cast<double>(resolution[0]),
                 ext.y / static_cast<double>(resolution[1]),
                 ext.z / static_cast<double>(resolution[2])};
    const double weight = h.x * h.y * h.z;
    std::vector<QuadraturePoint> points;
    points.reserve(resolution[0] * resolution[1] * resolution[2]);
    Rng rng(seed);
    for (std::size_t iz = 0; iz < resolution[2]; ++iz) {
        for (std::size_t iy = 0; iy < resolution[1]; ++iy) {
            for (std::size_t ix = 0; ix < resolution[0]; ++ix) {
                Vec3 frac{0.5, 0.5, 0.5};
                if (rule == QuadratureRule::StratifiedRandom) {
                    frac = {rng.next_double(), rng.next_double(), rng.next_double()};
                }
                const Vec3 p = bounds.min_corner +
                               Vec3{(static_cast<double>(ix) + frac.x) * h.x,
                                    (static_cast<double>(iy) + frac.y) * h.y,
                                    (static_cast<double>(iz) + frac.z) * h.z};
                points.push_back({p, weight});
            }
        }
    }
    return points;
}

void backward_sharded(const SceneField& field, std::span<const Vec3> positions,
                      std::span<const double> upstream, std::span<double> grad) {
    if (positions.size() != upstream.size())
        throw std::invalid_argument("backward_sharded: positions/upstream length mismatch");
    const unsigned workers = thread_count();
    if (workers <= 1 || positions.size() < 2048) {
        field.backward(positions, upstream, grad);
        return;
    }
    const std::size_t n = positions.size();
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::vector<double>> buffers(used);
    parallel_for(n, [&](std::size_t lo, std::size_t hi, unsigned tid) {
        auto& buf = buffers[tid];
        buf.assign(field.param_count(), 0.0);
        field.backward(positions.subspan(lo, hi - lo), upstream.subspan(lo, hi - lo), buf);
    });
    for (unsigned t = 0; t < used; ++t) {
        const auto& buf = buffers[t];
        if (buf.empty()) continue;
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += buf[i];
    }
}

// ---------------------------------------------------------------------------
// VoxelGridField

namespace {

struct AxisInterp {
    std::size_t i0, i1;
    double frac;
};

// Cell-center lattice coordinate with clamped extension at the boundary
// cells. frac is snapped to the lattice when within 1e-9 of it so queries at
// cell centers reproduce the cell value.
AxisInterp axis_interp(double x, double origin, double h, std::size_t dim) {
    if (dim == 1) return {0, 0, 0.0};
    double u = (x - origin) / h - 0.5;
    if (u < 0.0) u = 0.0;
    const double last = static_cast<double>(dim - 1);
    if (u > last) u = last;
    double fi = std::floor(u);
    if (fi > last - 1.0) fi = last - 1.0;
    double f = u - fi;
    if (f < 1e-9) f = 0.0;
    if (f > 1.0 - 1e-9) f = 1.0;
    const std::size_t i0 = static_cast<std::size_t>(fi);
    return {i0, i0 + 1, f};
}

}  // namespace

VoxelGridField::VoxelGridField(const Vec3& origin, double voxel_size,
                               const std::array<std::size_t, 3>& dims,
                               OutputActivation activation, double initial_sigma)
    : origin_(origin), voxel_size_(voxel_size), dims_(dims), activation_(activation) {
    if (!(voxel_size > 0.0)) throw std::invalid_argument("VoxelGridField: voxel_size must be > 0");
    for (std::size_t d : dims)
        if (d < 1) throw std::invalid_argument("VoxelGridField: dims must be >= 1");
    const double raw = activation_ == OutputActivation::Softplus ? softplus_inverse(initial_sigma)
                                                                 : initial_sigma;
    raw_.assign(dims_[0] * dims_[1] * dims_[2], raw);
}

VoxelGridField VoxelGridField::over(const SceneBounds& bounds, std::size_t res,
                                    OutputActivation activation, double initial_sigma) {
    const Vec3 ext = bounds.extent();
    const double h = ext.x / static_cast<double>(res);
    if (std::abs(ext.y - ext.x) > 1e-9 * ext.x || std::abs(ext.z - ext.x) > 1e-9 * ext.x)
        throw std::invalid_argument("VoxelGridField::over: bounds must be cubic");
    return VoxelGridField(bounds.min_corner, h, {res, res, res}, activation, initial_sigma);
}

double VoxelGridField::cell_value(std::size_t flat_index) const {
    const double raw = raw_[flat_index];
    return activation_ == OutputActivation::Softplus ? softplus(raw) : std::max(raw, 0.0);
}

void VoxelGridField::set_cell_value(std::size_t flat_index, double sigma) {
    raw_[flat_index] =
        activation_ == OutputActivation::Softplus ? softplus_inverse(sigma) : sigma;
}

void VoxelGridField::query(std::span<const Vec3> positions, std::span<double> out) const {
    const Vec3 span_max = origin_ + voxel_size_ * Vec3{static_cast<double>(dims_[0]),
                                                       static_cast<double>(dims_[1]),
                                                       static_cast<double>(dims_[2])};
    auto run = [&](std::size_t lo, std::size_t hi, unsigned) {
        for (std::size_t p = lo; p < hi; ++p) {
            const Vec3& x = positions[p];
            if (x.x < origin_.x || x.x > span_max.x || x.y < origin_.y || x.y > span_max.y ||
                x.z < origin_.z || x.z > span_max.z) {
                out[p] = 0.0;  // scene is bounded
                continue;
            }
            const AxisInterp ax = axis_interp(x.x, origin_.x, voxel_size_, dims_[0]);
            const AxisInterp ay = axis_interp(x.y, origin_.y, voxel_size_, dims_[1]);
            const AxisInterp az = axis_interp(x.z, origin_.z, voxel_size_, dims_[2]);
            double acc = 0.0;
            for (int cz = 0; cz < 2; ++cz) {
                const double wz = cz ? az.frac : 1.0 - az.frac;
                if (wz == 0.0) continue;
                for (int cy = 0; cy < 2; ++cy) {
                    const double wy = cy ? ay.frac : 1.0 - ay.frac;
                    if (wy == 0.0) continue;
                    for (int cx = 0; cx < 2; ++cx) {
                        const double wx = cx ? ax.frac : 1.0 - ax.frac;
                        if (wx == 0.0) continue;
                        const std::size_t idx = index(cx ? ax.i1 : ax.i0, cy ? ay.i1 : ay.i0,
                                                      cz ? az.i1 : az.i0);
                        acc += wx * wy * wz * cell_value(idx);
                    }
                }
            }
            out[p] = acc;
        }
    };
    if (positions.size() >= 8192) {
        parallel_for(positions.size(), run);
    } else {
        run(0, positions.size(), 0);
    }
}

void VoxelGridField::backward(std::span<const Vec3> positions, std::span<const double> upstream,
                              std::span<double> grad) const {
    if (positions.size() != upstream.size())
        throw std::invalid_argument("VoxelGridField::backward: length mismatch");
    if (grad.size() != raw_.size())
        throw std::invalid_argument("VoxelGridField::backward: bad gradient buffer size");
    const Vec3 span_max = origin_ + voxel_size_ * Vec3{static_cast<double>(dims_[0]),
                                                       static_cast<double>(dims_[1]),
                                                       static_cast<double>(dims_[2])};
    for (std::size_t p = 0; p < positions.size(); ++p) {
        const double up = upstream[p];
        if (up == 0.0) continue;
        const Vec3& x = positions[p];
        if (x.x < origin_.x || x.x > span_max.x || x.y < origin_.y || x.y > span_max.y ||
            x.z < origin_.z || x.z > span_max.z) {
            continue;  // out-of-bounds points carry no gradient
        }
        const AxisInterp ax = axis_interp(x.x, origin_.x, voxel_size_, dims_[0]);
        const AxisInterp ay = axis_interp(x.y, origin_.y, voxel_size_, dims_[1]);
        const AxisInterp az = axis_interp(x.z, origin_.z, voxel_size_, dims_[2]);
        for (int cz = 0; cz < 2; ++cz) {
            const double wz = cz ? az.frac : 1.0 - az.frac;
            if (wz == 0.0) continue;
            for (int cy = 0; cy < 2; ++cy) {
                const double wy = cy ? ay.frac : 1.0 - ay.frac;
                if (wy == 0.0) continue;
                for (int cx = 0; cx < 2; ++cx) {
                    const double wx = cx ? ax.frac : 1.0 - ax.frac;
                    if (wx == 0.0) continue;
                    const std::size_t idx =
                        index(cx ? ax.i1 : ax.i0, cy ? ay.i1 : ay.i0, cz ? az.i1 : az.i0);
                    const double dact = activation_ == OutputActivation::Softplus
                                            ? sigmoid(raw_[idx])
                                            : (raw_[idx] > 0.0 ? 1.0 : 0.0);
                    grad[idx] += up * wx * wy * wz * dact;
                }
            }
        }
    }
}

std::vector<LayerSlice> VoxelGridField::layers() const {
    return {LayerSlice{"grid", 0, raw_.size()}};
}

Volume VoxelGridField::to_volume() const {
    Volume vol(origin_, voxel_size_, dims_);
    for (std::size_t i = 0; i < raw_.size(); ++i) vol.intensities[i] = cell_value(i);
    return vol;
}

// ---------------------------------------------------------------------------
// CoordinateNetworkField

CoordinateNetworkField::CoordinateNetworkField(const SceneBounds& bounds,
                                               std::vector<std::size_t> hidden_widths,
                                               double omega0, std::uint64_t seed)
    : bounds_(bounds), hidden_(std::move(hidden_widths)), omega0_(omega0) {
    if (hidden_.empty()) throw std::invalid_argument("CoordinateNetworkField: need hidden layers");
    if (!(omega0_ > 0.0)) throw std::invalid_argument("CoordinateNetworkField: omega0 must be > 0");
    std::size_t fan_in = 3;
    std::size_t offset = 0;
    for (std::size_t w : hidden_) {
        slices_.push_back({offset, offset + w * fan_in, fan_in, w});
        offset += w * fan_in + w;
        fan_in = w;
    }
    slices_.push_back({offset, offset + fan_in, fan_in, 1});  // linear head
    offset += fan_in + 1;
    params_.resize(offset);

    Rng rng(seed);
    for (std::size_t l = 0; l < slices_.size(); ++l) {
        const Slice& s = slices_[l];
        const double fan = static_cast<double>(s.fan_in);
        const double w_bound = (l == 0) ? 1.0 / fan : std::sqrt(6.0 / fan) / omega0_;
        for (std::size_t i = 0; i < s.fan_out * s.fan_in; ++i)
            params_[s.w_off + i] = rng.uniform(-w_bound, w_bound);
        const double b_bound = 1.0 / std::sqrt(fan);
        for (std::size_t i = 0; i < s.fan_out; ++i)
            params_[s.b_off + i] = rng.uniform(-b_bound, b_bound);
    }
    // Start the field near sigma ~ 1e-3 so early steps are driven by data.
    params_[slices_.back().b_off] = softplus_inverse(1e-3);
}

double CoordinateNetworkField::forward_one(const Vec3& p, std::vector<double>& scratch) const {
    // scratch layout: [h_prev | z | h]; widths never exceed max hidden width.
    std::size_t max_w = 3;
    for (std::size_t w : hidden_) max_w = std::max(max_w, w);
    scratch.resize(2 * max_w);
    double* h_prev = scratch.data();
    double* h = scratch.data() + max_w;

    const Vec3 ext = bounds_.extent();
    h_prev[0] = 2.0 * (p.x - bounds_.min_corner.x) / ext.x - 1.0;
    h_prev[1] = 2.0 * (p.y - bounds_.min_corner.y) / ext.y - 1.0;
    h_prev[2] = 2.0 * (p.z - bounds_.min_corner.z) / ext.z - 1.0;

    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        const Slice& s = slices_[l];
        const double* w = params_.data() + s.w_off;
        const double* b = params_.data() + s.b_off;
        for (std::size_t j = 0; j < s.fan_out; ++j) {
            double z = b[j];
            const double* wrow = w + j * s.fan_in;
            for (std::size_t i = 0; i < s.fan_in; ++i) z += wrow[i] * h_prev[i];
            h[j] = std::sin(omega0_ * z);
        }
        std::swap(h_prev, h);
    }
    const Slice& head = slices_.back();
    double out = params_[head.b_off];
    const double* w = params_.data() + head.w_off;
    for (std::size_t i = 0; i < head.fan_in; ++i) out += w[i] * h_prev[i];
    return softplus(out);
}

void CoordinateNetworkField::query(std::span<const Vec3> positions, std::span<double> out) const {
    auto run = [&](std::size_t lo, std::size_t hi, unsigned) {
        std::vector<double> scratch;
        for (std::size_t p = lo; p < hi; ++p) {
            out[p] = bounds_.contains(positions[p]) ? forward_one(positions[p], scratch) : 0.0;
        }
    };
    if (positions.size() >= 256) {
        parallel_for(positions.size(), run);
    } else {
        run(0, positions.size(), 0);
    }
}

void CoordinateNetworkField::backward_one(const Vec3& p, double upstream, std::span<double> grad,
                                          std::vector<double>& scratch) const {
    const std::size_t n_sine = hidden_.size();
    std::size_t max_w = 3;
    for (std::size_t w : hidden_) max_w = std::max(max_w, w);
    // scratch: activations per layer boundary (n_sine + 1 slots) plus
    // pre-activations per sine layer, then two backprop buffers.
    const std::size_t act_sz = (n_sine + 1) * max_w;
    const std::size_t pre_sz = n_sine * max_w;
    scratch.resize(act_sz + pre_sz + 2 * max_w);
    double* acts = scratch.data();                 // acts[l*max_w + i], l = 0 is the input
    double* pres = scratch.data() + act_sz;        // pres[l*max_w + j]
    double* g_cur = scratch.data() + act_sz + pre_sz;
    double* g_prev = g_cur + max_w;

    const Vec3 ext = bounds_.extent();
    acts[0] = 2.0 * (p.x - bounds_.min_corner.x) / ext.x - 1.0;
    acts[1] = 2.0 * (p.y - bounds_.min_corner.y) / ext.y - 1.0;
    acts[2] = 2.0 * (p.z - bounds_.min_corner.z) / ext.z - 1.0;

    for (std::size_t l = 0; l < n_sine; ++l) {
        const Slice& s = slices_[l];
        const double* w = params_.data() + s.w_off;
        const double* b = params_.data() + s.b_off;
        const double* h_in = acts + l * max_w;
        double* h_out = acts + (l + 1) * max_w;
        double* z_out = pres + l * max_w;
        for (std::size_t j = 0; j < s.fan_out; ++j) {
            double z = b[j];
            const double* wrow = w + j * s.fan_in;
            for (std::size_t i = 0; i < s.fan_in; ++i) z += wrow[i] * h_in[i];
            z_out[j] = z;
            h_out[j] = std::sin(omega0_ * z);
        }
    }

    const Slice& head = slices_.back();
    const double* h_last = acts + n_sine * max_w;
    double out = params_[head.b_off];
    for (std::size_t i = 0; i < head.fan_in; ++i) out += params_[head.w_off + i] * h_last[i];

    const double g_out = upstream * sigmoid(out);  // d softplus
    grad[head.b_off] += g_out;
    for (std::size_t i = 0; i < head.fan_in; ++i) {
        grad[head.w_off + i] += g_out * h_last[i];
        g_cur[i] = params_[head.w_off + i] * g_out;
    }

    for (std::size_t l = n_sine; l-- > 0;) {
        const Slice& s = slices_[l];
        const double* w = params_.data() + s.w_off;
        const double* h_in = acts + l * max_w;
        const double* z = pres + l * max_w;
        for (std::size_t i = 0; i < s.fan_in; ++i) g_prev[i] = 0.0;
        for (std::size_t j = 0; j < s.fan_out; ++j) {
            const double gz = g_cur[j] * omega0_ * std::cos(omega0_ * z[j]);
            grad[s.b_off + j] += gz;
            const double* wrow = w + j * s.fan_in;
            double* gwrow = grad.data() + s.w_off + j * s.fan_in;
            for (std::size_t i = 0; i < s.fan_in; ++i) {
                gwrow[i] += gz * h_in[i];
                g_prev[i] += wrow[i] * gz;
            }
        }
        std::swap(g_cur, g_prev);
    }
}

void CoordinateNetworkField::backward(std::span<const Vec3> positions,
                                      std::span<const double> upstream,
                                      std::span<double> grad) const {
    if (positions.size() != upstream.size())
        throw std::invalid_argument("CoordinateNetworkField::backward: length mismatch");
    if (grad.size() != params_.size())
        throw std::invalid_argument("CoordinateNetworkField::backward: bad gradient buffer size");
    std::vector<double> scratch;
    for (std::size_t p = 0; p < positions.size(); ++p) {
        if (upstream[p] == 0.0 || !bounds_.contains(positions[p])) continue;
        backward_one(positions[p], upstream[p], grad, scratch);
    }
}

std::vector<LayerSlice> CoordinateNetworkField::layers() const {
    std::vector<LayerSlice> out;
    for (std::size_t l = 0; l < slices_.size(); ++l) {
        const Slice& s = slices_[l];
        const std::size_t size = s.fan_out * s.fan_in + s.fan_out;
        const std::string name =
            l + 1 == slices_.size() ? "head" : "sine" + std::to_string(l);
        out.push_back({name, s.w_off, size});
    }
    return out;
}

}  // namespace spinr
