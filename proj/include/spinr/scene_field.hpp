#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spinr/geometry.hpp"
#include "spinr/volume.hpp"

namespace spinr {

// One node of the discretized scene integral: a sample position and its
// volume element dx.
struct QuadraturePoint {
    Vec3 position;
    double weight = 0.0;  // m^3
};

enum class QuadratureRule {
    VoxelCenters,      // midpoint rule, one point per cell
    StratifiedRandom,  // one uniform sample per cell, same weights
};

std::vector<QuadraturePoint> sample_quadrature(const SceneBounds& bounds, QuadratureRule rule,
                                               const std::array<std::size_t, 3>& resolution,
                                               std::uint64_t seed = 0);

// Named slice of the flattened parameter vector, used for per-layer
// gradient statistics.
struct LayerSlice {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
};

enum class OutputActivation {
    Softplus,  // smooth nonnegative map, optimizer stays unconstrained
    Identity,  // raw parameter value, clamped to >= 0 at query
};

// Differentiable reflectivity field sigma(x) >= 0 over a bounded scene.
// query is read-only and safe to call concurrently. backward accumulates the
// exact reverse-mode gradient of sum_i upstream_i * sigma(x_i) into a
// caller-owned buffer; concurrent shards must accumulate into private
// buffers and be merged by summation (see backward_sharded).
class SceneField {
  public:
    virtual ~SceneField() = default;

    virtual void query(std::span<const Vec3> positions, std::span<double> out) const = 0;
    virtual void backward(std::span<const Vec3> positions, std::span<const double> upstream,
                          std::span<double> grad) const = 0;

    virtual std::size_t param_count() const = 0;
    virtual std::span<double> params() = 0;
    virtual std::span<const double> params() const = 0;
    virtual std::vector<LayerSlice> layers() const = 0;

    std::vector<double> query(const std::vector<Vec3>& positions) const {
        std::vector<double> out(positions.size());
        query(std::span<const Vec3>(positions), std::span<double>(out));
        return out;
    }
    double query_one(const Vec3& position) const {
        double out = 0.0;
        query(std::span<const Vec3>(&position, 1), std::span<double>(&out, 1));
        return out;
    }
};

// Splits the positions across worker threads with one private gradient
// buffer per shard, then merges the buffers in shard order.
void backward_sharded(const SceneField& field, std::span<const Vec3> positions,
                      std::span<const double> upstream, std::span<double> grad);

// Dense grid of reflectivity values with trilinear interpolation between
// cell centers. Parameters are stored pre-activation; the output activation
// is applied per cell before interpolation, so queries are trilinear in
// position and reproduce the activated cell value exactly at cell centers.
// Queries outside [origin, origin + dims*voxel_size] return 0 with zero
// gradient.
class VoxelGridField final : public SceneField {
  public:
    VoxelGridField(const Vec3& origin, double voxel_size, const std::array<std::size_t, 3>& dims,
                   OutputActivation activation = OutputActivation::Softplus,
                   double initial_sigma = 1e-3);

    // Cubic grid of res^3 cells spanning bounds (extents must be equal).
    static VoxelGridField over(const SceneBounds& bounds, std::size_t res,
                               OutputActivation activation = OutputActivation::Softplus,
                               double initial_sigma = 1e-3);

    using SceneField::query;
    void query(std::span<const Vec3> positions, std::span<double> out) const override;
    void backward(std::span<const Vec3> positions, std::span<const double> upstream,
                  std::span<double> grad) const override;

    std::size_t param_count() const override { return raw_.size(); }
    std::span<double> params() override { return raw_; }
    std::span<const double> params() const override { return raw_; }
    std::vector<LayerSlice> layers() const override;

    const Vec3& origin() const { return origin_; }
    double voxel_size() const { return voxel_size_; }
    const std::array<std::size_t, 3>& dims() const { return dims_; }
    OutputActivation activation() const { return activation_; }

    // Activated cell values on this grid's own geometry.
    Volume to_volume() const;

    std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return (iz * dims_[1] + iy) * dims_[0] + ix;
    }
    Vec3 cell_center(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return origin_ + voxel_size_ * Vec3{static_cast<double>(ix) + 0.5,
                                            static_cast<double>(iy) + 0.5,
                                            static_cast<double>(iz) + 0.5};
    }
    // Activated reflectivity of one cell.
    double cell_value(std::size_t flat_index) const;
    void set_cell_value(std::size_t flat_index, double sigma);

  private:
    Vec3 origin_;
    double voxel_size_;
    std::array<std::size_t, 3> dims_;
    OutputActivation activation_;
    std::vector<double> raw_;  // pre-activation parameters
};

// Coordinate network with sinusoidal hidden layers: positions normalized to
// [-1,1]^3 over the scene bounds, hidden layers h -> sin(omega0 (W h + b)),
// linear head, softplus output. Weights follow the sinusoidal-representation
// initialization (first layer +-1/fan_in, others +-sqrt(6/fan_in)/omega0),
// deterministic given the seed. Out-of-bounds queries return 0.
class CoordinateNetworkField final : public SceneField {
  public:
    CoordinateNetworkField(const SceneBounds& bounds,
                           std::vector<std::size_t> hidden_widths = {128, 128, 128},
                           double omega0 = 30.0, std::uint64_t seed = 0);

    using SceneField::query;
    void query(std::span<const Vec3> positions, std::span<double> out) const override;
    void backward(std::span<const Vec3> positions, std::span<const double> upstream,
                  std::span<double> grad) const override;

    std::size_t param_count() const override { return params_.size(); }
    std::span<double> params() override { return params_; }
    std::span<const double> params() const override { return params_; }
    std::vector<LayerSlice> layers() const override;

    const SceneBounds& bounds() const { return bounds_; }
    const std::vector<std::size_t>& hidden_widths() const { return hidden_; }
    double omega0() const { return omega0_; }

  private:
    double forward_one(const Vec3& p, std::vector<double>& scratch) const;
    void backward_one(const Vec3& p, double upstream, std::span<double> grad,
                      std::vector<double>& scratch) const;

    SceneBounds bounds_;
    std::vector<std::size_t> hidden_;
    double omega0_;
    std::vector<double> params_;
    // Per linear layer: weight offset, bias offset, fan_in, fan_out.
    struct Slice {
        std::size_t w_off, b_off, fan_in, fan_out;
    };
    std::vector<Slice> slices_;
};

double softplus(double x);
double softplus_inverse(double y);
double sigmoid(double x);

}  // namespace spinr
