#pragma once

#include <vector>

#include "spinr/geometry.hpp"
#include "spinr/volume.hpp"

namespace spinr {

struct PointCloud {
    std::vector<Vec3> points;
};

// Nonnegative pixel grid normalized so the max pixel is 1 (all-zero images
// stay zero). Row-major, pixels[row * width + col].
struct ProjectionImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> pixels;

    double& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
    double at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

struct ThresholdPolicy {
    enum class Kind { RelativeThreshold, TopFraction };
    Kind kind = Kind::RelativeThreshold;
    double value = 0.5;

    static ThresholdPolicy relative(double t) { return {Kind::RelativeThreshold, t}; }
    static ThresholdPolicy top_fraction(double p) { return {Kind::TopFraction, p}; }
};

// Centers of the voxels selected by the policy: intensity >= t * max, or the
// top fraction by intensity with ties broken by index order. Throws when the
// selection is empty (lower the threshold).
PointCloud extract_points(const Volume& vol, const ThresholdPolicy& policy);

// Symmetric mean nearest-neighbor distance, 0.5 (mean_a min_b + mean_b min_a).
// Nearest-neighbor lookups run through a kd-tree.
double chamfer(const PointCloud& a, const PointCloud& b);

// max(max_a min_b, max_b min_a).
double hausdorff(const PointCloud& a, const PointCloud& b);

// Binarize each volume against its own max with the policy, then
// |A and B| / |A or B|; 1 when both sets are empty. Grids must match.
double iou(const Volume& a, const Volume& b,
           const ThresholdPolicy& policy = ThresholdPolicy::relative(0.5));

// 10 log10(1 / MSE) on [0,1] images, capped at 100 dB for identical inputs.
double psnr(const ProjectionImage& a, const ProjectionImage& b);

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
// C2 = 0.03^2, evaluated where the window fits entirely inside the image.
double ssim(const ProjectionImage& a, const ProjectionImage& b);

enum class Axis { X, Y, Z };

// Maximum-intensity projection along one axis, normalized to max 1.
ProjectionImage mip(const Volume& vol, Axis axis);

}  // namespace spinr
