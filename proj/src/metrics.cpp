#include "spinr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace spinr {

namespace {

// Median-split kd-tree over an index array; nearest-neighbor queries with
// axis-distance pruning.
class KdTree {
  public:
    explicit KdTree(const std::vector<Vec3>& points) : points_(points) {
        if (points_.empty()) throw std::invalid_argument("KdTree: empty point set");
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        build(0, points_.size(), 0);
    }

    double nearest_distance(const Vec3& q) const {
        double best = std::numeric_limits<double>::infinity();
        search(q, 0, points_.size(), 0, best);
        return std::sqrt(best);
    }

  private:
    static double component(const Vec3& v, int axis) {
        return axis == 0 ? v.x : (axis == 1 ? v.y : v.z);
    }

    void build(std::size_t lo, std::size_t hi, int depth) {
        if (hi - lo <= 1) return;
        const int axis = depth % 3;
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                         [&](std::size_t a, std::size_t b) {
                             return component(points_[a], axis) < component(points_[b], axis);
                         });
        build(lo, mid, depth + 1);
        build(mid + 1, hi, depth + 1);
    }

    void search(const Vec3& q, std::size_t lo, std::size_t hi, int depth, double& best_sq) const {
        if (lo >= hi) return;
        const int axis = depth % 3;
        const std::size_t mid = lo + (hi - lo) / 2;
        const Vec3& p = points_[order_[mid]];
        best_sq = std::min(best_sq, squared_distance(q, p));
        const double d = component(q, axis) - component(p, axis);
        const bool go_left_first = d < 0.0;
        if (go_left_first) {
            search(q, lo, mid, depth + 1, best_sq);
            if (d * d < best_sq) search(q, mid + 1, hi, depth + 1, best_sq);
        } else {
            search(q, mid + 1, hi, depth + 1, best_sq);
            if (d * d < best_sq) search(q, lo, mid, depth + 1, best_sq);
        }
    }

    const std::vector<Vec3>& points_;
    std::vector<std::size_t> order_;
};

// Directed (mean, max) of nearest-neighbor distances from `from` into `tree`.
std::pair<double, double> directed_nn(const std::vector<Vec3>& from, const KdTree& tree) {
    double sum = 0.0;
    double peak = 0.0;
    for (const auto& p : from) {
        const double d = tree.nearest_distance(p);
        sum += d;
        peak = std::max(peak, d);
    }
    return {sum / static_cast<double>(from.size()), peak};
}

void check_clouds(const PointCloud& a, const PointCloud& b) {
    if (a.points.empty() || b.points.empty())
        throw std::invalid_argument("point-cloud metric: empty input cloud");
}

std::vector<bool> binarize(const Volume& v, const ThresholdPolicy& policy) {
    std::vector<bool> mask(v.intensities.size(), false);
    const double peak = v.intensities.empty()
                            ? 0.0
                            : *std::max_element(v.intensities.begin(), v.intensities.end());
    if (peak <= 0.0) return mask;
    if (policy.kind == ThresholdPolicy::Kind::RelativeThreshold) {
        const double cut = policy.value * peak;
        for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = v.intensities[i] >= cut;
    } else {
        std::vector<std::size_t> idx(v.intensities.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
            return v.intensities[x] > v.intensities[y];
        });
        const std::size_t keep = static_cast<std::size_t>(
            std::llround(policy.value * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < std::min(keep, idx.size()); ++i) mask[idx[i]] = true;
    }
    return mask;
}

}  // namespace

PointCloud extract_points(const Volume& vol, const ThresholdPolicy& policy) {
    const auto mask = binarize(vol, policy);
    PointCloud cloud;
    for (std::size_t flat = 0; flat < mask.size(); ++flat) {
        if (!mask[flat]) continue;
        const auto [ix, iy, iz] = vol.unflatten(flat);
        cloud.points.push_back(vol.voxel_center(ix, iy, iz));
    }
    if (cloud.points.empty())
        throw std::runtime_error(
            "extract_points: selection is empty; lower the threshold or check the volume");
    return cloud;
}

double chamfer(const PointCloud& a, const PointCloud& b) {
    check_clouds(a, b);
    const KdTree tree_a(a.points);
    const KdTree tree_b(b.points);
    const auto [mean_ab, max_ab] = directed_nn(a.points, tree_b);
    const auto [mean_ba, max_ba] = directed_nn(b.points, tree_a);
    (void)max_ab;
    (void)max_ba;
    return 0.5 * (mean_ab + mean_ba);
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
    check_clouds(a, b);
    const KdTree tree_a(a.points);
    const KdTree tree_b(b.points);
    const auto [mean_ab, max_ab] = directed_nn(a.points, tree_b);
    const auto [mean_ba, max_ba] = directed_nn(b.points, tree_a);
    (void)mean_ab;
    (void)mean_ba;
    return std::max(max_ab, max_ba);
}

double iou(const Volume& a, const Volume& b, const ThresholdPolicy& policy) {
    if (!a.same_grid(b)) throw std::invalid_argument("iou: volume grids differ");
    const auto ma = binarize(a, policy);
    const auto mb = binarize(b, policy);
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < ma.size(); ++i) {
        inter += static_cast<std::size_t>(ma[i] && mb[i]);
        uni += static_cast<std::size_t>(ma[i] || mb[i]);
    }
    if (uni == 0) return 1.0;  // both empty
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double psnr(const ProjectionImage& a, const ProjectionImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("psnr: image shape mismatch");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.pixels.size());
    constexpr double kCapDb = 100.0;
    if (mse <= 0.0) return kCapDb;
    return std::min(kCapDb, 10.0 * std::log10(1.0 / mse));
}

double ssim(const ProjectionImage& a, const ProjectionImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("ssim: image shape mismatch");
    constexpr std::size_t kWin = 11;
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;
    if (a.width < kWin || a.height < kWin)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");

    double kernel[kWin][kWin];
    double ksum = 0.0;
    for (std::size_t r = 0; r < kWin; ++r) {
        for (std::size_t c = 0; c < kWin; ++c) {
            const double dr = static_cast<double>(r) - 5.0;
            const double dc = static_cast<double>(c) - 5.0;
            kernel[r][c] = std::exp(-(dr * dr + dc * dc) / (2.0 * kSigma * kSigma));
            ksum += kernel[r][c];
        }
    }
    for (auto& row : kernel)
        for (auto& w : row) w /= ksum;

    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t row = 0; row + kWin <= a.height; ++row) {
        for (std::size_t col = 0; col + kWin <= a.width; ++col) {
            double mu_a = 0.0, mu_b = 0.0;
            for (std::size_t r = 0; r < kWin; ++r) {
                for (std::size_t c = 0; c < kWin; ++c) {
                    mu_a += kernel[r][c] * a.at(row + r, col + c);
                    mu_b += kernel[r][c] * b.at(row + r, col + c);
                }
            }
            double var_a = 0.0, var_b = 0.0, cov = 0.0;
            for (std::size_t r = 0; r < kWin; ++r) {
                for (std::size_t c = 0; c < kWin; ++c) {
                    const double da = a.at(row + r, col + c) - mu_a;
                    const double db = b.at(row + r, col + c) - mu_b;
                    var_a += kernel[r][c] * da * da;
                    var_b += kernel[r][c] * db * db;
                    cov += kernel[r][c] * da * db;
                }
            }
            const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
            const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

ProjectionImage mip(const Volume& vol, Axis axis) {
    ProjectionImage img;
    switch (axis) {
        case Axis::Z:
            img.width = vol.dims[0];
            img.height = vol.dims[1];
            break;
        case Axis::Y:
            img.width = vol.dims[0];
            img.height = vol.dims[2];
            break;
        case Axis::X:
            img.width = vol.dims[1];
            img.height = vol.dims[2];
            break;
    }
    img.pixels.assign(img.width * img.height, 0.0);
    for (std::size_t iz = 0; iz < vol.dims[2]; ++iz) {
        for (std::size_t iy = 0; iy < vol.dims[1]; ++iy) {
            for (std::size_t ix = 0; ix < vol.dims[0]; ++ix) {
                const double v = vol.at(ix, iy, iz);
                std::size_t row = 0, col = 0;
                switch (axis) {
                    case Axis::Z: row = iy; col = ix; break;
                    case Axis::Y: row = iz; col = ix; break;
                    case Axis::X: row = iz; col = iy; break;
                }
                double& px = img.at(row, col);
                px = std::max(px, v);
            }
        }
    }
    const double peak = img.pixels.empty()
                            ? 0.0
                            : *std::max_element(img.pixels.begin(), img.pixels.end());
    if (peak > 0.0) {
        for (auto& p : img.pixels) p /= peak;
    }
    return img;
}

}  // namespace spinr
