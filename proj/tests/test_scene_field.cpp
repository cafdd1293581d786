#include "spinr/scene_field.hpp"

#include <cmath>

#include "doctest.h"
#include "spinr/parallel.hpp"
#include "spinr/rng.hpp"

using namespace spinr;

namespace {

const SceneBounds kUnitCube({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});

double objective(const SceneField& field, const std::vector<Vec3>& positions,
                 const std::vector<double>& upstream) {
    const auto sigma = field.query(positions);
    double acc = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i) acc += upstream[i] * sigma[i];
    return acc;
}

// Central-difference check of backward() on `n_params` random parameters.
void check_gradient(SceneField& field, double h, std::size_t n_params, double tol,
                    std::uint64_t seed) {
    Rng rng(seed);
    const SceneBounds bounds = kUnitCube;
    std::vector<Vec3> positions;
    std::vector<double> upstream;
    for (int i = 0; i < 40; ++i) {
        positions.push_back({rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95),
                             rng.uniform(0.05, 0.95)});
        upstream.push_back(rng.uniform(-1.0, 1.0));
    }
    std::vector<double> grad(field.param_count(), 0.0);
    field.backward(positions, upstream, grad);

    auto params = field.params();
    std::size_t checked = 0;
    std::size_t attempts = 0;
    double worst = 0.0;
    while (checked < n_params && attempts < 50 * n_params) {
        ++attempts;
        const std::size_t idx = static_cast<std::size_t>(rng.next_u64() % params.size());
        if (std::abs(grad[idx]) < 1e-9) continue;  // parameter untouched by these positions
        const double saved = params[idx];
        params[idx] = saved + h;
        const double hi = objective(field, positions, upstream);
        params[idx] = saved - h;
        const double lo = objective(field, positions, upstream);
        params[idx] = saved;
        const double fd = (hi - lo) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - grad[idx]) / std::max(std::abs(fd), 1e-12));
        ++checked;
    }
    REQUIRE(checked == n_params);
    CHECK(worst < tol);
}

}  // namespace

TEST_SUITE("scene-field") {

TEST_CASE("quadrature sampling") {
    SUBCASE("single cell midpoint") {
        const auto pts = sample_quadrature(kUnitCube, QuadratureRule::VoxelCenters, {1, 1, 1});
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].position.x == 0.5);
        CHECK(pts[0].position.y == 0.5);
        CHECK(pts[0].position.z == 0.5);
        CHECK(pts[0].weight == 1.0);
    }
    SUBCASE("2x2x2 cells") {
        const auto pts = sample_quadrature(kUnitCube, QuadratureRule::VoxelCenters, {2, 2, 2});
        REQUIRE(pts.size() == 8);
        for (const auto& p : pts) CHECK(p.weight == 0.125);
    }
    SUBCASE("weights sum to the domain volume") {
        const SceneBounds b({-0.2, 0.1, -0.4}, {0.5, 0.6, 0.0});
        for (auto rule : {QuadratureRule::VoxelCenters, QuadratureRule::StratifiedRandom}) {
            const auto pts = sample_quadrature(b, rule, {5, 3, 7}, 42);
            double total = 0.0;
            for (const auto& p : pts) {
                total += p.weight;
                CHECK(b.contains(p.position));
            }
            CHECK(total == doctest::Approx(b.volume()).epsilon(1e-12));
        }
    }
    SUBCASE("stratified draws are seed-deterministic") {
        const auto a = sample_quadrature(kUnitCube, QuadratureRule::StratifiedRandom, {4, 4, 4}, 9);
        const auto b = sample_quadrature(kUnitCube, QuadratureRule::StratifiedRandom, {4, 4, 4}, 9);
        const auto c = sample_quadrature(kUnitCube, QuadratureRule::StratifiedRandom, {4, 4, 4}, 10);
        bool differs = false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].position.x == b[i].position.x);
            CHECK(a[i].position.y == b[i].position.y);
            CHECK(a[i].position.z == b[i].position.z);
            differs |= a[i].position.x != c[i].position.x;
        }
        CHECK(differs);
    }
}

TEST_CASE("voxel grid queries") {
    SUBCASE("constant field is constant everywhere in bounds") {
        VoxelGridField field({0.0, 0.0, 0.0}, 0.25, {4, 4, 4});
        for (std::size_t i = 0; i < field.param_count(); ++i) field.set_cell_value(i, 0.7);
        Rng rng(1);
        for (int trial = 0; trial < 50; ++trial) {
            const Vec3 p{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
            CHECK(field.query_one(p) == doctest::Approx(0.7).epsilon(1e-12));
        }
    }
    SUBCASE("cell centers reproduce the stored value exactly") {
        VoxelGridField field({0.0, 0.0, 0.0}, 0.25, {4, 4, 4});
        Rng rng(2);
        for (std::size_t i = 0; i < field.param_count(); ++i)
            field.set_cell_value(i, rng.uniform(0.01, 2.0));
        for (std::size_t iz = 0; iz < 4; ++iz) {
            for (std::size_t iy = 0; iy < 4; ++iy) {
                for (std::size_t ix = 0; ix < 4; ++ix) {
                    const double q = field.query_one(field.cell_center(ix, iy, iz));
                    CHECK(q == field.cell_value(field.index(ix, iy, iz)));
                }
            }
        }
    }
    SUBCASE("out-of-bounds queries return zero") {
        VoxelGridField field({0.0, 0.0, 0.0}, 0.25, {4, 4, 4});
        CHECK(field.query_one({-0.01, 0.5, 0.5}) == 0.0);
        CHECK(field.query_one({0.5, 0.5, 1.01}) == 0.0);
    }
    SUBCASE("nonnegative output for arbitrary raw parameters") {
        VoxelGridField field({0.0, 0.0, 0.0}, 0.5, {2, 2, 2});
        Rng rng(3);
        auto params = field.params();
        for (auto& p : params) p = rng.uniform(-5.0, 5.0);
        for (int trial = 0; trial < 30; ++trial) {
            const Vec3 p{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
            CHECK(field.query_one(p) >= 0.0);
        }
    }
}

TEST_CASE("voxel grid backward") {
    SUBCASE("zero upstream gives zero gradient") {
        VoxelGridField field({0.0, 0.0, 0.0}, 0.25, {4, 4, 4});
        std::vector<double> grad(field.param_count(), 0.0);
        field.backward(std::vector<Vec3>{{0.3, 0.3, 0.3}}, std::vector<double>{0.0}, grad);
        for (double g : grad) CHECK(g == 0.0);
    }
    SUBCASE("center query touches exactly one cell") {
        VoxelGridField identity({0.0, 0.0, 0.0}, 0.25, {4, 4, 4}, OutputActivation::Identity,
                                0.5);
        std::vector<double> grad(identity.param_count(), 0.0);
        identity.backward(std::vector<Vec3>{identity.cell_center(2, 1, 3)},
                          std::vector<double>{1.0}, grad);
        for (std::size_t i = 0; i < grad.size(); ++i) {
            CHECK(grad[i] == (i == identity.index(2, 1, 3) ? 1.0 : 0.0));
        }
        // With the softplus parameterization the same query scales by the
        // activation derivative at that cell.
        VoxelGridField soft({0.0, 0.0, 0.0}, 0.25, {4, 4, 4});
        std::vector<double> grad_s(soft.param_count(), 0.0);
        soft.backward(std::vector<Vec3>{soft.cell_center(2, 1, 3)}, std::vector<double>{1.0},
                      grad_s);
        const double expected = sigmoid(soft.params()[soft.index(2, 1, 3)]);
        for (std::size_t i = 0; i < grad_s.size(); ++i) {
            CHECK(grad_s[i] == (i == soft.index(2, 1, 3) ? expected : 0.0));
        }
    }
    SUBCASE("linearity in the upstream vector") {
        VoxelGridField field({0.0, 0.0, 0.0}, 0.25, {4, 4, 4});
        Rng rng(4);
        std::vector<Vec3> pos;
        std::vector<double> u, v;
        for (int i = 0; i < 20; ++i) {
            pos.push_back({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
            u.push_back(rng.uniform(-1.0, 1.0));
            v.push_back(rng.uniform(-1.0, 1.0));
        }
        const double a = 1.7, b = -0.4;
        std::vector<double> gu(field.param_count(), 0.0), gv(field.param_count(), 0.0),
            gmix(field.param_count(), 0.0);
        field.backward(pos, u, gu);
        field.backward(pos, v, gv);
        std::vector<double> mix(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) mix[i] = a * u[i] + b * v[i];
        field.backward(pos, mix, gmix);
        for (std::size_t i = 0; i < gmix.size(); ++i) {
            CHECK(gmix[i] == doctest::Approx(a * gu[i] + b * gv[i]).epsilon(1e-12));
        }
    }
    SUBCASE("finite-difference agreement") {
        VoxelGridField field({0.0, 0.0, 0.0}, 0.125, {8, 8, 8});
        Rng rng(5);
        auto params = field.params();
        for (auto& p : params) p = rng.uniform(-2.0, 2.0);
        check_gradient(field, 1e-5, 50, 1e-5, 77);
    }
}

TEST_CASE("coordinate network field") {
    SUBCASE("zero head weights give a constant field") {
        CoordinateNetworkField field(kUnitCube, {16, 16}, 30.0, 1);
        const auto layers = field.layers();
        const auto& head = layers.back();
        auto params = field.params();
        // Head slice is [weights | bias]; bias is the last entry.
        for (std::size_t i = 0; i + 1 < head.size; ++i) params[head.offset + i] = 0.0;
        params[head.offset + head.size - 1] = 0.4;
        Rng rng(6);
        for (int trial = 0; trial < 20; ++trial) {
            const Vec3 p{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
            CHECK(field.query_one(p) == doctest::Approx(softplus(0.4)).epsilon(1e-14));
        }
    }
    SUBCASE("deterministic given a seed") {
        CoordinateNetworkField a(kUnitCube, {32, 32, 32}, 30.0, 11);
        CoordinateNetworkField b(kUnitCube, {32, 32, 32}, 30.0, 11);
        const auto pa = a.params();
        const auto pb = b.params();
        REQUIRE(pa.size() == pb.size());
        for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
    }
    SUBCASE("outputs are nonnegative; out-of-bounds is zero") {
        CoordinateNetworkField field(kUnitCube, {16, 16}, 30.0, 2);
        Rng rng(7);
        for (int trial = 0; trial < 30; ++trial) {
            const Vec3 p{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
            CHECK(field.query_one(p) >= 0.0);
        }
        CHECK(field.query_one({1.5, 0.5, 0.5}) == 0.0);
    }
    SUBCASE("zero upstream gives zero gradient") {
        CoordinateNetworkField field(kUnitCube, {8, 8}, 30.0, 3);
        std::vector<double> grad(field.param_count(), 0.0);
        field.backward(std::vector<Vec3>{{0.5, 0.5, 0.5}}, std::vector<double>{0.0}, grad);
        for (double g : grad) CHECK(g == 0.0);
    }
    SUBCASE("finite-difference agreement") {
        CoordinateNetworkField field(kUnitCube, {24, 24, 24}, 30.0, 4);
        check_gradient(field, 1e-6, 50, 1e-5, 88);
    }
    SUBCASE("directional derivative matches the gradient inner product") {
        CoordinateNetworkField field(kUnitCube, {16, 16}, 30.0, 5);
        Rng rng(8);
        std::vector<Vec3> pos;
        std::vector<double> up;
        for (int i = 0; i < 25; ++i) {
            pos.push_back({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
            up.push_back(rng.uniform(-1.0, 1.0));
        }
        std::vector<double> grad(field.param_count(), 0.0);
        field.backward(pos, up, grad);
        std::vector<double> dir(field.param_count());
        for (auto& d : dir) d = rng.uniform(-1.0, 1.0);
        double inner = 0.0;
        for (std::size_t i = 0; i < dir.size(); ++i) inner += dir[i] * grad[i];
        const double eps = 1e-6;
        auto params = field.params();
        std::vector<double> saved(params.begin(), params.end());
        for (std::size_t i = 0; i < dir.size(); ++i) params[i] = saved[i] + eps * dir[i];
        const double hi = objective(field, pos, up);
        for (std::size_t i = 0; i < dir.size(); ++i) params[i] = saved[i] - eps * dir[i];
        const double lo = objective(field, pos, up);
        for (std::size_t i = 0; i < dir.size(); ++i) params[i] = saved[i];
        CHECK((hi - lo) / (2.0 * eps) == doctest::Approx(inner).epsilon(1e-5));
    }
}

TEST_CASE("grid exports its activated values as a volume") {
    VoxelGridField field({0.1, 0.2, 0.3}, 0.25, {3, 2, 4});
    Rng rng(10);
    auto params = field.params();
    for (auto& p : params) p = rng.uniform(-2.0, 2.0);
    const Volume vol = field.to_volume();
    CHECK(vol.dims == field.dims());
    CHECK(vol.voxel_size == field.voxel_size());
    for (std::size_t i = 0; i < vol.intensities.size(); ++i) {
        CHECK(vol.intensities[i] == field.cell_value(i));
        CHECK(vol.intensities[i] >= 0.0);
    }
}

TEST_CASE("sharded backward matches direct accumulation") {
    VoxelGridField field({0.0, 0.0, 0.0}, 0.125, {8, 8, 8});
    Rng rng(9);
    auto params = field.params();
    for (auto& p : params) p = rng.uniform(-1.0, 1.0);
    std::vector<Vec3> pos;
    std::vector<double> up;
    for (int i = 0; i < 5000; ++i) {
        pos.push_back({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
        up.push_back(rng.uniform(-1.0, 1.0));
    }
    std::vector<double> direct(field.param_count(), 0.0), sharded(field.param_count(), 0.0);
    field.backward(pos, up, direct);
    set_thread_count(2);
    backward_sharded(field, pos, up, sharded);
    set_thread_count(0);
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(sharded[i] == doctest::Approx(direct[i]).epsilon(1e-11));
    }
}

}  // TEST_SUITE
