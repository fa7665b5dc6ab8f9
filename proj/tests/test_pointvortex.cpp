#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "isoflow/pointvortex.hpp"

using namespace isoflow;

namespace {

PointVortexState reference_state() {
    const std::vector<double> phi{2.3218, -0.9638, -2.5283, 0.8511};
    const std::vector<double> theta{1.3017, 1.8837, 1.577, 1.5896};
    const std::vector<double> gamma{1.0, 0.9002, -0.5436, -0.4178};
    PointVortexState s;
    for (int i = 0; i < 4; ++i)
        s.x.emplace_back(std::sin(theta[i]) * std::cos(phi[i]), std::sin(theta[i]) * std::sin(phi[i]),
                         std::cos(theta[i]));
    s.gamma = gamma;
    return s;
}

PointVortexState random_state(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PointVortexState s;
    for (int i = 0; i < n; ++i) {
        Vec3 x(u(rng), u(rng), u(rng));
        while (x.norm() < 0.1) x = Vec3(u(rng), u(rng), u(rng));
        s.x.push_back(x.normalized());
        s.gamma.push_back(u(rng) * 2.0);
    }
    return s;
}

}  // namespace

TEST_CASE("single vortex does not move") {
    PointVortexState s;
    s.x = {Vec3(0, 0, 1)};
    s.gamma = {1.0};
    CHECK(pv_rhs(s)[0].norm() == 0.0);
    PointVortexState s2 = s;
    pv_step(s2, 0.1);
    CHECK((s2.x[0] - s.x[0]).norm() == 0.0);
}

TEST_CASE("antipodal pair is static with finite energy") {
    PointVortexState s;
    s.x = {Vec3(0, 0, 1), Vec3(0, 0, -1)};
    s.gamma = {1.0, -1.0};
    const auto v = pv_rhs(s);
    CHECK(v[0].norm() <= 1e-16);
    CHECK(v[1].norm() <= 1e-16);
    const PVInvariants inv = pv_invariants(s);
    CHECK(inv.H == doctest::Approx(std::log(2.0) / (4 * std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("velocities are tangent") {
    const PointVortexState s = random_state(6, 3);
    const auto v = pv_rhs(s);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(v[i].dot(s.x[i])) <= 1e-14);
}

TEST_CASE("collision guard") {
    PointVortexState s;
    s.x = {Vec3(0, 0, 1), Vec3(1e-7, 0, 1).normalized()};
    s.gamma = {1.0, 1.0};
    CHECK_THROWS_AS(pv_rhs(s), Collision);
    CHECK_THROWS_AS(pv_invariants(s), Collision);
}

TEST_CASE("two vortices rotate rigidly about their momentum") {
    PointVortexState s;
    s.x = {Vec3(1, 0, 0), Vec3(0, 1, 0).cross(Vec3(0.3, 0, 1)).normalized()};
    s.gamma = {1.0, 0.7};
    const Vec3 axis = (s.gamma[0] * s.x[0] + s.gamma[1] * s.x[1]).normalized();
    const double a0 = std::acos(s.x[0].dot(axis)), a1 = std::acos(s.x[1].dot(axis));
    for (int k = 0; k < 10000; ++k) {
        pv_step(s, 0.02);
        if (k % 1000 == 0) {
            CHECK(std::acos(s.x[0].dot(axis)) == doctest::Approx(a0).epsilon(1e-10));
            CHECK(std::acos(s.x[1].dot(axis)) == doctest::Approx(a1).epsilon(1e-10));
        }
    }
    CHECK(std::acos(s.x[0].dot(axis)) == doctest::Approx(a0).epsilon(1e-10));
}

TEST_CASE("strength recovery from the reference positions") {
    const PointVortexState ref = reference_state();
    const std::vector<double> g = strengths_from_positions(ref.x);
    CHECK(g[0] == 1.0);
    CHECK(std::abs(g[1] - 0.9002) <= 1e-3);
    CHECK(std::abs(g[2] + 0.5436) <= 1e-3);
    CHECK(std::abs(g[3] + 0.4178) <= 1e-3);
    Vec3 L = Vec3::Zero();
    for (int i = 0; i < 4; ++i) L += g[i] * ref.x[i];
    CHECK(L.norm() <= 1e-10);
}

TEST_CASE("tetrahedral positions give equal strength magnitudes") {
    const double r = 1.0 / std::sqrt(3.0);
    std::vector<Vec3> x{Vec3(r, r, r), Vec3(r, -r, -r), Vec3(-r, r, -r), Vec3(-r, -r, r)};
    const std::vector<double> g = strengths_from_positions(x);
    for (double v : g) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate position systems are rejected") {
    std::vector<Vec3> x{Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    CHECK_THROWS_AS(strengths_from_positions(x), DegenerateConfiguration);
    CHECK_THROWS_AS(strengths_from_positions({Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 1, 0)}), std::invalid_argument);
}

TEST_CASE("H generates the velocity field (finite differences)") {
    const PointVortexState s = random_state(5, 9);
    const auto v = pv_rhs(s);
    const double eps = 1e-6;
    for (std::size_t i = 0; i < s.size(); ++i) {
        Vec3 grad;
        for (int a = 0; a < 3; ++a) {
            PointVortexState sp = s, sm = s;
            sp.x[i][a] += eps;
            sm.x[i][a] -= eps;
            grad[a] = (pv_invariants(sp).H - pv_invariants(sm).H) / (2 * eps);
        }
        const Vec3 expect = grad.cross(s.x[i]) / s.gamma[i];
        CHECK((v[i] - expect).norm() <= 1e-6 * (1.0 + v[i].norm()));
    }
}

TEST_CASE("equivariance under rotations") {
    const PointVortexState s = random_state(4, 21);
    const double ang = 0.7;
    Eigen::Matrix3d R;
    R = Eigen::AngleAxisd(ang, Vec3(1, 2, -1).normalized());
    PointVortexState sr = s;
    for (auto& x : sr.x) x = (R * x).eval();
    const auto v = pv_rhs(s), vr = pv_rhs(sr);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK((vr[i] - R * v[i]).norm() <= 1e-13);
}

TEST_CASE("midpoint conserves the invariants") {
    PointVortexState s = reference_state();
    const PVInvariants i0 = pv_invariants(s);
    for (int k = 0; k < 10000; ++k) pv_step(s, 1e-3);
    const PVInvariants i1 = pv_invariants(s);
    CHECK(std::abs(i1.H - i0.H) <= 1e-8);
    CHECK((i1.L - i0.L).norm() <= 1e-10);
    for (const Vec3& x : s.x) CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("time reversal") {
    PointVortexState s = reference_state();
    const PointVortexState s0 = s;
    for (int k = 0; k < 200; ++k) pv_step(s, 0.01);
    for (int k = 0; k < 200; ++k) pv_step(s, -0.01);
    double dev = 0;
    for (std::size_t i = 0; i < s.size(); ++i) dev = std::max(dev, (s.x[i] - s0.x[i]).norm());
    CHECK(dev <= 1e-11);
}

TEST_CASE("absurd step sizes fail loudly") {
    PointVortexState s = reference_state();
    // either the iteration stalls (NonConvergence) or iterates collide
    CHECK_THROWS_AS(pv_step(s, 1e5, 1e-13, 20), std::runtime_error);
}
