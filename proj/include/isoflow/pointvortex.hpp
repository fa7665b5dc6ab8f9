#pragma once

#include <vector>

#include "isoflow/types.hpp"

namespace isoflow {

/// N point vortices on the unit sphere.
struct PointVortexState {
    std::vector<Vec3> x;          ///< unit positions
    std::vector<double> gamma;    ///< strengths
    std::size_t size() const { return x.size(); }
};

constexpr double kCollisionGuard = 1e-10;

/// dx_i/dt = (1/4pi) sum_{j != i} Gamma_j (x_j x x_i) / (1 - x_i . x_j).
/// Throws Collision when 1 - x_i . x_j <= delta_min for some pair.
std::vector<Vec3> pv_rhs(const PointVortexState& s, double delta_min = kCollisionGuard);

/// One implicit-midpoint step on the embedded coordinates followed by
/// renormalization of each position to the sphere.
void pv_step(PointVortexState& s, double h, double tol = 1e-13, int max_iters = 100);

/// Solves sum Gamma_i x_i = 0 with Gamma_1 = 1 (exact 3x3 solve for n = 4,
/// least squares for n > 4). Throws DegenerateConfiguration when the system
/// is rank-deficient.
std::vector<double> strengths_from_positions(const std::vector<Vec3>& x);

struct PVInvariants {
    double H = 0;  ///< -(1/4pi) sum_{i<j} Gamma_i Gamma_j log(1 - x_i . x_j)
    Vec3 L = Vec3::Zero();
};

PVInvariants pv_invariants(const PointVortexState& s, double delta_min = kCollisionGuard);

}  // namespace isoflow
