#pragma once

#include <cstdint>

#include "isoflow/basis.hpp"
#include "isoflow/laplacian.hpp"
#include "isoflow/types.hpp"

namespace isoflow {

/// State advanced by the time steppers.
struct SimState {
    CMatrix W;                    ///< vorticity matrix, su(N)
    CMatrix F;                    ///< Coriolis matrix 2 Omega iT_10 (may be zero)
    std::int64_t step = 0;
    double h = 0.1;               ///< dimensionless step
    double seconds_per_step = 0;  ///< real-time scale, from time_scale()
};

struct StepperOptions {
    double tol = 1e-13;  ///< fixed-point residual tolerance for IsoMP
    int max_iters = 50;
};

/// Isospectral midpoint rule. Solves the implicit stage by (damped)
/// fixed-point iteration from Wtilde = W_n; throws NonConvergence when the
/// residual cannot be brought under tol within max_iters.
void isomp_step(SimState& s, const LaplacianOperator& L, const StepperOptions& opt);

/// Explicit Heun step: two matrix products and two Poisson solves.
void heun_step(SimState& s, const LaplacianOperator& L);

/// Real seconds per unit step: h sqrt(16 pi) / (N^{3/2} |W0|_F).
double time_scale(int N, double h, double norm_W0);

/// Re-projection onto su(N): W <- (W - W^dagger)/2 - Tr(W) I / N.
void project_su(CMatrix& W);

/// Conserved-quantity snapshot.
struct Diagnostics {
    double t = 0;       ///< real seconds
    double H = 0;       ///< 1/2 Tr(Delta^{-1}(W-F)(W-F)^dagger)
    double C2 = 0;      ///< enstrophy  Tr((-iW)^2) = |W|_F^2
    double C3 = 0;      ///< Tr((-iW)^3)
    double C4 = 0;      ///< Tr((-iW)^4)
    Vec3 L = Vec3::Zero();
    double gamma = 0;   ///< |L| / sqrt(C2); 0 when C2 = 0
};

Diagnostics compute_diagnostics(const CMatrix& W, const CMatrix& F, const LaplacianOperator& L,
                                const QuantBasis& basis, double t);

/// Total angular momentum from the l = 1 coefficients.
Vec3 momentum_from_coeffs(const SpectralCoeffs& c);

/// Imaginary parts of eig(W), sorted ascending (W skew-Hermitian).
std::vector<double> spectrum_imag_sorted(const CMatrix& W);

}  // namespace isoflow
