#pragma once

#include <cstdint>
#include <filesystem>
#include <map>

#include "isoflow/basis.hpp"
#include "isoflow/types.hpp"

namespace isoflow {

/// Isotropic Gaussian random field on L^2(S^2): w^{lm} l^{1+eps} ~ N(0,1).
struct RandomFieldParams {
    std::uint64_t seed = 0;
    double eps = 0.01;
    int l_max = 1;
};

/// Draws the random coefficients (m = 0 real N(0,1); m > 0 complex with
/// independent N(0,1/2) parts; m < 0 by reality) and normalizes the set to
/// unit Frobenius norm. Deterministic for a given seed.
SpectralCoeffs sample_l2_random(const RandomFieldParams& p);

/// Zeroes the l = 1 coefficients; the resulting field has L = 0 exactly.
SpectralCoeffs zero_momentum_projection(SpectralCoeffs c);

/// Sum of Gaussian bumps exp(-width |x - x_i|^2) with strengths Gamma_i,
/// corrected to zero mean and zero momentum. Distances are chordal (the
/// centers and evaluation points live in R^3).
struct BlobSpec {
    std::vector<Vec3> centers;
    std::vector<double> strengths;
    double width = 20.0;
};

/// Projects the corrected blob field onto harmonics up to l_max = N-1 using
/// Gauss-Legendre x uniform quadrature of size 2(N+1) x 4(N+1).
SpectralCoeffs gaussian_blobs(const BlobSpec& spec, int N);

/// Blob file: optional "width = a" header line, then CSV rows phi,theta,gamma.
BlobSpec load_blob_csv(const std::filesystem::path& file);

/// Quantized Rossby-Haurwitz wave. The initial state is
///   W(0) = C F + zonal * iT_10 + sum_m amplitudes[m] * iT_lm,
/// F = 2 Omega iT_10, and W(t) conjugates the l-multiplet by phase factors
/// exp(i m mu t10 t) along its diagonals, where
///   mu = 2 Omega alpha_l + zonal (1/(l(l+1)) - 1/2),
///   alpha_l = (2C/(l(l+1)) - C + 1)/2.
/// This is the exact solution of dW/dt = [Delta^{-1}(W - F), W]; the zonal
/// term contributes an extra rigid rotation on top of the classical alpha_l
/// rate. Amplitudes must satisfy the reality constraint.
struct RHWaveSpec {
    double C = 1.0;
    double Omega = 0.0;
    int l = 1;
    std::map<int, cplx> amplitudes;  // m -> W^{lm}
    double zonal = 0.0;              // extra W^{10}
};

CMatrix rh_wave(const RHWaveSpec& spec, const QuantBasis& basis, double t);

/// Coefficients of W(t) for the same wave (cheap; no matrix assembly).
SpectralCoeffs rh_wave_coeffs(const RHWaveSpec& spec, const QuantBasis& basis, double t);

/// Coriolis matrix F = 2 Omega iT_10 (zero matrix when Omega = 0).
CMatrix coriolis_matrix(double Omega, const QuantBasis& basis);

}  // namespace isoflow
