#pragma once

#include <functional>
#include <span>
#include <vector>

#include "isoflow/types.hpp"

namespace isoflow {

/// Gauss-Legendre nodes (ascending in x = cos(theta)) and weights on [-1,1].
struct QuadRule {
    std::vector<double> x, w;
};
QuadRule gauss_legendre(int n);

/// Fully normalized associated Legendre functions Pbar_{l,m}(x) including the
/// Condon-Shortley phase, so Y_lm = Pbar_{l,m}(cos theta) e^{i m phi} and
/// int |Y_lm|^2 = 1. Fills out[l - m] for l = m..l_max. Seeds are carried with
/// a separate binary exponent so high-m columns do not underflow prematurely.
void legendre_normalized(int m, int l_max, double x, std::span<double> out);

/// Real scalar field sampled on a regular (theta-major) lat-lon grid.
/// theta_i = pi (i + 1/2) / n_theta, phi_j = 2 pi j / n_phi.
struct FieldRaster {
    int n_phi = 0, n_theta = 0;
    double t = 0.0;
    std::vector<double> vals;  // vals[i * n_phi + j]

    double& at(int i, int j) { return vals[std::size_t(i) * n_phi + j]; }
    double at(int i, int j) const { return vals[std::size_t(i) * n_phi + j]; }
    double theta(int i) const;
    double phi(int j) const;
};

/// Direct synthesis omega(phi,theta) = sum w^{lm} Y_lm on the raster grid.
FieldRaster synthesize_raster(const SpectralCoeffs& c, int n_phi, int n_theta);

/// Point evaluation of sum w^{lm} Y_lm (used by oracles and small probes).
double synthesize_point(const SpectralCoeffs& c, double phi, double theta);

/// Spherical-harmonic analysis of a real field by Gauss-Legendre x uniform
/// phi quadrature; exact for fields band-limited to degree <= l_max when
/// n_theta >= l_max + 1 and n_phi >= 2 l_max + 1.
SpectralCoeffs analyze_field(const std::function<double(double phi, double theta)>& f, int l_max, int n_theta,
                             int n_phi);

}  // namespace isoflow
