#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace isoflow {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;

/// Thrown when an implicit solver fails to reach its tolerance.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when two point vortices come closer than the collision guard.
struct Collision : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a linear system for vortex strengths is rank-deficient.
struct DegenerateConfiguration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Spherical-harmonic coefficients of a real zero-mean field on the sphere.
///
/// Stores w^{lm} for 1 <= l <= l_max, -l <= m <= l. A real field satisfies
/// conj(w^{lm}) = (-1)^m w^{l,-m}; nothing here enforces that, but samplers
/// and analysis routines produce coefficients obeying it.
class SpectralCoeffs {
  public:
    SpectralCoeffs() = default;
    explicit SpectralCoeffs(int l_max) : l_max_(l_max), a_(std::size_t(l_max) * (l_max + 2), cplx(0.0)) {
        if (l_max < 1) throw std::invalid_argument("SpectralCoeffs: l_max must be >= 1");
    }

    int l_max() const { return l_max_; }

    cplx& at(int l, int m) { return a_[index(l, m)]; }
    cplx at(int l, int m) const { return a_[index(l, m)]; }

    /// sqrt(sum |w^{lm}|^2); equals the Frobenius norm of the quantized matrix.
    double norm() const {
        double s = 0.0;
        for (const cplx& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    void scale(double c) {
        for (cplx& v : a_) v *= c;
    }

    std::size_t size() const { return a_.size(); }
    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

  private:
    std::size_t index(int l, int m) const {
        if (l < 1 || l > l_max_ || m < -l || m > l) throw std::out_of_range("SpectralCoeffs: bad (l,m)");
        return std::size_t(l) * l - 1 + (m + l);
    }

    int l_max_ = 0;
    std::vector<cplx> a_;
};

}  // namespace isoflow
