#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "isoflow/types.hpp"

namespace isoflow {

/// Quantized spherical-harmonic basis T^N_lm on su(N).
///
/// Each T^N_lm is real with a single nonzero diagonal: the m-th superdiagonal
/// for m >= 0, and its entries for m < 0 follow from the adjoint symmetry
/// (T_lm)^dagger = (-1)^m T_{l,-m}. Only m >= 0 diagonals are stored.
///
/// Index convention: matrix row i (0-based) carries weight M = s - i with
/// s = (N-1)/2, so entry (k, k+m) of T_lm pairs weights (s-k, s-k-m).
///
/// Entries follow the convention (T_lm)_{M1,M2} = (-1)^(s-M1) sqrt(2l+1) *
/// wigner3j(s,l,s; -M1,m,M2). They are generated from the closed-form m = l
/// diagonal by repeated application of the su(2) lowering ladder, which is
/// stable for spins far beyond the reach of factorial sums.
class QuantBasis {
  public:
    /// Build all diagonals for 1 <= l <= N-1, 0 <= m <= l. N >= 2 required.
    static QuantBasis build(int N);

    int N() const { return N_; }
    int l_max() const { return N_ - 1; }

    /// Nonzero diagonal of T^N_lm for m >= 0; length N - m.
    std::span<const double> diagonal(int l, int m) const {
        return {data_.data() + offset(l, m), std::size_t(N_ - m)};
    }

    /// T_10 = t10 * diag(M), M = s..-s. Used for the Coriolis matrix and
    /// for the phase rates of quantized Rossby-Haurwitz waves.
    double t10_coefficient() const;

    void save_cache(const std::filesystem::path& file) const;
    static QuantBasis load_cache(const std::filesystem::path& file);

  private:
    QuantBasis() = default;
    std::size_t offset(int l, int m) const;

    int N_ = 0;
    std::vector<double> data_;
    std::vector<std::size_t> off_;  // per (l,m>=0) pair
};

/// W = sum_{l,m} w^{lm} * (i T^N_lm). Requires c.l_max() <= N-1 and the
/// reality constraint on c (the result is then skew-Hermitian traceless).
CMatrix coeffs_to_matrix(const SpectralCoeffs& c, const QuantBasis& basis);

/// w^{lm} = <i T^N_lm, W>_F (conjugate-linear in the first slot), for all
/// l <= l_max. Works for any N x N complex W.
SpectralCoeffs matrix_to_coeffs(const CMatrix& W, const QuantBasis& basis, int l_max);

}  // namespace isoflow
