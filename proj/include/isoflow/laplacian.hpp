#pragma once

#include <vector>

#include "isoflow/types.hpp"

namespace isoflow {

/// Quantized Laplace-Beltrami operator Delta_N on N x N matrices.
///
/// The componentwise formula couples entry (M1,M2) only to (M1 +- 1, M2 +- 1),
/// so the operator is block-diagonal over matrix diagonals: one symmetric
/// tridiagonal block per diagonal offset, identical for +-d. Blocks satisfy
/// Delta_N T_lm = -l(l+1) T_lm; the d = 0 block is singular on the identity
/// direction and is regularized by the convention Delta_N I = I.
///
/// Each block is factorized once (LDL^T, pivot-free); apply and solve are
/// O(N^2) over the whole matrix. Immutable after construction.
class LaplacianOperator {
  public:
    static LaplacianOperator build(int N);

    int N() const { return N_; }

    /// Delta_N W.
    CMatrix apply(const CMatrix& W) const;

    /// Delta_N^{-1} W: the Poisson solve. Traceless part inverted exactly;
    /// the identity component maps to itself.
    CMatrix solve(const CMatrix& W) const;

    // allocation-free variants (out must be N x N; may not alias W)
    void apply_into(const CMatrix& W, CMatrix& out) const;
    void solve_into(const CMatrix& W, CMatrix& out) const;

    // raw column-major N x N buffers, entry (i,j) at p[j*N + i]
    void apply_into(const cplx* W, cplx* out) const;
    void solve_into(const cplx* W, cplx* out) const;

  private:
    LaplacianOperator() = default;

    struct Block {
        std::vector<double> diag, offd;  // H_d, positive semidefinite (definite for d >= 1)
        std::vector<double> fd, fl;      // LDL^T factors (d = 0: leading principal part)
    };

    void apply_block_inplace(int d, cplx* v) const;
    void solve_block_inplace(int d, cplx* v) const;
    void run_banded(const cplx* W, cplx* out, bool apply_mode) const;

    int N_ = 0;
    std::vector<Block> blocks_;  // index by |d|
};

}  // namespace isoflow
