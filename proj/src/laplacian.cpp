#include "isoflow/laplacian.hpp"

#include <cmath>

namespace isoflow {

namespace {

constexpr double kPivotFloor = 1e-14;

// scratch for the banded diagonal packing; solves are read-only and may run
// concurrently, so the buffers are per thread
thread_local std::vector<cplx> tl_buf;
thread_local std::vector<std::size_t> tl_off;

}  // namespace

LaplacianOperator LaplacianOperator::build(int N) {
    if (N < 2) throw std::invalid_argument("LaplacianOperator: N must be >= 2");
    LaplacianOperator L;
    L.N_ = N;
    L.blocks_.resize(N);
    const double s = (N - 1) / 2.0;
    const double ss = s * (s + 1);

    for (int d = 0; d < N; ++d) {
        Block& b = L.blocks_[d];
        const int n = N - d;
        b.diag.resize(n);
        b.offd.assign(std::size_t(std::max(0, n - 1)), 0.0);
        for (int k = 0; k < n; ++k) {
            const double M1 = s - k, M2 = s - k - d;
            b.diag[k] = 2.0 * (ss - M1 * M2);
            if (k + 1 < n) b.offd[k] = -std::sqrt(ss - M1 * (M1 - 1)) * std::sqrt(ss - M2 * (M2 - 1));
        }
        // LDL^T; only the leading n-1 pivots for d = 0 (block is singular on
        // the all-ones vector, solved on its complement)
        const int nf = (d == 0) ? n - 1 : n;
        b.fd.resize(nf);
        b.fl.assign(std::size_t(std::max(0, nf - 1)), 0.0);
        double piv = 0.0;
        for (int k = 0; k < nf; ++k) {
            piv = b.diag[k] - (k > 0 ? b.fl[k - 1] * b.fl[k - 1] * b.fd[k - 1] : 0.0);
            if (std::abs(piv) < kPivotFloor)
                throw std::logic_error("LaplacianOperator: vanishing pivot, index convention broken");
            b.fd[k] = piv;
            if (k + 1 < nf) b.fl[k] = b.offd[k] / piv;
        }
    }

    return L;
}

void LaplacianOperator::apply_block_inplace(int d, cplx* v) const {
    const Block& b = blocks_[d];
    const int n = N_ - d;
    // Delta = -H per diagonal; one sweep with register carry so v may alias
    if (d == 0) {
        // Delta I = I: the -H part drops the identity component, add it back
        cplx mean(0.0);
        for (int k = 0; k < n; ++k) mean += v[k];
        mean /= double(n);
        cplx prev(0.0);
        for (int k = 0; k < n; ++k) {
            const cplx cur = v[k];
            cplx acc = b.diag[k] * cur;
            if (k > 0) acc += b.offd[k - 1] * prev;
            if (k + 1 < n) acc += b.offd[k] * v[k + 1];
            v[k] = mean - acc;
            prev = cur;
        }
        return;
    }
    cplx prev(0.0);
    for (int k = 0; k < n; ++k) {
        const cplx cur = v[k];
        cplx acc = b.diag[k] * cur;
        if (k > 0) acc += b.offd[k - 1] * prev;
        if (k + 1 < n) acc += b.offd[k] * v[k + 1];
        v[k] = -acc;
        prev = cur;
    }
}

void LaplacianOperator::solve_block_inplace(int d, cplx* v) const {
    const Block& b = blocks_[d];
    const int n = N_ - d;
    if (d > 0) {
        // H y = -v via the LDL^T sweeps
        v[0] = -v[0];
        for (int k = 1; k < n; ++k) v[k] = -v[k] - b.fl[k - 1] * v[k - 1];
        for (int k = 0; k < n; ++k) v[k] /= b.fd[k];
        for (int k = n - 2; k >= 0; --k) v[k] -= b.fl[k] * v[k + 1];
        return;
    }
    // d = 0: split off the identity component (mean), solve H y = -(v - mean)
    // on the complement with y_{n-1} = 0, re-project, add the mean back
    cplx mean(0.0);
    for (int k = 0; k < n; ++k) mean += v[k];
    mean /= double(n);
    const int nf = n - 1;
    for (int k = 0; k < nf; ++k) v[k] = -(v[k] - mean);
    for (int k = 1; k < nf; ++k) v[k] -= b.fl[k - 1] * v[k - 1];
    for (int k = 0; k < nf; ++k) v[k] /= b.fd[k];
    for (int k = nf - 2; k >= 0; --k) v[k] -= b.fl[k] * v[k + 1];
    v[n - 1] = cplx(0.0);
    cplx ymean(0.0);
    for (int k = 0; k < nf; ++k) ymean += v[k];
    ymean /= double(n);
    for (int k = 0; k < n; ++k) v[k] += mean - ymean;
}

// The diagonal blocks are independent, so the matrix is processed in bands
// of adjacent diagonals whose packed scratch stays cache-resident at any N;
// each column contributes one contiguous run of rows per band, so the input
// and output are streamed exactly once per call.
void LaplacianOperator::run_banded(const cplx* W, cplx* out, bool apply_mode) const {
    const int N = N_;
    const int width = std::max(2, (1 << 13) / N);
    tl_buf.resize(std::size_t(width + 1) * N);
    cplx* buf = tl_buf.data();
    tl_off.resize(std::size_t(width) + 1);
    std::size_t* loff = tl_off.data();

    for (int dlo = -(N - 1); dlo <= N - 1; dlo += width) {
        const int dhi = std::min(dlo + width - 1, N - 1);
        loff[0] = 0;
        for (int d = dlo; d <= dhi; ++d) loff[d - dlo + 1] = loff[d - dlo] + std::size_t(N - std::abs(d));
        for (int j = 0; j < N; ++j) {
            const cplx* col = W + std::size_t(j) * N;
            const int ilo = std::max(0, j - dhi), ihi = std::min(N - 1, j - dlo);
            for (int i = ilo; i <= ihi; ++i) buf[loff[j - i - dlo] + std::min(i, j)] = col[i];
        }
        for (int d = dlo; d <= dhi; ++d) {
            if (apply_mode)
                apply_block_inplace(std::abs(d), buf + loff[d - dlo]);
            else
                solve_block_inplace(std::abs(d), buf + loff[d - dlo]);
        }
        for (int j = 0; j < N; ++j) {
            cplx* col = out + std::size_t(j) * N;
            const int ilo = std::max(0, j - dhi), ihi = std::min(N - 1, j - dlo);
            for (int i = ilo; i <= ihi; ++i) col[i] = buf[loff[j - i - dlo] + std::min(i, j)];
        }
    }
}

void LaplacianOperator::apply_into(const cplx* W, cplx* out) const { run_banded(W, out, true); }

void LaplacianOperator::solve_into(const cplx* W, cplx* out) const { run_banded(W, out, false); }

void LaplacianOperator::apply_into(const CMatrix& W, CMatrix& out) const {
    if (W.rows() != N_ || W.cols() != N_) throw std::invalid_argument("LaplacianOperator::apply: dimension mismatch");
    out.resize(N_, N_);
    apply_into(W.data(), out.data());
}

void LaplacianOperator::solve_into(const CMatrix& W, CMatrix& out) const {
    if (W.rows() != N_ || W.cols() != N_) throw std::invalid_argument("LaplacianOperator::solve: dimension mismatch");
    out.resize(N_, N_);
    solve_into(W.data(), out.data());
}

CMatrix LaplacianOperator::apply(const CMatrix& W) const {
    CMatrix R;
    apply_into(W, R);
    return R;
}

CMatrix LaplacianOperator::solve(const CMatrix& W) const {
    CMatrix R;
    solve_into(W, R);
    return R;
}

}  // namespace isoflow
