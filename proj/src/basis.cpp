#include "isoflow/basis.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <Eigen/Eigenvalues>

namespace isoflow {

namespace {

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

// lowering ladder entry: J_- has (J_-)_{j+1,j} = dcoef(j), weights M_j = s - j
inline double dcoef(double s, int j) {
    const double M = s - j;
    return std::sqrt(s * (s + 1) - M * (M - 1));
}

constexpr char kCacheMagic[4] = {'Z', 'S', 'B', '1'};

}  // namespace

std::size_t QuantBasis::offset(int l, int m) const {
    if (l < 1 || l > N_ - 1 || m < 0 || m > l) throw std::out_of_range("QuantBasis: bad (l,m)");
    // pairs ordered l = 1..N-1, m = 0..l
    const std::size_t pair = std::size_t(l) * (l + 1) / 2 + m - 1;
    return off_[pair];
}

QuantBasis QuantBasis::build(int N) {
    if (N < 2) throw std::invalid_argument("QuantBasis: N must be >= 2");
    QuantBasis b;
    b.N_ = N;

    std::size_t total = 0;
    b.off_.resize(std::size_t(N - 1) * (N + 2) / 2);
    for (int l = 1; l <= N - 1; ++l)
        for (int m = 0; m <= l; ++m) {
            b.off_[std::size_t(l) * (l + 1) / 2 + m - 1] = total;
            total += std::size_t(N - m);
        }
    b.data_.assign(total, 0.0);

    const double s = (N - 1) / 2.0, ss = s * (s + 1);

    // The diagonals of T_lm for fixed m are the eigenvectors of the m-offset
    // block of the quantized Laplacian, with eigenvalues l(l+1). Tridiagonal
    // eigendecomposition gives them orthonormal to machine precision; signs
    // are then pinned to the 3j convention below.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    for (int m = 0; m <= N - 1; ++m) {
        const int n = N - m;
        Eigen::VectorXd diag(n), offd(std::max(0, n - 1));
        for (int k = 0; k < n; ++k) {
            const double M1 = s - k, M2 = s - k - m;
            diag(k) = 2.0 * (ss - M1 * M2);
            if (k + 1 < n) offd(k) = -std::sqrt(ss - M1 * (M1 - 1)) * std::sqrt(ss - M2 * (M2 - 1));
        }
        es.computeFromTridiagonal(diag, offd);
        if (es.info() != Eigen::Success) throw std::runtime_error("QuantBasis: tridiagonal eigensolver failed");
        // ascending eigenvalues l(l+1) with l = m..N-1; the m = 0 block also
        // carries the l = 0 identity direction, which is skipped
        for (int l = std::max(1, m); l <= N - 1; ++l) {
            const auto col = es.eigenvectors().col(l - m);
            double* dst = b.data_.data() + b.offset(l, m);
            for (int k = 0; k < n; ++k) dst[k] = col(k);
        }
    }

    // Sign conventions. The m = l seed is the sign-definite ground state of
    // its block and carries the overall sign (-1)^l; each lowering
    // [J_-, T_{l,m+1}] = sqrt((l+m+1)(l-m)) T_{l,m} then fixes the next sign.
    std::vector<double> low;
    for (int l = 1; l <= N - 1; ++l) {
        {
            double* v = b.data_.data() + b.offset(l, l);
            const int n = N - l;
            int peak = 0;
            for (int k = 1; k < n; ++k)
                if (std::abs(v[k]) > std::abs(v[peak])) peak = k;
            const double want = (l % 2) ? -1.0 : 1.0;
            if (v[peak] * want < 0)
                for (int k = 0; k < n; ++k) v[k] = -v[k];
        }
        for (int m = l - 1; m >= 0; --m) {
            const double* prev = b.data_.data() + b.offset(l, m + 1);
            double* v = b.data_.data() + b.offset(l, m);
            const int n = N - m;
            low.assign(n, 0.0);
            for (int k = 0; k < n; ++k) {
                double acc = 0.0;
                if (k >= 1) acc += dcoef(s, k - 1) * prev[k - 1];
                if (k < n - 1) acc -= dcoef(s, k + m) * prev[k];
                low[k] = acc;
            }
            double dot = 0.0;
            for (int k = 0; k < n; ++k) dot += low[k] * v[k];
            if (dot < 0)
                for (int k = 0; k < n; ++k) v[k] = -v[k];
        }
    }
    return b;
}

double QuantBasis::t10_coefficient() const {
    const double s = (N_ - 1) / 2.0;
    return std::sqrt(3.0 / (s * (s + 1) * (2 * s + 1)));
}

void QuantBasis::save_cache(const std::filesystem::path& file) const {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open basis cache for writing: " + file.string());
    os.write(kCacheMagic, 4);
    const std::uint32_t n = N_;
    os.write(reinterpret_cast<const char*>(&n), 4);
    // (l ascending, m ascending over -l..l); m < 0 from the adjoint symmetry
    std::vector<double> buf;
    for (int l = 1; l <= N_ - 1; ++l) {
        for (int m = -l; m <= l; ++m) {
            const auto d = diagonal(l, std::abs(m));
            const double sgn = (m < 0 && (m % 2)) ? -1.0 : 1.0;
            buf.assign(d.size() * 2, 0.0);
            for (std::size_t k = 0; k < d.size(); ++k) buf[2 * k] = sgn * d[k];
            os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size() * sizeof(double)));
        }
    }
    if (!os) throw std::runtime_error("write failed: " + file.string());
}

QuantBasis QuantBasis::load_cache(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open basis cache: " + file.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kCacheMagic, 4) != 0) throw std::runtime_error("bad basis cache magic: " + file.string());
    std::uint32_t n = 0;
    is.read(reinterpret_cast<char*>(&n), 4);
    if (!is || n < 2) throw std::runtime_error("bad basis cache header: " + file.string());

    QuantBasis b;
    b.N_ = int(n);
    std::size_t total = 0;
    b.off_.resize(std::size_t(n - 1) * (n + 2) / 2);
    for (int l = 1; l <= int(n) - 1; ++l)
        for (int m = 0; m <= l; ++m) {
            b.off_[std::size_t(l) * (l + 1) / 2 + m - 1] = total;
            total += std::size_t(int(n) - m);
        }
    b.data_.assign(total, 0.0);

    std::vector<double> buf;
    for (int l = 1; l <= int(n) - 1; ++l) {
        for (int m = -l; m <= l; ++m) {
            const std::size_t len = std::size_t(int(n) - std::abs(m));
            buf.resize(len * 2);
            is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size() * sizeof(double)));
            if (!is) throw std::runtime_error("truncated basis cache: " + file.string());
            if (m < 0) continue;
            double* dst = b.data_.data() + b.offset(l, m);
            for (std::size_t k = 0; k < len; ++k) dst[k] = buf[2 * k];
        }
    }
    return b;
}

CMatrix coeffs_to_matrix(const SpectralCoeffs& c, const QuantBasis& basis) {
    const int N = basis.N();
    if (c.l_max() > N - 1) throw std::invalid_argument("coeffs_to_matrix: l_max exceeds N-1");
    CMatrix W = CMatrix::Zero(N, N);
    std::vector<cplx> acc;
    for (int m = 0; m <= c.l_max(); ++m) {
        acc.assign(std::size_t(N - m), cplx(0.0));
        for (int l = std::max(1, m); l <= c.l_max(); ++l) {
            const cplx w = c.at(l, m);
            if (w == cplx(0.0)) continue;
            const auto d = basis.diagonal(l, m);
            for (int k = 0; k < N - m; ++k) acc[k] += w * d[k];
        }
        const cplx i(0.0, 1.0);
        for (int k = 0; k < N - m; ++k) {
            const cplx v = i * acc[k];
            W(k, k + m) += v;
            if (m > 0) W(k + m, k) = -std::conj(W(k, k + m));
        }
    }
    return W;
}

SpectralCoeffs matrix_to_coeffs(const CMatrix& W, const QuantBasis& basis, int l_max) {
    const int N = basis.N();
    if (l_max > N - 1) throw std::invalid_argument("matrix_to_coeffs: l_max exceeds N-1");
    SpectralCoeffs c(l_max);
    const cplx mi(0.0, -1.0);
    for (int m = 0; m <= l_max; ++m) {
        for (int l = std::max(1, m); l <= l_max; ++l) {
            const auto d = basis.diagonal(l, m);
            cplx sup(0.0), sub(0.0);
            for (int k = 0; k < N - m; ++k) {
                sup += d[k] * W(k, k + m);
                if (m > 0) sub += d[k] * W(k + m, k);
            }
            // <iT_lm, W> = -i sum_k T_lm[k] W_sup[k]; T_{l,-m}[k] = (-1)^m T_lm[k]
            c.at(l, m) = mi * sup;
            if (m > 0) c.at(l, -m) = ((m % 2) ? -1.0 : 1.0) * mi * sub;
        }
    }
    return c;
}

}  // namespace isoflow
