#include "isoflow/sphharm.hpp"

#include <cmath>
#include <numbers>

namespace isoflow {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

QuadRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    QuadRule q;
    q.x.resize(n);
    q.w.resize(n);
    // Newton on P_n with the usual Chebyshev-based initial guess
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double p0 = 0, p1 = 0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) * x * p1 - k * p2) / (k + 1);
            }
            const double dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        p0 = 1.0;
        p1 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2 * k + 1) * x * p1 - k * p2) / (k + 1);
        }
        const double dp = n * (x * p0 - p1) / (x * x - 1.0);
        q.x[i] = -x;
        q.x[n - 1 - i] = x;
        q.w[i] = q.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

void legendre_normalized(int m, int l_max, double x, std::span<double> out) {
    if (m < 0 || l_max < m) throw std::invalid_argument("legendre_normalized: need 0 <= m <= l_max");
    if (out.size() < std::size_t(l_max - m + 1)) throw std::invalid_argument("legendre_normalized: output too small");
    const double sx2 = std::max(0.0, 1.0 - x * x);
    const double sx = std::sqrt(sx2);

    // seed Pbar_mm = (-1)^m sqrt((2m+1)/(4pi)) sqrt((2m-1)!!/(2m)!!) sx^m,
    // tracked as value * 2^exponent while tiny
    double v = std::sqrt(1.0 / (4.0 * kPi));
    int e = 0;
    for (int k = 1; k <= m; ++k) {
        v *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * sx;
        if (std::abs(v) < 0x1p-400 && v != 0.0) {
            v *= 0x1p+400;
            e -= 400;
        }
    }
    auto emit = [&](double val) { return (e == 0) ? val : std::ldexp(val, e); };

    out[0] = emit(v);
    if (l_max == m) return;
    double plm1 = v;                                  // l-1 term
    double pl = std::sqrt(2.0 * m + 3.0) * x * v;     // l = m+1
    out[1] = emit(pl);
    for (int l = m + 2; l <= l_max; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        const double b = std::sqrt(((2.0 * l + 1.0) / (2.0 * l - 3.0)) * ((double(l - 1) * (l - 1) - double(m) * m) /
                                                                          (double(l) * l - double(m) * m)));
        const double pnew = a * x * pl - b * plm1;
        plm1 = pl;
        pl = pnew;
        // hand the suppressed exponent back as the values grow out of the seed
        if (e < 0 && std::abs(pl) > 0x1p+400) {
            const int step = std::min(-e, 400);
            pl = std::ldexp(pl, -step);
            plm1 = std::ldexp(plm1, -step);
            e += step;
        }
        out[l - m] = emit(pl);
    }
}

double FieldRaster::theta(int i) const { return kPi * (i + 0.5) / n_theta; }
double FieldRaster::phi(int j) const { return 2.0 * kPi * j / n_phi; }

FieldRaster synthesize_raster(const SpectralCoeffs& c, int n_phi, int n_theta) {
    if (n_phi < 4 || n_theta < 4) throw std::invalid_argument("synthesize_raster: grid must be at least 4x4");
    FieldRaster r;
    r.n_phi = n_phi;
    r.n_theta = n_theta;
    r.vals.assign(std::size_t(n_phi) * n_theta, 0.0);

    const int L = c.l_max();
    std::vector<double> pl(L + 1);
    std::vector<cplx> gm(L + 1);
    for (int i = 0; i < n_theta; ++i) {
        const double x = std::cos(r.theta(i));
        // g_m(theta) = sum_l w^{lm} Pbar_lm(x)
        for (int m = 0; m <= L; ++m) {
            legendre_normalized(m, L, x, pl);
            cplx g(0.0);
            for (int l = std::max(1, m); l <= L; ++l) g += c.at(l, m) * pl[l - m];
            gm[m] = g;
        }
        for (int j = 0; j < n_phi; ++j) {
            const double phi = r.phi(j);
            double val = gm[0].real();
            for (int m = 1; m <= L; ++m) {
                const cplx e(std::cos(m * phi), std::sin(m * phi));
                val += 2.0 * (gm[m] * e).real();
            }
            r.at(i, j) = val;
        }
    }
    return r;
}

double synthesize_point(const SpectralCoeffs& c, double phi, double theta) {
    const int L = c.l_max();
    std::vector<double> pl(L + 1);
    const double x = std::cos(theta);
    double val = 0.0;
    for (int m = 0; m <= L; ++m) {
        legendre_normalized(m, L, x, pl);
        cplx g(0.0);
        for (int l = std::max(1, m); l <= L; ++l) g += c.at(l, m) * pl[l - m];
        if (m == 0)
            val += g.real();
        else
            val += 2.0 * (g * cplx(std::cos(m * phi), std::sin(m * phi))).real();
    }
    return val;
}

SpectralCoeffs analyze_field(const std::function<double(double phi, double theta)>& f, int l_max, int n_theta,
                             int n_phi) {
    const QuadRule q = gauss_legendre(n_theta);
    SpectralCoeffs c(l_max);
    std::vector<double> row(n_phi);
    std::vector<cplx> fm(l_max + 1);
    std::vector<double> pl(l_max + 1);
    const double dphi = 2.0 * kPi / n_phi;
    for (int i = 0; i < n_theta; ++i) {
        const double theta = std::acos(q.x[i]);
        for (int j = 0; j < n_phi; ++j) row[j] = f(dphi * j, theta);
        // F_m = dphi * sum_j f e^{-i m phi_j}
        for (int m = 0; m <= l_max; ++m) {
            cplx acc(0.0);
            for (int j = 0; j < n_phi; ++j) acc += row[j] * cplx(std::cos(m * dphi * j), -std::sin(m * dphi * j));
            fm[m] = acc * dphi;
        }
        for (int m = 0; m <= l_max; ++m) {
            legendre_normalized(m, l_max, q.x[i], pl);
            for (int l = std::max(1, m); l <= l_max; ++l) c.at(l, m) += q.w[i] * pl[l - m] * fm[m];
        }
    }
    // m < 0 from the reality of f
    for (int l = 1; l <= l_max; ++l)
        for (int m = 1; m <= l; ++m) c.at(l, -m) = ((m % 2) ? -1.0 : 1.0) * std::conj(c.at(l, m));
    return c;
}

}  // namespace isoflow
