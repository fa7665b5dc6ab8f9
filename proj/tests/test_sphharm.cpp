#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "isoflow/sphharm.hpp"
#include "test_helpers.hpp"

using namespace isoflow;
using isoflow::test::random_reality_coeffs;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("gauss_legendre nodes and exactness") {
    const QuadRule q = gauss_legendre(12);
    double wsum = 0.0;
    for (double w : q.w) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (int i = 0; i < 6; ++i) {
        CHECK(q.x[i] == doctest::Approx(-q.x[11 - i]).epsilon(1e-14));
        CHECK(q.x[i] < q.x[i + 1]);
    }
    // exact for polynomials up to degree 23
    for (int k = 0; k <= 23; ++k) {
        double acc = 0.0;
        for (int i = 0; i < 12; ++i) acc += q.w[i] * std::pow(q.x[i], k);
        const double exact = (k % 2) ? 0.0 : 2.0 / (k + 1);
        CHECK(acc == doctest::Approx(exact).epsilon(1e-13));
    }
}

TEST_CASE("normalized Legendre low-order closed forms") {
    for (double x : {-0.9, -0.3, 0.2, 0.77}) {
        std::vector<double> p(8);
        const double s = std::sqrt(1 - x * x);
        legendre_normalized(0, 3, x, p);
        CHECK(p[0] == doctest::Approx(std::sqrt(1 / (4 * kPi))).epsilon(1e-14));
        CHECK(p[1] == doctest::Approx(std::sqrt(3 / (4 * kPi)) * x).epsilon(1e-14));
        CHECK(p[2] == doctest::Approx(std::sqrt(5 / (16 * kPi)) * (3 * x * x - 1)).epsilon(1e-13));
        legendre_normalized(1, 2, x, p);
        CHECK(p[0] == doctest::Approx(-std::sqrt(3 / (8 * kPi)) * s).epsilon(1e-13));
        CHECK(p[1] == doctest::Approx(-std::sqrt(15 / (8 * kPi)) * x * s).epsilon(1e-13));
        legendre_normalized(2, 2, x, p);
        CHECK(p[0] == doctest::Approx(std::sqrt(15 / (32 * kPi)) * s * s).epsilon(1e-13));
    }
}

TEST_CASE("normalized Legendre orthonormality") {
    const int L = 24;
    const QuadRule q = gauss_legendre(L + 2);
    std::vector<double> pi_(L + 1), pj(L + 1);
    for (int m : {0, 1, 5, 17}) {
        for (int la = m; la <= L; ++la)
            for (int lb = la; lb <= L; ++lb) {
                double acc = 0.0;
                for (std::size_t i = 0; i < q.x.size(); ++i) {
                    legendre_normalized(m, L, q.x[i], pi_);
                    acc += q.w[i] * pi_[la - m] * pi_[lb - m];
                }
                CHECK(2 * kPi * acc == doctest::Approx(la == lb ? 1.0 : 0.0).epsilon(5e-13));
            }
    }
}

TEST_CASE("high-degree columns stay finite and bounded") {
    std::vector<double> p(520);
    for (double theta : {0.02, 0.3, 1.3}) {
        for (int m : {0, 120, 480}) {
            legendre_normalized(m, 511, std::cos(theta), p);
            for (int l = m; l <= 511; ++l) {
                CHECK(std::isfinite(p[l - m]));
                CHECK(std::abs(p[l - m]) <= std::sqrt((2.0 * l + 1) / (4 * kPi)) * (1 + 1e-9));
            }
        }
    }
    // far-evanescent column flushes to zero rather than NaN
    legendre_normalized(480, 511, std::cos(0.02), p);
    CHECK(p[0] == 0.0);
}

TEST_CASE("raster of Y_10 is proportional to cos(theta)") {
    SpectralCoeffs c(1);
    c.at(1, 0) = 1.0;
    const FieldRaster r = synthesize_raster(c, 16, 12);
    for (int i = 0; i < r.n_theta; ++i)
        for (int j = 0; j < r.n_phi; ++j)
            CHECK(r.at(i, j) == doctest::Approx(std::sqrt(3 / (4 * kPi)) * std::cos(r.theta(i))).epsilon(1e-12));
    CHECK(r.at(0, 0) > r.at(r.n_theta - 1, 0));
    CHECK_THROWS_AS(synthesize_raster(c, 2, 12), std::invalid_argument);
}

TEST_CASE("synthesis is linear") {
    const SpectralCoeffs a = random_reality_coeffs(6, 1);
    const SpectralCoeffs b = random_reality_coeffs(6, 2);
    SpectralCoeffs ab(6);
    for (std::size_t k = 0; k < ab.size(); ++k) ab.data()[k] = 2.0 * a.data()[k] - 0.5 * b.data()[k];
    const FieldRaster ra = synthesize_raster(a, 24, 16), rb = synthesize_raster(b, 24, 16),
                      rab = synthesize_raster(ab, 24, 16);
    for (std::size_t k = 0; k < rab.vals.size(); ++k)
        CHECK(rab.vals[k] == doctest::Approx(2.0 * ra.vals[k] - 0.5 * rb.vals[k]).epsilon(1e-12));
}

TEST_CASE("synthesis matches the full complex sum") {
    const SpectralCoeffs c = random_reality_coeffs(9, 3);
    std::vector<double> p(10);
    for (double phi : {0.3, 4.0})
        for (double theta : {0.4, 2.2}) {
            cplx acc(0.0);
            for (int m = -9; m <= 9; ++m) {
                legendre_normalized(std::abs(m), 9, std::cos(theta), p);
                for (int l = std::max(1, std::abs(m)); l <= 9; ++l) {
                    double pb = p[l - std::abs(m)];
                    if (m < 0 && (m % 2)) pb = -pb;  // Pbar_{l,-m} = (-1)^m Pbar_{l,m}
                    acc += c.at(l, m) * pb * cplx(std::cos(m * phi), std::sin(m * phi));
                }
            }
            CHECK(std::abs(acc.imag()) <= 1e-10);
            CHECK(synthesize_point(c, phi, theta) == doctest::Approx(acc.real()).epsilon(1e-10));
        }
}

TEST_CASE("Parseval against grid quadrature") {
    const int L = 12;
    const SpectralCoeffs c = random_reality_coeffs(L, 4);
    double sum2 = 0.0;
    for (const cplx& v : c.data()) sum2 += std::norm(v);
    const double quad = isoflow::test::sphere_integral(
        [&](double phi, double theta) {
            const double v = synthesize_point(c, phi, theta);
            return v * v;
        },
        2 * L + 2, 4 * L + 4);
    CHECK(quad == doctest::Approx(sum2).epsilon(1e-6));
}

TEST_CASE("analysis-synthesis round trip on band-limited fields") {
    const int L = 10;
    const SpectralCoeffs c = random_reality_coeffs(L, 5);
    const SpectralCoeffs r =
        analyze_field([&](double phi, double theta) { return synthesize_point(c, phi, theta); }, L, L + 2, 2 * L + 3);
    for (int l = 1; l <= L; ++l)
        for (int m = -l; m <= l; ++m) CHECK(std::abs(r.at(l, m) - c.at(l, m)) <= 1e-10);
}
