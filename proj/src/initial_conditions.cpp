#include "isoflow/initial_conditions.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "isoflow/sphharm.hpp"

namespace isoflow {

SpectralCoeffs sample_l2_random(const RandomFieldParams& p) {
    if (p.l_max < 1) throw std::invalid_argument("sample_l2_random: l_max must be >= 1");
    if (p.eps <= 0) throw std::invalid_argument("sample_l2_random: eps must be > 0");
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralCoeffs c(p.l_max);
    for (int l = 1; l <= p.l_max; ++l) {
        const double decay = std::pow(double(l), 1.0 + p.eps);
        c.at(l, 0) = gauss(rng) / decay;
        for (int m = 1; m <= l; ++m) {
            const double a = gauss(rng), b = gauss(rng);
            c.at(l, m) = cplx(a, b) / (std::sqrt(2.0) * decay);
            c.at(l, -m) = ((m % 2) ? -1.0 : 1.0) * std::conj(c.at(l, m));
        }
    }
    const double n = c.norm();
    if (n > 0) c.scale(1.0 / n);
    return c;
}

SpectralCoeffs zero_momentum_projection(SpectralCoeffs c) {
    for (int m = -1; m <= 1; ++m) c.at(1, m) = cplx(0.0);
    return c;
}

SpectralCoeffs gaussian_blobs(const BlobSpec& spec, int N) {
    if (spec.centers.size() != spec.strengths.size())
        throw std::invalid_argument("gaussian_blobs: centers/strengths size mismatch");
    for (std::size_t i = 0; i < spec.centers.size(); ++i)
        for (std::size_t j = i + 1; j < spec.centers.size(); ++j)
            if ((spec.centers[i] - spec.centers[j]).norm() < 1e-12)
                throw std::invalid_argument("gaussian_blobs: coincident blob centers");

    auto field = [&](double phi, double theta) {
        const Vec3 x(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
        double v = 0.0;
        for (std::size_t i = 0; i < spec.centers.size(); ++i)
            v += spec.strengths[i] * std::exp(-spec.width * (x - spec.centers[i]).squaredNorm());
        return v;
    };
    SpectralCoeffs c = analyze_field(field, N - 1, 2 * (N + 1), 4 * (N + 1));
    // dropping the l = 0 projection removes the mean; zeroing l = 1 removes
    // the momentum -- together this is the C(x) correction
    return zero_momentum_projection(std::move(c));
}

BlobSpec load_blob_csv(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw std::runtime_error("cannot open blob file: " + file.string());
    BlobSpec spec;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.find('=') != std::string::npos) {
            std::istringstream ls(line);
            std::string key, eq;
            double val;
            ls >> key >> eq >> val;
            if (key == "width" && eq == "=" && ls) spec.width = val;
            continue;
        }
        std::istringstream ls(line);
        double phi, theta, gamma;
        char c1, c2;
        if (!(ls >> phi >> c1 >> theta >> c2 >> gamma) || c1 != ',' || c2 != ',')
            throw std::runtime_error("bad blob row: " + line);
        spec.centers.emplace_back(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
        spec.strengths.push_back(gamma);
    }
    if (spec.centers.empty()) throw std::runtime_error("blob file has no rows: " + file.string());
    return spec;
}

namespace {

double rh_rate(const RHWaveSpec& spec) {
    const double ll = double(spec.l) * (spec.l + 1);
    const double alpha_l = 0.5 * (2.0 * spec.C / ll - spec.C + 1.0);
    return 2.0 * spec.Omega * alpha_l + spec.zonal * (1.0 / ll - 0.5);
}

}  // namespace

SpectralCoeffs rh_wave_coeffs(const RHWaveSpec& spec, const QuantBasis& basis, double t) {
    const int N = basis.N();
    if (spec.l < 1 || spec.l > N - 1) throw std::invalid_argument("rh_wave: need 1 <= l <= N-1");
    for (const auto& [m, w] : spec.amplitudes) {
        if (std::abs(m) > spec.l) throw std::invalid_argument("rh_wave: |m| > l amplitude");
        const auto it = spec.amplitudes.find(-m);
        const cplx mirror = (it == spec.amplitudes.end()) ? cplx(0.0) : it->second;
        if (std::abs(std::conj(w) - ((m % 2) ? -mirror : mirror)) > 1e-12 * (1.0 + std::abs(w)))
            throw std::invalid_argument("rh_wave: amplitudes violate the reality constraint");
    }
    SpectralCoeffs c(std::max(spec.l, 1));
    c.at(1, 0) = 2.0 * spec.Omega * spec.C + spec.zonal;
    const double mu = rh_rate(spec) * basis.t10_coefficient();
    for (const auto& [m, w] : spec.amplitudes) {
        const double ph = mu * m * t;
        c.at(spec.l, m) += w * cplx(std::cos(ph), std::sin(ph));
    }
    return c;
}

CMatrix rh_wave(const RHWaveSpec& spec, const QuantBasis& basis, double t) {
    return coeffs_to_matrix(rh_wave_coeffs(spec, basis, t), basis);
}

CMatrix coriolis_matrix(double Omega, const QuantBasis& basis) {
    const int N = basis.N();
    CMatrix F = CMatrix::Zero(N, N);
    if (Omega == 0.0) return F;
    const auto d = basis.diagonal(1, 0);
    for (int k = 0; k < N; ++k) F(k, k) = cplx(0.0, 2.0 * Omega * d[k]);
    return F;
}

}  // namespace isoflow
