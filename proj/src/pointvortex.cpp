#include "isoflow/pointvortex.hpp"

#include <cmath>
#include <numbers>

namespace isoflow {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * std::numbers::pi);

}  // namespace

std::vector<Vec3> pv_rhs(const PointVortexState& s, double delta_min) {
    const std::size_t n = s.size();
    std::vector<Vec3> v(n, Vec3::Zero());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double denom = 1.0 - s.x[i].dot(s.x[j]);
            if (denom <= delta_min) throw Collision("pv_rhs: vortices too close");
            v[i] += s.gamma[j] * s.x[j].cross(s.x[i]) / denom;
        }
        v[i] *= kInv4Pi;
    }
    return v;
}

void pv_step(PointVortexState& s, double h, double tol, int max_iters) {
    // midpoint stage Y = x_n + (h/2) f(Y), then x_{n+1} = 2Y - x_n
    PointVortexState mid = s;
    const std::vector<Vec3> x0 = s.x;
    for (int it = 0; it < max_iters; ++it) {
        const std::vector<Vec3> f = pv_rhs(mid);
        double res = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Vec3 y = x0[i] + 0.5 * h * f[i];
            res = std::max(res, (y - mid.x[i]).norm());
            mid.x[i] = y;
        }
        if (res <= tol) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                s.x[i] = 2.0 * mid.x[i] - x0[i];
                s.x[i].normalize();
            }
            return;
        }
    }
    throw NonConvergence("pv_step: midpoint iteration did not converge");
}

std::vector<double> strengths_from_positions(const std::vector<Vec3>& x) {
    const std::size_t n = x.size();
    if (n < 4) throw std::invalid_argument("strengths_from_positions: need n >= 4");
    Eigen::MatrixXd A(3, n - 1);
    for (std::size_t j = 1; j < n; ++j) A.col(j - 1) = x[j];
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < 1e-10 * sv(0))
        throw DegenerateConfiguration("strengths_from_positions: rank-deficient position system");
    const Eigen::VectorXd g = svd.solve(-x[0]);
    std::vector<double> out(n);
    out[0] = 1.0;
    for (std::size_t j = 1; j < n; ++j) out[j] = g(j - 1);
    return out;
}

PVInvariants pv_invariants(const PointVortexState& s, double delta_min) {
    PVInvariants inv;
    for (std::size_t i = 0; i < s.size(); ++i) {
        inv.L += s.gamma[i] * s.x[i];
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const double denom = 1.0 - s.x[i].dot(s.x[j]);
            if (denom <= delta_min) throw Collision("pv_invariants: vortices too close");
            inv.H -= kInv4Pi * s.gamma[i] * s.gamma[j] * std::log(denom);
        }
    }
    return inv;
}

}  // namespace isoflow
