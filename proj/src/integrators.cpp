#include "isoflow/integrators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace isoflow {

void project_su(CMatrix& W) {
    W = 0.5 * (W - W.adjoint()).eval();
    const cplx tr = W.trace() / double(W.rows());
    W.diagonal().array() -= tr;
}

double time_scale(int N, double h, double norm_W0) {
    if (norm_W0 <= 0) throw std::invalid_argument("time_scale: |W0| must be positive");
    return h * std::sqrt(16.0 * std::numbers::pi) / (std::pow(double(N), 1.5) * norm_W0);
}

void isomp_step(SimState& s, const LaplacianOperator& L, const StepperOptions& opt) {
    const double h2 = 0.5 * s.h;
    const CMatrix& Wn = s.W;
    CMatrix Wt = Wn;  // initial guess
    CMatrix A, AW, WA, G;

    // fixed point of G(Wt) = Wn + (h/2)[A,Wt] + (h/2)^2 A Wt A,  A = Delta^{-1}(Wt - F);
    // |G(Wt) - Wt| is exactly the residual of the implicit stage equation
    for (const double damping : {1.0, 0.5, 0.25}) {
        Wt = Wn;
        double prev_res = std::numeric_limits<double>::infinity();
        bool diverged = false;
        for (int it = 0; it < opt.max_iters; ++it) {
            A = L.solve(Wt - s.F);
            AW.noalias() = A * Wt;
            WA.noalias() = Wt * A;
            G = Wn + h2 * (AW - WA) + (h2 * h2) * (AW * A);
            const double res = (G - Wt).norm();
            if (res <= opt.tol) {
                Wt = G;
                // final stage matrix at the accepted Wtilde
                A = L.solve(Wt - s.F);
                const CMatrix P = CMatrix::Identity(Wt.rows(), Wt.cols()) + h2 * A;
                const CMatrix M = CMatrix::Identity(Wt.rows(), Wt.cols()) - h2 * A;
                AW.noalias() = P * Wt;
                s.W.noalias() = AW * M;
                project_su(s.W);
                s.step += 1;
                return;
            }
            if (res > 4.0 * prev_res || !std::isfinite(res)) {
                diverged = true;
                break;
            }
            prev_res = res;
            if (damping == 1.0)
                Wt.swap(G);
            else
                Wt += damping * (G - Wt);
        }
        if (!diverged) break;  // converging but too slowly: damping will not help
    }
    throw NonConvergence("isomp_step: fixed-point iteration did not reach tolerance (h too large?)");
}

void heun_step(SimState& s, const LaplacianOperator& L) {
    const int N = int(s.W.rows());
    const double invN = 1.0 / double(N);
    CMatrix K1, K2, Wt, B;

    B = L.solve(s.W - s.F);
    K1.noalias() = B * s.W;
    Wt = K1 - K1.adjoint();
    Wt.diagonal().array() -= Wt.trace() * invN;
    Wt = s.W + s.h * Wt;

    B = L.solve(Wt - s.F);
    K2 = K1;
    K2.noalias() += B * Wt;
    B = K2 - K2.adjoint();
    B.diagonal().array() -= B.trace() * invN;
    s.W += (0.5 * s.h) * B;
    s.step += 1;
}

Vec3 momentum_from_coeffs(const SpectralCoeffs& c) {
    // n_z = sqrt(4pi/3) Y_10, n_x = sqrt(2pi/3)(Y_{1,-1} - Y_{11}),
    // n_y = i sqrt(2pi/3)(Y_{11} + Y_{1,-1}); with the reality constraint:
    const double c2 = std::sqrt(2.0 * std::numbers::pi / 3.0);
    const cplx w11 = c.at(1, 1);
    return Vec3(-2.0 * c2 * w11.real(), 2.0 * c2 * w11.imag(),
                std::sqrt(4.0 * std::numbers::pi / 3.0) * c.at(1, 0).real());
}

Diagnostics compute_diagnostics(const CMatrix& W, const CMatrix& F, const LaplacianOperator& L,
                                const QuantBasis& basis, double t) {
    Diagnostics d;
    d.t = t;

    const CMatrix X = W - F;
    const CMatrix P = L.solve(X);
    d.H = 0.5 * (P.array() * X.array().conjugate()).sum().real();

    const CMatrix V = cplx(0.0, -1.0) * W;  // Hermitian
    CMatrix V2;
    V2.noalias() = V * V;
    d.C2 = V2.trace().real();
    d.C3 = (V2.array() * V.array().conjugate()).sum().real();
    d.C4 = V2.squaredNorm();

    d.L = momentum_from_coeffs(matrix_to_coeffs(W, basis, 1));
    d.gamma = (d.C2 > 0) ? d.L.norm() / std::sqrt(d.C2) : 0.0;
    return d;
}

std::vector<double> spectrum_imag_sorted(const CMatrix& W) {
    const CMatrix V = cplx(0.0, -1.0) * W;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(V, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

}  // namespace isoflow
