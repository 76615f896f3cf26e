#pragma once

#include <cmath>

#include "covdist/linalg.hpp"

namespace covdist {

/// (A, gamma) standing for A + gamma*I with A symmetric PSD, gamma > 0.
struct RegularizedOperator {
    SymMatrix A;
    double gamma;

    RegularizedOperator(SymMatrix a, double g) : A(std::move(a)), gamma(g) {
        if (gamma <= 0.0) throw InputError("RegularizedOperator: gamma must be > 0");
    }
};

/// Mean and covariance of a Gaussian measure on R^n.
struct GaussianMoments {
    Vector mean;
    SymMatrix cov;

    GaussianMoments(Vector m, SymMatrix c) : mean(std::move(m)), cov(std::move(c)) {
        if (mean.size() != cov.dim()) throw InputError("GaussianMoments: dimension mismatch");
    }
};

inline void require_same_dim(const SymMatrix& A, const SymMatrix& B) {
    if (A.dim() != B.dim()) throw InputError("dimension mismatch");
}

inline double dist_hs(const SymMatrix& A, const SymMatrix& B) {
    require_same_dim(A, B);
    return (A.mat() - B.mat()).norm();
}

inline double dist_sqrt(const SymMatrix& A, const SymMatrix& B) {
    require_same_dim(A, B);
    return (spd_func(A, ScalarFn::sqrt()).mat() - spd_func(B, ScalarFn::sqrt()).mat()).norm();
}

inline double dist_bw(const SymMatrix& A, const SymMatrix& B) {
    require_same_dim(A, B);
    Matrix Bh = spd_func(B, ScalarFn::sqrt()).mat();
    SymMatrix inner(Bh * A.mat() * Bh);
    Matrix S = spd_func(inner, ScalarFn::sqrt()).mat();
    double t = A.mat().trace() + B.mat().trace() - 2.0 * S.trace();
    // round-off can push the trace slightly below 0
    return std::sqrt(std::max(t, 0.0));
}

constexpr double kAlphaLimitThreshold = 1e-8;

inline double dist_power_euclid(const SymMatrix& A, const SymMatrix& B, double alpha) {
    require_same_dim(A, B);
    if (std::abs(alpha) < kAlphaLimitThreshold)
        return (spd_func(A, ScalarFn::log()).mat() - spd_func(B, ScalarFn::log()).mat()).norm();
    return (spd_func(A, ScalarFn::pow(alpha)).mat() - spd_func(B, ScalarFn::pow(alpha)).mat())
               .norm() /
           std::abs(alpha);
}

inline double dist_alpha_procrustes(const SymMatrix& A, const SymMatrix& B, double alpha) {
    require_same_dim(A, B);
    if (std::abs(alpha) < kAlphaLimitThreshold)
        return (spd_func(A, ScalarFn::log()).mat() - spd_func(B, ScalarFn::log()).mat()).norm();
    Matrix A2a = spd_func(A, ScalarFn::pow(2.0 * alpha)).mat();
    Matrix B2a = spd_func(B, ScalarFn::pow(2.0 * alpha)).mat();
    Matrix Ba = spd_func(B, ScalarFn::pow(alpha)).mat();
    Matrix S = spd_func(SymMatrix(Ba * A2a * Ba), ScalarFn::sqrt()).mat();
    double t = A2a.trace() + B2a.trace() - 2.0 * S.trace();
    return std::sqrt(std::max(t, 0.0)) / std::abs(alpha);
}

inline double dist_loghs(const RegularizedOperator& P, const RegularizedOperator& Q) {
    require_same_dim(P.A, Q.A);
    Eigen::Index n = P.A.dim();
    Matrix I = Matrix::Identity(n, n);
    Matrix L1 = spd_func(SymMatrix(P.A.mat() / P.gamma + I), ScalarFn::log()).mat();
    Matrix L2 = spd_func(SymMatrix(Q.A.mat() / Q.gamma + I), ScalarFn::log()).mat();
    double scalar = std::log(P.gamma / Q.gamma);
    return std::sqrt((L1 - L2).squaredNorm() + scalar * scalar);
}

inline double dist_aihs(const RegularizedOperator& P, const RegularizedOperator& Q) {
    require_same_dim(P.A, Q.A);
    Eigen::Index n = P.A.dim();
    Matrix I = Matrix::Identity(n, n);
    Matrix C = spd_func(SymMatrix(P.A.mat() / P.gamma + I), ScalarFn::inv_sqrt()).mat();
    SymMatrix inner(C * (Q.A.mat() / Q.gamma + I) * C);
    double hs = spd_func(inner, ScalarFn::log()).mat().norm();
    double scalar = std::log(P.gamma / Q.gamma);
    return std::sqrt(hs * hs + scalar * scalar);
}

inline double dist_ai_exact(const SymMatrix& A, const SymMatrix& B) {
    require_same_dim(A, B);
    Matrix C = spd_func(B, ScalarFn::inv_sqrt()).mat();
    return spd_func(SymMatrix(C * A.mat() * C), ScalarFn::log()).mat().norm();
}

/// Sinkhorn divergence between two Gaussians at regularization epsilon.
inline double sinkhorn_gauss(const GaussianMoments& mu0, const GaussianMoments& mu1,
                             double epsilon) {
    if (epsilon <= 0.0) throw InputError("sinkhorn_gauss: epsilon must be > 0");
    require_same_dim(mu0.cov, mu1.cov);
    Eigen::Index n = mu0.cov.dim();
    Matrix I = Matrix::Identity(n, n);
    double c = 16.0 / (epsilon * epsilon);

    auto M = [&](const SymMatrix& Ci, const SymMatrix& Cj) {
        Matrix Ch = spd_func(Ci, ScalarFn::sqrt()).mat();
        SymMatrix inner(I + c * Ch * Cj.mat() * Ch);
        return SymMatrix(spd_func(inner, ScalarFn::sqrt()).mat() - I);
    };
    SymMatrix M00 = M(mu0.cov, mu0.cov);
    SymMatrix M01 = M(mu0.cov, mu1.cov);
    SymMatrix M11 = M(mu1.cov, mu1.cov);

    double mean_term = (mu0.mean - mu1.mean).squaredNorm();
    double trace_term = M00.mat().trace() - 2.0 * M01.mat().trace() + M11.mat().trace();
    double logdet_term = 2.0 * logdet_i_plus(SymMatrix(0.5 * M01.mat())) -
                         logdet_i_plus(SymMatrix(0.5 * M00.mat())) -
                         logdet_i_plus(SymMatrix(0.5 * M11.mat()));
    return mean_term + (epsilon / 4.0) * trace_term + (epsilon / 4.0) * logdet_term;
}

}  // namespace covdist
