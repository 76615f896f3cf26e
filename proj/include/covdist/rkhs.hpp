#pragma once

#include <cmath>

#include "covdist/distances.hpp"
#include "covdist/linalg.hpp"
#include "covdist/rng.hpp"

namespace covdist {

enum class Metric { Hs, Sqrt, Bw, LogHs, AiHs, Sinkhorn };

/// Rectangular factor A (n x p) representing the covariance C = A Aᵀ through
/// p latent coordinates.
struct FeatureFactor {
    Matrix A;
    Eigen::Index ambient_dim() const { return A.rows(); }
    Eigen::Index latent_dim() const { return A.cols(); }
};

/// log(I_n + A Aᵀ) = A h(AᵀA) Aᵀ; only the p x p eigenproblem is solved.
inline SymMatrix log_from_factor(const FeatureFactor& F) {
    SymMatrix W(F.A.transpose() * F.A);
    Matrix H = spd_func(W, ScalarFn::h()).mat();
    return SymMatrix(F.A * H * F.A.transpose());
}

namespace detail {

/// ||log(I + W)||_F^2 from the spectrum of a PSD W.
inline double log_norm_sq(const SymMatrix& W) {
    Vector lam = clip_eigenvalues(sym_eig(W).eigenvalues, kDefaultClipTol);
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        double t = std::log1p(lam[i]);
        s += t * t;
    }
    return s;
}

/// Non-symmetric block operator whose spectrum mu_k satisfies
/// log[(I+ÃÃᵀ)^{-1/2}(I+B̃B̃ᵀ)(I+ÃÃᵀ)^{-1/2}] ~ {log(1+mu_k)}.  Kept for
/// cross-validation; the production path below uses a symmetric formulation.
inline Matrix block_operator_d(const SymMatrix& W1, const SymMatrix& W2, const Matrix& C) {
    Eigen::Index p1 = W1.dim(), p2 = W2.dim();
    Matrix I1 = Matrix::Identity(p1, p1);
    Matrix R = spd_func(SymMatrix(W1.mat() + I1), ScalarFn::inv()).mat();  // (I+W1)^{-1}
    Matrix D(p1 + p2, p1 + p2);
    D.topLeftCorner(p1, p1) = R - I1;
    D.topRightCorner(p1, p2) = R * C;
    D.bottomLeftCorner(p2, p1) = -C.transpose() * R;
    D.bottomRightCorner(p2, p2) = W2.mat() - C.transpose() * R * C;
    return D;
}

/// Restrictions of I+ÃÃᵀ and I+B̃B̃ᵀ to an orthonormal basis of
/// span([Ã B̃]), built from the Gram blocks W1 = ÃᵀÃ, W2 = B̃ᵀB̃, C = ÃᵀB̃.
/// Both operators act as the identity on the orthogonal complement, so every
/// nontrivial piece of the logHS / aiHS distances lives in these r x r
/// symmetric positive definite matrices (r <= p1+p2).
struct ProjectedPair {
    Matrix S1, S2;
};

inline ProjectedPair project_to_feature_span(const SymMatrix& W1, const SymMatrix& W2,
                                             const Matrix& C) {
    Eigen::Index p1 = W1.dim(), p2 = W2.dim();
    Matrix G(p1 + p2, p1 + p2);
    G.topLeftCorner(p1, p1) = W1.mat();
    G.topRightCorner(p1, p2) = C;
    G.bottomLeftCorner(p2, p1) = C.transpose();
    G.bottomRightCorner(p2, p2) = W2.mat();
    SpectralDecomposition sd = sym_eig(SymMatrix(G));
    double lmax = std::max(sd.eigenvalues.maxCoeff(), 0.0);
    double cut = lmax * 1e-12;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i)
        if (sd.eigenvalues[i] > cut) ++r;
    Matrix B(p1 + p2, r);  // U B is orthonormal in the ambient space
    for (Eigen::Index i = 0; i < r; ++i)
        B.col(i) = sd.eigenvectors.col(i) / std::sqrt(sd.eigenvalues[i]);
    Matrix Ea = B.transpose() * G.leftCols(p1);   // r x p1, = (U B)ᵀ Ã
    Matrix Eb = B.transpose() * G.rightCols(p2);  // r x p2, = (U B)ᵀ B̃
    Matrix Ir = Matrix::Identity(r, r);
    return {Ir + Ea * Ea.transpose(), Ir + Eb * Eb.transpose()};
}

/// Squared logHS distance (HS part only) from the small Gram-sized matrices.
inline double loghs_sq_from_grams(const SymMatrix& W1, const SymMatrix& W2, const Matrix& C) {
    ProjectedPair P = project_to_feature_span(W1, W2, C);
    if (P.S1.rows() == 0) return 0.0;
    return (spd_func(SymMatrix(P.S1), ScalarFn::log()).mat() -
            spd_func(SymMatrix(P.S2), ScalarFn::log()).mat())
        .squaredNorm();
}

/// Squared aiHS distance (HS part only): sum of log^2 of the generalized
/// eigenvalues of the symmetric positive definite pencil (S2, S1).
inline double aihs_sq_from_grams(const SymMatrix& W1, const SymMatrix& W2, const Matrix& C) {
    ProjectedPair P = project_to_feature_span(W1, W2, C);
    if (P.S1.rows() == 0) return 0.0;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(P.S2, P.S1);
    if (es.info() != Eigen::Success)
        throw NumericalError("aihs_from_grams: generalized eigensolver failed");
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double nu = es.eigenvalues()[i];
        if (nu <= 0.0) throw NumericalError("aihs_from_grams: pencil not positive definite");
        double t = std::log(nu);
        s += t * t;
    }
    return s;
}

inline void require_positive_gammas(double g1, double g2) {
    if (g1 <= 0.0 || g2 <= 0.0) throw InputError("gamma must be > 0");
}

}  // namespace detail

/// logHS distance between (F1 F1ᵀ, gamma1) and (F2 F2ᵀ, gamma2) using only
/// p1 x p1, p2 x p2 and p1 x p2 matrices.
inline double loghs_from_factors(const FeatureFactor& F1, double gamma1, const FeatureFactor& F2,
                                 double gamma2) {
    detail::require_positive_gammas(gamma1, gamma2);
    if (F1.ambient_dim() != F2.ambient_dim())
        throw InputError("loghs_from_factors: ambient dimension mismatch");
    Matrix At = F1.A / std::sqrt(gamma1);
    Matrix Bt = F2.A / std::sqrt(gamma2);
    SymMatrix W1(At.transpose() * At), W2(Bt.transpose() * Bt);
    Matrix C = At.transpose() * Bt;
    double scalar = std::log(gamma1 / gamma2);
    return std::sqrt(detail::loghs_sq_from_grams(W1, W2, C) + scalar * scalar);
}

/// aiHS distance between (F1 F1ᵀ, gamma1) and (F2 F2ᵀ, gamma2) via the
/// (p1+p2)-dimensional block matrix.
inline double aihs_from_factors(const FeatureFactor& F1, double gamma1, const FeatureFactor& F2,
                                double gamma2) {
    detail::require_positive_gammas(gamma1, gamma2);
    if (F1.ambient_dim() != F2.ambient_dim())
        throw InputError("aihs_from_factors: ambient dimension mismatch");
    Matrix At = F1.A / std::sqrt(gamma1);
    Matrix Bt = F2.A / std::sqrt(gamma2);
    SymMatrix W1(At.transpose() * At), W2(Bt.transpose() * Bt);
    Matrix C = At.transpose() * Bt;
    double scalar = std::log(gamma1 / gamma2);
    return std::sqrt(detail::aihs_sq_from_grams(W1, W2, C) + scalar * scalar);
}

/// Distance between N(0, C_Phi(X1)+gamma1 I) and N(0, C_Phi(X2)+gamma2 I)
/// from Gram matrices alone, with J-centering of the features.
inline double rkhs_measure_distance(const SymMatrix& K11, const SymMatrix& K22, const Matrix& K12,
                                    double gamma1, double gamma2, Metric metric) {
    detail::require_positive_gammas(gamma1, gamma2);
    Eigen::Index m = K11.dim();
    if (K22.dim() != m || K12.rows() != m || K12.cols() != m)
        throw InputError("rkhs_measure_distance: Gram shape mismatch");
    Matrix J = Matrix::Identity(m, m) - Matrix::Constant(m, m, 1.0 / static_cast<double>(m));
    double md = static_cast<double>(m);
    SymMatrix W1(J * K11.mat() * J / (md * gamma1));
    SymMatrix W2(J * K22.mat() * J / (md * gamma2));
    Matrix C = J * K12 * J / (md * std::sqrt(gamma1 * gamma2));
    double scalar = std::log(gamma1 / gamma2);
    switch (metric) {
        case Metric::LogHs:
            return std::sqrt(detail::loghs_sq_from_grams(W1, W2, C) + scalar * scalar);
        case Metric::AiHs:
            return std::sqrt(detail::aihs_sq_from_grams(W1, W2, C) + scalar * scalar);
        default:
            throw InputError("rkhs_measure_distance: metric must be loghs or aihs");
    }
}

/// Distance restricted to the leading N x N principal submatrices (projection
/// onto the first N coordinates of the standard basis).
inline double truncated_distance(const SymMatrix& A, const SymMatrix& B, double gamma,
                                 Eigen::Index N, Metric metric) {
    require_same_dim(A, B);
    if (N < 1 || N > A.dim()) throw InputError("truncated_distance: N out of range");
    RegularizedOperator P(SymMatrix(A.mat().topLeftCorner(N, N)), gamma);
    RegularizedOperator Q(SymMatrix(B.mat().topLeftCorner(N, N)), gamma);
    switch (metric) {
        case Metric::LogHs: return dist_loghs(P, Q);
        case Metric::AiHs: return dist_aihs(P, Q);
        default: throw InputError("truncated_distance: metric must be loghs or aihs");
    }
}

// ---------------------------------------------------------------------------
// Identity suite: factor-based computations against their ambient oracles
// ---------------------------------------------------------------------------

struct IdentityReport {
    double max_dev_log_from_factor = 0.0;   // absolute, scaled by 1 + |F|_F^2
    double max_dev_loghs = 0.0;             // relative
    double max_dev_aihs = 0.0;              // relative
    bool pass = true;
    std::uint64_t first_fail_seed = 0;

    static constexpr double tol_log_from_factor = 1e-10;
    static constexpr double tol_loghs = 1e-8;
    static constexpr double tol_aihs = 1e-6;
};

/// Random-factor check of the identities log(I+AAᵀ) = A h(AᵀA) Aᵀ and the
/// factor forms of the logHS / aiHS distances.
inline IdentityReport run_identity_check(std::uint64_t seed, int trials) {
    if (trials < 1) throw InputError("run_identity_check: trials must be >= 1");
    IdentityReport rep;
    for (int t = 0; t < trials; ++t) {
        std::uint64_t trial_seed = derive_seed(seed, 11, t);
        RngStream rng(trial_seed);
        auto dim = [&](int lo, int hi) {
            return lo + static_cast<int>(rng.uniform() * (hi - lo + 1));
        };
        int n = dim(5, 15), p1 = dim(1, 6), p2 = dim(1, 6);
        auto randmat = [&](int r, int c) {
            Matrix M(r, c);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j) M(i, j) = rng.normal();
            return M;
        };
        FeatureFactor F1{randmat(n, p1)}, F2{randmat(n, p2)};
        double g1 = 0.1 + 1.9 * rng.uniform();
        double g2 = 0.1 + 1.9 * rng.uniform();

        Matrix In = Matrix::Identity(n, n);
        double dev_log =
            (log_from_factor(F1).mat() -
             spd_func(SymMatrix(In + F1.A * F1.A.transpose()), ScalarFn::log()).mat())
                .norm() /
            (1.0 + F1.A.squaredNorm());

        RegularizedOperator P(SymMatrix(F1.A * F1.A.transpose()), g1);
        RegularizedOperator Q(SymMatrix(F2.A * F2.A.transpose()), g2);
        double ref_loghs = dist_loghs(P, Q);
        double ref_aihs = dist_aihs(P, Q);
        double dev_loghs =
            std::abs(loghs_from_factors(F1, g1, F2, g2) - ref_loghs) / std::max(ref_loghs, 1e-300);
        double dev_aihs =
            std::abs(aihs_from_factors(F1, g1, F2, g2) - ref_aihs) / std::max(ref_aihs, 1e-300);

        rep.max_dev_log_from_factor = std::max(rep.max_dev_log_from_factor, dev_log);
        rep.max_dev_loghs = std::max(rep.max_dev_loghs, dev_loghs);
        rep.max_dev_aihs = std::max(rep.max_dev_aihs, dev_aihs);
        bool ok = dev_log <= IdentityReport::tol_log_from_factor &&
                  dev_loghs <= IdentityReport::tol_loghs && dev_aihs <= IdentityReport::tol_aihs;
        if (!ok && rep.pass) {
            rep.pass = false;
            rep.first_fail_seed = trial_seed;
        }
    }
    return rep;
}

}  // namespace covdist
