#pragma once

#include <cmath>
#include <cstdint>

#include "covdist/linalg.hpp"
#include "covdist/rng.hpp"

namespace covdist {

/// Kernel family on T = [0,1]^d.
///   laplacian(a):            exp(-a*|x-y|_2), a > 0
///   squared_exponential(s):  exp(-|x-y|^2 / s^2), s > 0
///   brownian(s2):            s2 * min(x,y), d = 1 only
struct KernelSpec {
    enum class Family { Laplacian, SquaredExponential, Brownian } family;
    double param;

    static KernelSpec laplacian(double a) {
        if (a <= 0.0) throw InputError("laplacian: rate must be > 0");
        return {Family::Laplacian, a};
    }
    static KernelSpec squared_exponential(double sigma) {
        if (sigma <= 0.0) throw InputError("squared_exponential: sigma must be > 0");
        return {Family::SquaredExponential, sigma};
    }
    static KernelSpec brownian(double s2) {
        if (s2 <= 0.0) throw InputError("brownian: variance must be > 0");
        return {Family::Brownian, s2};
    }

    /// sup_x K(x,x) on [0,1]^d; enters the concentration bounds as kappa^2.
    double kappa_sq() const {
        return family == Family::Brownian ? param : 1.0;
    }
};

/// T = [0,1]^d with the uniform probability measure.
struct DomainSpec {
    int d;
    explicit DomainSpec(int dim) : d(dim) {
        if (d < 1) throw InputError("DomainSpec: dimension must be >= 1");
    }
};

/// m points in [0,1]^d, one per row.
struct PointSet {
    Matrix points;  // m x d
    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
};

/// m x N matrix of Gaussian-process path values; column j is one path
/// evaluated on the common point set.
struct PathMatrix {
    Matrix values;
    Eigen::Index num_points() const { return values.rows(); }
    Eigen::Index num_paths() const { return values.cols(); }
};

inline double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                          const Eigen::Ref<const Vector>& y) {
    if (x.size() != y.size()) throw InputError("kernel_eval: dimension mismatch");
    switch (spec.family) {
        case KernelSpec::Family::Laplacian:
            return std::exp(-spec.param * (x - y).norm());
        case KernelSpec::Family::SquaredExponential:
            return std::exp(-(x - y).squaredNorm() / (spec.param * spec.param));
        case KernelSpec::Family::Brownian:
            if (x.size() != 1) throw InputError("kernel_eval: brownian kernel requires d=1");
            return spec.param * std::min(x[0], y[0]);
    }
    throw InputError("kernel_eval: unknown kernel family");
}

inline SymMatrix gram(const KernelSpec& spec, const PointSet& X) {
    Eigen::Index m = X.size();
    Matrix K(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i; j < m; ++j) {
            double v = kernel_eval(spec, X.points.row(i).transpose(), X.points.row(j).transpose());
            K(i, j) = v;
            K(j, i) = v;
        }
    return SymMatrix(K);
}

inline Matrix gram_cross(const KernelSpec& spec, const PointSet& X1, const PointSet& X2) {
    Matrix K(X1.size(), X2.size());
    for (Eigen::Index i = 0; i < X1.size(); ++i)
        for (Eigen::Index j = 0; j < X2.size(); ++j)
            K(i, j) =
                kernel_eval(spec, X1.points.row(i).transpose(), X2.points.row(j).transpose());
    return K;
}

inline PointSet sample_points(const DomainSpec& domain, Eigen::Index m, std::uint64_t seed) {
    if (m < 1) throw InputError("sample_points: m must be >= 1");
    RngStream rng(seed);
    Matrix pts(m, domain.d);
    for (Eigen::Index i = 0; i < m; ++i)
        for (int j = 0; j < domain.d; ++j) pts(i, j) = rng.uniform();
    return {pts};
}

/// Z = L * G with L Lᵀ = K (+ reported jitter) and G i.i.d. standard normal;
/// each column is distributed N(0, K).
inline PathMatrix sample_paths(const SymMatrix& K, Eigen::Index N, std::uint64_t seed) {
    if (N < 1) throw InputError("sample_paths: N must be >= 1");
    CholResult cr = chol_jitter(K);
    RngStream rng(seed);
    Eigen::Index m = K.dim();
    Matrix G(m, N);
    for (Eigen::Index j = 0; j < N; ++j)
        for (Eigen::Index i = 0; i < m; ++i) G(i, j) = rng.normal();
    return {cr.L * G};
}

/// K_hat = (1/N) Z Zᵀ, the empirical covariance of the sampled paths.
inline SymMatrix empirical_gram(const PathMatrix& Z) {
    return SymMatrix(Z.values * Z.values.transpose() / static_cast<double>(Z.num_paths()));
}

/// Closed-form logHS/aiHS distance for covariance operators sharing
/// eigenfunctions: sqrt(sum_k log^2((gamma+l1_k)/(gamma+l2_k))).
inline double commuting_oracle(const std::vector<double>& spectrum1,
                               const std::vector<double>& spectrum2, double gamma) {
    if (gamma <= 0.0) throw InputError("commuting_oracle: gamma must be > 0");
    if (spectrum1.size() != spectrum2.size())
        throw InputError("commuting_oracle: spectra must have equal length");
    double s = 0.0;
    for (std::size_t k = 0; k < spectrum1.size(); ++k) {
        if (spectrum1[k] < 0.0 || spectrum2[k] < 0.0)
            throw InputError("commuting_oracle: spectra must be nonnegative");
        double t = std::log((gamma + spectrum1[k]) / (gamma + spectrum2[k]));
        s += t * t;
    }
    return std::sqrt(s);
}

/// Mercer spectrum of s2*min(x,y) on [0,1]: lambda_k = s2 / ((k-1/2)^2 pi^2).
inline std::vector<double> brownian_spectrum(double s2, std::size_t k_max) {
    std::vector<double> lam(k_max);
    for (std::size_t k = 1; k <= k_max; ++k) {
        double w = (static_cast<double>(k) - 0.5) * M_PI;
        lam[k - 1] = s2 / (w * w);
    }
    return lam;
}

/// Tail bound for the truncated Brownian spectrum: sum_{k>k_max} lambda_k
/// <= s2 / (pi^2 k_max).
inline double brownian_spectrum_tail_bound(double s2, std::size_t k_max) {
    return s2 / (M_PI * M_PI * static_cast<double>(k_max));
}

}  // namespace covdist
