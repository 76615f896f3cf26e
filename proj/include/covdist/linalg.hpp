#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace covdist {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Dense real symmetric matrix.  Symmetrization (M+Mᵀ)/2 is applied on
/// construction, so entries[i][j] == entries[j][i] exactly.
class SymMatrix {
  public:
    explicit SymMatrix(const Matrix& m) {
        if (m.rows() != m.cols() || m.rows() < 1)
            throw InputError("SymMatrix: matrix must be square, n >= 1");
        mat_ = 0.5 * (m + m.transpose());
    }

    static SymMatrix identity(Eigen::Index n) { return SymMatrix(Matrix::Identity(n, n)); }
    static SymMatrix zero(Eigen::Index n) { return SymMatrix(Matrix::Zero(n, n)); }
    static SymMatrix diagonal(const Vector& d) {
        return SymMatrix(Matrix(d.asDiagonal()));
    }

    Eigen::Index dim() const { return mat_.rows(); }
    const Matrix& mat() const { return mat_; }

  private:
    Matrix mat_;
};

/// Eigensystem of a SymMatrix, eigenvalues descending, eigenvectors as
/// orthonormal columns of U.
struct SpectralDecomposition {
    Vector eigenvalues;
    Matrix eigenvectors;
};

/// Real part of a general (possibly non-symmetric) spectrum; construction
/// verifies the imaginary parts are round-off and discards them.
struct GeneralSpectrum {
    Vector eigenvalues;       // descending by real part
    double max_imag = 0.0;    // largest |Im| seen, for diagnostics
};

inline SpectralDecomposition sym_eig(const SymMatrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M.mat());
    if (es.info() != Eigen::Success) {
        std::ostringstream os;
        os << "sym_eig: eigensolver failed to converge (n=" << M.dim()
           << ", |M|_F=" << M.mat().norm() << ", max|entry|=" << M.mat().cwiseAbs().maxCoeff()
           << ")";
        throw NumericalError(os.str());
    }
    // Eigen returns ascending order; flip to descending.
    Eigen::Index n = M.dim();
    SpectralDecomposition sd;
    sd.eigenvalues = es.eigenvalues().reverse();
    sd.eigenvectors = es.eigenvectors().rowwise().reverse();
    (void)n;
    return sd;
}

/// Scalar function tag for spd_func.
struct ScalarFn {
    enum class Tag { Log, Pow, Sqrt, InvSqrt, Inv, Log1p, H } tag;
    double alpha = 0.0;  // exponent for Pow

    static ScalarFn log() { return {Tag::Log}; }
    static ScalarFn pow(double a) { return {Tag::Pow, a}; }
    static ScalarFn sqrt() { return {Tag::Sqrt}; }
    static ScalarFn inv_sqrt() { return {Tag::InvSqrt}; }
    static ScalarFn inv() { return {Tag::Inv}; }
    static ScalarFn log1p() { return {Tag::Log1p}; }
    static ScalarFn h() { return {Tag::H}; }

    bool needs_strict_positive() const {
        return tag == Tag::Log || tag == Tag::Inv || tag == Tag::InvSqrt ||
               (tag == Tag::Pow && alpha < 0.0);
    }
};

/// h(x) = log(1+x)/x extended by h(0) = 1.  Series below |x| < 1e-4 since
/// the direct quotient cancels catastrophically near 0.
inline double h_scalar(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x / 2.0 + x * x / 3.0 - x * x * x / 4.0;
    return std::log1p(x) / x;
}

inline double apply_scalar_fn(const ScalarFn& f, double x) {
    switch (f.tag) {
        case ScalarFn::Tag::Log: return std::log(x);
        case ScalarFn::Tag::Pow: return std::pow(x, f.alpha);
        case ScalarFn::Tag::Sqrt: return std::sqrt(x);
        case ScalarFn::Tag::InvSqrt: return 1.0 / std::sqrt(x);
        case ScalarFn::Tag::Inv: return 1.0 / x;
        case ScalarFn::Tag::Log1p: return std::log1p(x);
        case ScalarFn::Tag::H: return h_scalar(x);
    }
    throw InputError("spd_func: unknown scalar function");
}

constexpr double kDefaultClipTol = 1e-10;

/// Clip round-off negatives in an eigenvalue vector: values in
/// (-clip_tol*lambda_max, 0) become 0; anything below the band is an error.
inline Vector clip_eigenvalues(const Vector& lam, double clip_tol) {
    double lam_max = std::max(lam.maxCoeff(), 0.0);
    double threshold = clip_tol * lam_max;
    Vector out = lam;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (out[i] < -threshold) throw NumericalError("not PSD");
        if (out[i] < 0.0) out[i] = 0.0;
    }
    return out;
}

/// U f(Lambda) Uᵀ for a symmetric M, with negative round-off eigenvalues
/// clipped to 0 first.
inline SymMatrix spd_func(const SymMatrix& M, const ScalarFn& f,
                          double clip_tol = kDefaultClipTol) {
    SpectralDecomposition sd = sym_eig(M);
    Vector lam = clip_eigenvalues(sd.eigenvalues, clip_tol);
    if (f.needs_strict_positive()) {
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            if (lam[i] <= 0.0) throw NumericalError("singular");
    }
    Vector flam(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) flam[i] = apply_scalar_fn(f, lam[i]);
    return SymMatrix(sd.eigenvectors * flam.asDiagonal() * sd.eigenvectors.transpose());
}

struct CholResult {
    Matrix L;        // lower triangular, L Lᵀ = M + eps I
    double epsilon;  // jitter actually used, reported never silent
};

/// Cholesky with an explicit jitter schedule {0, 1e-12, ..., 1e-6}·mean(diag).
inline CholResult chol_jitter(const SymMatrix& M) {
    if (M.mat().norm() == 0.0) return {Matrix::Zero(M.dim(), M.dim()), 0.0};
    double scale = M.mat().diagonal().mean();
    std::vector<double> schedule = {0.0};
    for (int e = -12; e <= -6; ++e) schedule.push_back(std::pow(10.0, e) * scale);
    for (double eps : schedule) {
        Matrix A = M.mat();
        A.diagonal().array() += eps;
        Eigen::LLT<Matrix> llt(A);
        if (llt.info() == Eigen::Success) return {Matrix(llt.matrixL()), eps};
    }
    throw NumericalError("not factorizable");
}

/// Eigenvalues of a general real square matrix whose spectrum is expected to
/// be real (similar to a symmetric matrix).  Errors on genuinely complex
/// spectra.
inline GeneralSpectrum eig_general_real(const Matrix& M,
                                        double imag_tol = 1e-8) {
    if (M.rows() != M.cols()) throw InputError("eig_general_real: matrix must be square");
    Eigen::EigenSolver<Matrix> es(M);
    if (es.info() != Eigen::Success) throw NumericalError("eig_general_real: eigensolver failed");
    Eigen::VectorXcd ev = es.eigenvalues();
    GeneralSpectrum gs;
    gs.eigenvalues.resize(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        double re = ev[i].real(), im = std::abs(ev[i].imag());
        gs.max_imag = std::max(gs.max_imag, im);
        if (im > imag_tol * (1.0 + std::abs(re))) throw NumericalError("non-real spectrum");
        gs.eigenvalues[i] = re;
    }
    std::sort(gs.eigenvalues.data(), gs.eigenvalues.data() + gs.eigenvalues.size(),
              std::greater<double>());
    return gs;
}

/// log det(I + M) = sum_k log(1 + lambda_k), defined for eigenvalues > -1.
inline double logdet_i_plus(const SymMatrix& M) {
    SpectralDecomposition sd = sym_eig(M);
    double s = 0.0;
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
        if (sd.eigenvalues[i] <= -1.0) throw NumericalError("log-det undefined");
        s += std::log1p(sd.eigenvalues[i]);
    }
    return s;
}

}  // namespace covdist
