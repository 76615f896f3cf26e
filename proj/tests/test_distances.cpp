#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace covdist;
using testutil::random_pd;
using testutil::random_psd;

namespace {

SymMatrix diag2(double a, double b) {
    Vector d(2);
    d << a, b;
    return SymMatrix::diagonal(d);
}

}  // namespace

TEST_CASE("dist_hs basics and brute-force oracle") {
    RngStream rng(1);
    SymMatrix A = random_psd(rng, 4), B = random_psd(rng, 4);
    CHECK(dist_hs(A, A) == 0.0);
    Vector d2(1), d0(1);
    d2 << 2.0;
    d0 << 0.0;
    CHECK(dist_hs(SymMatrix::diagonal(d2), SymMatrix::diagonal(d0)) == Catch::Approx(2.0));
    double ss = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double e = A.mat()(i, j) - B.mat()(i, j);
            ss += e * e;
        }
    CHECK(std::abs(dist_hs(A, B) - std::sqrt(ss)) < 1e-12);
    CHECK(dist_hs(A, B) == dist_hs(B, A));
}

TEST_CASE("dist_hs dimension mismatch") {
    CHECK_THROWS_AS(dist_hs(SymMatrix::identity(2), SymMatrix::identity(3)), InputError);
}

TEST_CASE("dist_sqrt basics") {
    Vector d4(1), d1(1);
    d4 << 4.0;
    d1 << 1.0;
    CHECK(dist_sqrt(SymMatrix::diagonal(d4), SymMatrix::diagonal(d1)) == Catch::Approx(1.0));
    RngStream rng(2);
    SymMatrix A = random_psd(rng, 3);
    CHECK(dist_sqrt(A, A) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("dist_sqrt equals dist_bw for commuting matrices") {
    RngStream rng(3);
    // simultaneously diagonalizable pair: same eigenvectors, different spectra
    SymMatrix base = random_psd(rng, 4);
    auto sd = sym_eig(base);
    Vector l1(4), l2(4);
    for (int i = 0; i < 4; ++i) {
        l1[i] = 0.5 + rng.uniform();
        l2[i] = 0.5 + rng.uniform();
    }
    SymMatrix A(sd.eigenvectors * l1.asDiagonal() * sd.eigenvectors.transpose());
    SymMatrix B(sd.eigenvectors * l2.asDiagonal() * sd.eigenvectors.transpose());
    CHECK(dist_sqrt(A, B) == Catch::Approx(dist_bw(A, B)).epsilon(1e-8));
}

TEST_CASE("dist_bw basics and diagonal closed form") {
    Vector d4(1), d1(1);
    d4 << 4.0;
    d1 << 1.0;
    CHECK(dist_bw(SymMatrix::diagonal(d4), SymMatrix::diagonal(d1)) == Catch::Approx(1.0));
    RngStream rng(4);
    Vector a(3), b(3);
    for (int i = 0; i < 3; ++i) {
        a[i] = rng.uniform() + 0.1;
        b[i] = rng.uniform() + 0.1;
    }
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) {
        double e = std::sqrt(a[i]) - std::sqrt(b[i]);
        expect += e * e;
    }
    CHECK(dist_bw(SymMatrix::diagonal(a), SymMatrix::diagonal(b)) ==
          Catch::Approx(std::sqrt(expect)).epsilon(1e-10));
}

TEST_CASE("dist_power_euclid special cases") {
    RngStream rng(5);
    SymMatrix A = random_pd(rng, 4), B = random_pd(rng, 4);
    CHECK(dist_power_euclid(A, B, 1.0) == Catch::Approx(dist_hs(A, B)).epsilon(1e-12));
    CHECK(dist_power_euclid(diag2(4, 4), diag2(1, 1), 0.5) ==
          Catch::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    // alpha -> 0 limit approaches the log-Euclidean distance
    double d_small = dist_power_euclid(A, B, 1e-6);
    double d_limit = dist_power_euclid(A, B, 0.0);
    CHECK(std::abs(d_small - d_limit) / d_limit <= 1e-5);
}

TEST_CASE("dist_alpha_procrustes special cases") {
    RngStream rng(6);
    SymMatrix A = random_pd(rng, 4), B = random_pd(rng, 4);
    CHECK(dist_alpha_procrustes(A, B, 0.5) == Catch::Approx(2.0 * dist_bw(A, B)).epsilon(1e-10));
    // self-distance goes through a square root of a cancelled trace, so the
    // residual is at the sqrt(machine-eps) scale
    CHECK(dist_alpha_procrustes(A, A, 0.7) == Catch::Approx(0.0).margin(1e-6));
    // commuting diagonal pair at alpha=1 equals the power-Euclidean distance
    SymMatrix Da = diag2(2.0, 3.0), Db = diag2(1.0, 5.0);
    CHECK(dist_alpha_procrustes(Da, Db, 1.0) ==
          Catch::Approx(dist_power_euclid(Da, Db, 1.0)).epsilon(1e-10));
}

TEST_CASE("dist_loghs analytic cases") {
    RngStream rng(7);
    SymMatrix A = random_psd(rng, 3);
    RegularizedOperator P(A, 0.5);
    CHECK(dist_loghs(P, P) == Catch::Approx(0.0).margin(1e-12));

    double e1 = std::exp(1.0) - 1.0;
    RegularizedOperator Q(SymMatrix(e1 * Matrix::Identity(2, 2)), 1.0);
    RegularizedOperator Z(SymMatrix::zero(2), 1.0);
    CHECK(dist_loghs(Q, Z) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));

    RegularizedOperator S1(SymMatrix::zero(2), std::exp(1.0));
    RegularizedOperator S2(SymMatrix::zero(2), 1.0);
    CHECK(dist_loghs(S1, S2) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dist_aihs analytic cases") {
    RngStream rng(8);
    SymMatrix A = random_psd(rng, 3);
    RegularizedOperator P(A, 1.0);
    CHECK(dist_aihs(P, P) == Catch::Approx(0.0).margin(1e-10));

    Vector a(1), b(1);
    a << 3.0;
    b << 1.0;
    RegularizedOperator Pa(SymMatrix::diagonal(a), 1.0), Pb(SymMatrix::diagonal(b), 1.0);
    CHECK(dist_aihs(Pa, Pb) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("dist_aihs equals dist_loghs and scalar formula for diagonal pairs") {
    RngStream rng(9);
    double gamma = 0.3;
    Vector a(4), b(4);
    for (int i = 0; i < 4; ++i) {
        a[i] = rng.uniform() * 2.0;
        b[i] = rng.uniform() * 2.0;
    }
    RegularizedOperator P(SymMatrix::diagonal(a), gamma), Q(SymMatrix::diagonal(b), gamma);
    double expect = 0.0;
    for (int i = 0; i < 4; ++i) {
        double t = std::log((gamma + a[i]) / (gamma + b[i]));
        expect += t * t;
    }
    expect = std::sqrt(expect);
    CHECK(dist_aihs(P, Q) == Catch::Approx(expect).epsilon(1e-10));
    CHECK(dist_loghs(P, Q) == Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("dist_ai_exact invariances") {
    RngStream rng(10);
    SymMatrix A = random_pd(rng, 4), B = random_pd(rng, 4);
    CHECK(dist_ai_exact(A, A) == Catch::Approx(0.0).margin(1e-10));
    SymMatrix cI(3.0 * Matrix::Identity(4, 4));
    CHECK(dist_ai_exact(cI, SymMatrix::identity(4)) ==
          Catch::Approx(2.0 * std::log(3.0)).epsilon(1e-12));

    // congruence invariance
    Matrix M = testutil::random_matrix(rng, 4, 4) + 3.0 * Matrix::Identity(4, 4);
    SymMatrix MA(M * A.mat() * M.transpose()), MB(M * B.mat() * M.transpose());
    CHECK(dist_ai_exact(MA, MB) == Catch::Approx(dist_ai_exact(A, B)).epsilon(1e-8));

    // inversion invariance, shared with the log-Euclidean limit
    SymMatrix Ai = spd_func(A, ScalarFn::inv()), Bi = spd_func(B, ScalarFn::inv());
    CHECK(dist_ai_exact(Ai, Bi) == Catch::Approx(dist_ai_exact(A, B)).epsilon(1e-8));
    CHECK(dist_power_euclid(Ai, Bi, 0.0) ==
          Catch::Approx(dist_power_euclid(A, B, 0.0)).epsilon(1e-8));
}

TEST_CASE("dist_ai_exact rejects singular input") {
    CHECK_THROWS_AS(dist_ai_exact(SymMatrix::identity(2), SymMatrix::zero(2)), NumericalError);
}

TEST_CASE("sinkhorn_gauss identical measures give zero") {
    RngStream rng(11);
    SymMatrix C = random_psd(rng, 3);
    GaussianMoments mu(Vector::Zero(3), C);
    CHECK(sinkhorn_gauss(mu, mu, 0.5) == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("sinkhorn_gauss matches scalar evaluation") {
    double a = 0.7, eps = 0.3;
    Vector va(1);
    va << a;
    GaussianMoments mu0(Vector::Zero(1), SymMatrix::diagonal(va));
    GaussianMoments mu1(Vector::Zero(1), SymMatrix::zero(1));
    double M00 = -1.0 + std::sqrt(1.0 + 16.0 * a * a / (eps * eps));
    double expect = (eps / 4.0) * M00 - (eps / 4.0) * std::log1p(M00 / 2.0);
    CHECK(sinkhorn_gauss(mu0, mu1, eps) == Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("sinkhorn_gauss approaches squared Bures-Wasserstein as eps -> 0") {
    RngStream rng(12);
    for (int t = 0; t < 5; ++t) {
        SymMatrix A = random_pd(rng, 3), B = random_pd(rng, 3);
        GaussianMoments mu0(Vector::Zero(3), A), mu1(Vector::Zero(3), B);
        double s = sinkhorn_gauss(mu0, mu1, 1e-3);
        double w2 = dist_bw(A, B);
        CHECK(std::abs(s - w2 * w2) <= 0.02 * w2 * w2);
    }
}

TEST_CASE("sinkhorn_gauss rejects nonpositive epsilon") {
    GaussianMoments mu(Vector::Zero(2), SymMatrix::identity(2));
    CHECK_THROWS_AS(sinkhorn_gauss(mu, mu, 0.0), InputError);
}

TEST_CASE("metric axioms hold on random PSD triples") {
    RngStream rng(13);
    const double gamma = 0.1;
    auto metrics = {Metric::Hs, Metric::Sqrt, Metric::Bw, Metric::LogHs, Metric::AiHs};
    for (int t = 0; t < 25; ++t) {
        SymMatrix A = random_psd(rng, 5), B = random_psd(rng, 5), C = random_psd(rng, 5);
        for (Metric m : metrics) {
            double dab = metric_distance(A, B, gamma, m);
            double dba = metric_distance(B, A, gamma, m);
            double dac = metric_distance(A, C, gamma, m);
            double dcb = metric_distance(C, B, gamma, m);
            CHECK(dab >= 0.0);
            // bw on a near-singular A loses the most digits to trace
            // cancellation, so the self-distance check is the loosest one
            CHECK(metric_distance(A, A, gamma, m) <= 1e-4);
            CHECK(std::abs(dab - dba) <= 1e-12 * (1.0 + dab));
            CHECK(dab <= dac + dcb + 1e-10);
        }
    }
}

TEST_CASE("Lipschitz bound for the regularized log map") {
    RngStream rng(14);
    for (double gamma : {0.1, 0.5, 2.0}) {
        for (int t = 0; t < 10; ++t) {
            SymMatrix A = random_psd(rng, 5), B = random_psd(rng, 5);
            Matrix I = Matrix::Identity(5, 5);
            double lhs = (spd_func(SymMatrix(gamma * I + A.mat()), ScalarFn::log()).mat() -
                          spd_func(SymMatrix(gamma * I + B.mat()), ScalarFn::log()).mat())
                             .norm();
            CHECK(lhs <= dist_hs(A, B) / gamma + 1e-10);
        }
    }
}

TEST_CASE("affine-invariant perturbation bound") {
    RngStream rng(15);
    double gamma = 0.5;
    for (int t = 0; t < 10; ++t) {
        SymMatrix A = random_psd(rng, 5);
        SymMatrix E0 = testutil::random_symmetric(rng, 5);
        // scale the perturbation so its operator norm is below gamma
        double op = sym_eig(E0).eigenvalues.cwiseAbs().maxCoeff();
        op = std::max(op, std::abs(sym_eig(E0).eigenvalues.minCoeff()));
        SymMatrix E(E0.mat() * (0.4 * gamma / op));
        double eps = 0.4 * gamma;
        SymMatrix ApE(A.mat() + E.mat());
        // A + E can have small negative eigenvalues; shift both to stay PSD
        double shift = std::max(0.0, -sym_eig(ApE).eigenvalues.minCoeff()) + 1e-12;
        SymMatrix A2(A.mat() + shift * Matrix::Identity(5, 5));
        SymMatrix ApE2(ApE.mat() + shift * Matrix::Identity(5, 5));
        double d = dist_aihs(RegularizedOperator(ApE2, gamma), RegularizedOperator(A2, gamma));
        CHECK(d <= E.mat().norm() / (gamma - eps) + 1e-10);
    }
}

TEST_CASE("loghs scalar-term decomposition") {
    RngStream rng(16);
    for (int t = 0; t < 10; ++t) {
        SymMatrix A = random_psd(rng, 4), B = random_psd(rng, 4);
        double g1 = 0.2 + rng.uniform(), g2 = 0.2 + rng.uniform();
        double full = dist_loghs(RegularizedOperator(A, g1), RegularizedOperator(B, g2));
        double hs_part = dist_loghs(RegularizedOperator(SymMatrix(A.mat() / g1), 1.0),
                                    RegularizedOperator(SymMatrix(B.mat() / g2), 1.0));
        double scalar = std::log(g1 / g2);
        CHECK(std::abs(full * full - hs_part * hs_part - scalar * scalar) < 1e-10);
    }
}
