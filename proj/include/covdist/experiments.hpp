#pragma once

#include <algorithm>
#include <atomic>
#include <limits>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "covdist/distances.hpp"
#include "covdist/kernels.hpp"
#include "covdist/rkhs.hpp"
#include "covdist/rng.hpp"

namespace covdist {

inline std::string metric_name(Metric m) {
    switch (m) {
        case Metric::Hs: return "hs";
        case Metric::Sqrt: return "sqrt";
        case Metric::Bw: return "bw";
        case Metric::LogHs: return "loghs";
        case Metric::AiHs: return "aihs";
        case Metric::Sinkhorn: return "sinkhorn";
    }
    return "?";
}

inline Metric parse_metric(const std::string& s) {
    if (s == "hs") return Metric::Hs;
    if (s == "sqrt") return Metric::Sqrt;
    if (s == "bw") return Metric::Bw;
    if (s == "loghs") return Metric::LogHs;
    if (s == "aihs") return Metric::AiHs;
    if (s == "sinkhorn") return Metric::Sinkhorn;
    throw InputError("unknown metric: " + s);
}

/// Distance between two covariance matrices under any supported metric.
/// gamma regularizes loghs/aihs; epsilon is the Sinkhorn regularization.
inline double metric_distance(const SymMatrix& A, const SymMatrix& B, double gamma, Metric metric,
                              double epsilon = 0.1) {
    switch (metric) {
        case Metric::Hs: return dist_hs(A, B);
        case Metric::Sqrt: return dist_sqrt(A, B);
        case Metric::Bw: return dist_bw(A, B);
        case Metric::LogHs:
            return dist_loghs(RegularizedOperator(A, gamma), RegularizedOperator(B, gamma));
        case Metric::AiHs:
            return dist_aihs(RegularizedOperator(A, gamma), RegularizedOperator(B, gamma));
        case Metric::Sinkhorn:
            return sinkhorn_gauss(GaussianMoments(Vector::Zero(A.dim()), A),
                                  GaussianMoments(Vector::Zero(B.dim()), B), epsilon);
    }
    throw InputError("metric_distance: unknown metric");
}

/// Plug-in estimator: distance between the regularized scaled empirical
/// covariances ((1/m) Z Zᵀ / N, gamma).
inline double estimate_distance_from_paths(const PathMatrix& Z1, const PathMatrix& Z2,
                                           double gamma, Metric metric, double epsilon = 0.1) {
    if (Z1.num_points() != Z2.num_points())
        throw InputError("estimate_distance_from_paths: path matrices must share m");
    double m = static_cast<double>(Z1.num_points());
    SymMatrix C1(empirical_gram(Z1).mat() / m);
    SymMatrix C2(empirical_gram(Z2).mat() / m);
    return metric_distance(C1, C2, gamma, metric, epsilon);
}

namespace detail {

template <typename F>
void parallel_for(std::size_t n, int threads, F&& body) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    int k = std::min<int>(threads, static_cast<int>(n));
    pool.reserve(k);
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

inline int default_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

/// Evaluates several metrics on the first N paths of two pools, sharing the
/// expensive spectral work.  Equivalent to estimate_distance_from_paths on
/// the truncated pools, up to round-off in the alternate loghs/aihs routes.
inline std::vector<double> estimate_metrics_from_path_prefix(
    const Matrix& Z1, const Matrix& Z2, Eigen::Index N, double gamma,
    const std::vector<Metric>& metrics) {
    Eigen::Index m = Z1.rows();
    auto Z1n = Z1.leftCols(N);
    auto Z2n = Z2.leftCols(N);
    double scale = static_cast<double>(m) * static_cast<double>(N);

    bool want_loghs = false, want_aihs = false, want_other = false;
    for (Metric me : metrics) {
        want_loghs |= me == Metric::LogHs;
        want_aihs |= me == Metric::AiHs;
        want_other |= me != Metric::LogHs && me != Metric::AiHs;
    }

    double v_loghs = 0.0, v_aihs = 0.0;
    bool ambient_needed = want_other || ((want_loghs || want_aihs) && 2 * N >= m);
    if ((want_loghs || want_aihs) && 2 * N < m) {
        // rank < m/2: the factor (kernel-trick) route works in 2N dimensions
        double root = std::sqrt(scale);
        FeatureFactor F1{Z1n / root}, F2{Z2n / root};
        if (want_loghs) v_loghs = loghs_from_factors(F1, gamma, F2, gamma);
        if (want_aihs) v_aihs = aihs_from_factors(F1, gamma, F2, gamma);
    }

    SymMatrix A1 = SymMatrix::zero(1), A2 = SymMatrix::zero(1);
    if (ambient_needed) {
        A1 = SymMatrix(Z1n * Z1n.transpose() / scale);
        A2 = SymMatrix(Z2n * Z2n.transpose() / scale);
    }
    if ((want_loghs || want_aihs) && 2 * N >= m) {
        Matrix I = Matrix::Identity(m, m);
        SpectralDecomposition sd1 = sym_eig(SymMatrix(A1.mat() / gamma + I));
        SpectralDecomposition sd2 = sym_eig(SymMatrix(A2.mat() / gamma + I));
        Vector l1 = sd1.eigenvalues.cwiseMax(1.0), l2 = sd2.eigenvalues.cwiseMax(1.0);
        if (want_loghs) {
            Matrix L1 = sd1.eigenvectors * l1.array().log().matrix().asDiagonal() *
                        sd1.eigenvectors.transpose();
            Matrix L2 = sd2.eigenvectors * l2.array().log().matrix().asDiagonal() *
                        sd2.eigenvectors.transpose();
            v_loghs = (L1 - L2).norm();
        }
        if (want_aihs) {
            Matrix C = sd1.eigenvectors * l1.array().rsqrt().matrix().asDiagonal() *
                       sd1.eigenvectors.transpose();
            Matrix M = C * (A2.mat() / gamma + I) * C;
            Vector nu = sym_eig(SymMatrix(M)).eigenvalues.cwiseMax(
                std::numeric_limits<double>::min());
            v_aihs = std::sqrt(nu.array().log().square().sum());
        }
    }

    std::vector<double> out;
    out.reserve(metrics.size());
    for (Metric me : metrics) {
        if (me == Metric::LogHs)
            out.push_back(v_loghs);
        else if (me == Metric::AiHs)
            out.push_back(v_aihs);
        else
            out.push_back(metric_distance(A1, A2, gamma, me));
    }
    return out;
}

}  // namespace detail

enum class ReferenceKind { Oracle, Largest };

struct ConvergenceConfig {
    std::string experiment = "converge";
    KernelSpec kernel1 = KernelSpec::laplacian(1.0);
    KernelSpec kernel2 = KernelSpec::laplacian(1.2);
    DomainSpec domain{1};
    Eigen::Index m = 500;
    std::vector<Eigen::Index> path_counts;
    double gamma = 1e-9;
    std::vector<Metric> metrics = {Metric::LogHs, Metric::AiHs};
    int trials = 1;
    ReferenceKind reference = ReferenceKind::Largest;
    std::uint64_t base_seed = 0;
    std::size_t oracle_k_max = 1000000;

    std::vector<std::string> validate() const {
        std::vector<std::string> errs;
        if (path_counts.empty()) errs.push_back("path_counts: must be nonempty");
        for (std::size_t i = 0; i + 1 < path_counts.size(); ++i)
            if (path_counts[i] >= path_counts[i + 1]) {
                errs.push_back("path_counts: must be strictly ascending");
                break;
            }
        for (auto n : path_counts)
            if (n < 1) {
                errs.push_back("path_counts: entries must be >= 1");
                break;
            }
        if (m < 1) errs.push_back("m: must be >= 1");
        if (trials < 1) errs.push_back("trials: must be >= 1");
        if (gamma <= 0.0) errs.push_back("gamma: must be > 0");
        if (metrics.empty()) errs.push_back("metrics: must be nonempty");
        if (reference == ReferenceKind::Oracle &&
            (kernel1.family != KernelSpec::Family::Brownian ||
             kernel2.family != KernelSpec::Family::Brownian))
            errs.push_back("reference: oracle requires brownian kernels");
        return errs;
    }
};

struct ResultRow {
    std::string experiment;
    int trial;
    Eigen::Index N;
    Eigen::Index m;
    std::string metric;
    double estimate;
    double reference;
    double abs_error;
    double wall_time_ms;
};

inline std::vector<ResultRow> run_convergence(const ConvergenceConfig& cfg,
                                              int threads = detail::default_threads()) {
    auto errs = cfg.validate();
    if (!errs.empty()) {
        std::string msg = "invalid convergence config:";
        for (auto& e : errs) msg += "\n  " + e;
        throw InputError(msg);
    }

    std::optional<double> oracle_value;
    if (cfg.reference == ReferenceKind::Oracle) {
        oracle_value = commuting_oracle(brownian_spectrum(cfg.kernel1.param, cfg.oracle_k_max),
                                        brownian_spectrum(cfg.kernel2.param, cfg.oracle_k_max),
                                        cfg.gamma);
    }

    std::size_t nN = cfg.path_counts.size();
    std::size_t nM = cfg.metrics.size();
    // estimates[trial][iN][iMetric], filled independently per trial
    std::vector<std::vector<std::vector<double>>> est(
        cfg.trials, std::vector<std::vector<double>>(nN, std::vector<double>(nM, 0.0)));
    std::vector<std::vector<std::vector<double>>> times = est;

    detail::parallel_for(static_cast<std::size_t>(cfg.trials), threads, [&](std::size_t t) {
        PointSet X = sample_points(cfg.domain, cfg.m, derive_seed(cfg.base_seed, 1, t));
        SymMatrix K1 = gram(cfg.kernel1, X);
        SymMatrix K2 = gram(cfg.kernel2, X);
        // One growing sample per trial: the estimate at N uses the first N of
        // the N_max paths, so the sequence tracks a single experiment with an
        // increasing number of sample paths.
        // Common random numbers: both processes are driven by the same
        // standard normal block, so the empirical ranges stay aligned and the
        // estimate sequence decays at the Monte-Carlo rate instead of being
        // swamped by rank-mismatch noise in the log spectrum.
        Eigen::Index n_max = cfg.path_counts.back();
        PathMatrix Z1 = sample_paths(K1, n_max, derive_seed(cfg.base_seed, 2, t));
        PathMatrix Z2 = sample_paths(K2, n_max, derive_seed(cfg.base_seed, 2, t));
        for (std::size_t iN = 0; iN < nN; ++iN) {
            auto t0 = std::chrono::steady_clock::now();
            std::vector<double> vals = detail::estimate_metrics_from_path_prefix(
                Z1.values, Z2.values, cfg.path_counts[iN], cfg.gamma, cfg.metrics);
            auto t1 = std::chrono::steady_clock::now();
            double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            for (std::size_t im = 0; im < nM; ++im) {
                est[t][iN][im] = vals[im];
                times[t][iN][im] = ms;
            }
        }
    });

    std::vector<ResultRow> rows;
    rows.reserve(static_cast<std::size_t>(cfg.trials) * nN * nM);
    for (int t = 0; t < cfg.trials; ++t)
        for (std::size_t iN = 0; iN < nN; ++iN)
            for (std::size_t im = 0; im < nM; ++im) {
                double ref = oracle_value ? *oracle_value : est[t][nN - 1][im];
                double e = est[t][iN][im];
                rows.push_back({cfg.experiment, t, cfg.path_counts[iN], cfg.m,
                                metric_name(cfg.metrics[im]), e, ref, std::abs(e - ref),
                                times[t][iN][im]});
            }
    return rows;
}

/// Least-squares slope of log(mean abs_error) vs log N, mean taken over
/// trials at each N.  N values whose mean error is 0 (e.g. the reference
/// point itself) are excluded.
inline double fit_loglog_slope(const std::vector<ResultRow>& rows) {
    std::vector<std::pair<Eigen::Index, std::pair<double, int>>> acc;  // N -> (sum, count)
    for (const auto& r : rows) {
        auto it = std::find_if(acc.begin(), acc.end(),
                               [&](const auto& p) { return p.first == r.N; });
        if (it == acc.end())
            acc.push_back({r.N, {r.abs_error, 1}});
        else {
            it->second.first += r.abs_error;
            it->second.second += 1;
        }
    }
    std::vector<double> lx, ly;
    for (const auto& [N, sc] : acc) {
        double mean = sc.first / sc.second;
        if (mean > 0.0) {
            lx.push_back(std::log(static_cast<double>(N)));
            ly.push_back(std::log(mean));
        }
    }
    if (lx.size() < 3) throw InputError("fit_loglog_slope: need >= 3 distinct N with positive mean error");
    double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Nearest-neighbor classification
// ---------------------------------------------------------------------------

struct LabeledCov {
    SymMatrix cov;
    int label;
};

struct NnResult {
    std::vector<int> predicted;
    Eigen::MatrixXi confusion;  // rows: true label, cols: predicted
    double error_rate;
};

namespace detail {

/// Per-item precomputation so the pairwise loop stays cheap; transformations
/// depend only on one side of each pair.
struct NnSide {
    std::vector<Matrix> transform;  // metric-dependent
    std::vector<double> trace;      // for bw/sinkhorn
    std::vector<double> aux;        // sinkhorn: logdet(I + M_ii/2); bw: unused
};

inline NnSide nn_precompute(const std::vector<const SymMatrix*>& items, double gamma,
                            Metric metric, double epsilon, bool is_query, int threads) {
    NnSide side;
    std::size_t n = items.size();
    side.transform.resize(n);
    side.trace.resize(n, 0.0);
    side.aux.resize(n, 0.0);
    double c = 16.0 / (epsilon * epsilon);
    parallel_for(n, threads, [&](std::size_t i) {
        const SymMatrix& A = *items[i];
        Eigen::Index d = A.dim();
        Matrix I = Matrix::Identity(d, d);
        switch (metric) {
            case Metric::Hs:
                side.transform[i] = A.mat();
                break;
            case Metric::Sqrt:
                side.transform[i] = spd_func(A, ScalarFn::sqrt()).mat();
                break;
            case Metric::LogHs:
                side.transform[i] =
                    spd_func(SymMatrix(A.mat() / gamma + I), ScalarFn::log()).mat();
                break;
            case Metric::AiHs:
                // query side carries (A/gamma+I)^{-1/2}; train side the raw matrix
                side.transform[i] =
                    is_query
                        ? spd_func(SymMatrix(A.mat() / gamma + I), ScalarFn::inv_sqrt()).mat()
                        : Matrix(A.mat() / gamma + I);
                break;
            case Metric::Bw:
                side.transform[i] = is_query ? spd_func(A, ScalarFn::sqrt()).mat() : A.mat();
                side.trace[i] = A.mat().trace();
                break;
            case Metric::Sinkhorn: {
                Matrix Ch = spd_func(A, ScalarFn::sqrt()).mat();
                side.transform[i] = is_query ? Ch : A.mat();
                SymMatrix Mii(spd_func(SymMatrix(I + c * Ch * A.mat() * Ch), ScalarFn::sqrt())
                                  .mat() -
                              I);
                side.trace[i] = Mii.mat().trace();
                side.aux[i] = logdet_i_plus(SymMatrix(0.5 * Mii.mat()));
                break;
            }
        }
    });
    return side;
}

inline double nn_pair_distance(const NnSide& q, std::size_t i, const NnSide& t, std::size_t j,
                               Metric metric, double epsilon) {
    switch (metric) {
        case Metric::Hs:
        case Metric::Sqrt:
        case Metric::LogHs:
            return (q.transform[i] - t.transform[j]).norm();
        case Metric::AiHs: {
            SymMatrix inner(q.transform[i] * t.transform[j] * q.transform[i]);
            return spd_func(inner, ScalarFn::log()).mat().norm();
        }
        case Metric::Bw: {
            const Matrix& Qh = q.transform[i];
            SymMatrix inner(Qh * t.transform[j] * Qh);
            double tr = q.trace[i] + t.trace[j] -
                        2.0 * spd_func(inner, ScalarFn::sqrt()).mat().trace();
            return std::sqrt(std::max(tr, 0.0));
        }
        case Metric::Sinkhorn: {
            double c = 16.0 / (epsilon * epsilon);
            Eigen::Index d = q.transform[i].rows();
            Matrix I = Matrix::Identity(d, d);
            const Matrix& Qh = q.transform[i];
            Vector nu = clip_eigenvalues(
                sym_eig(SymMatrix(I + c * Qh * t.transform[j] * Qh)).eigenvalues,
                kDefaultClipTol);
            double tr01 = 0.0, logdet01 = 0.0;
            for (Eigen::Index k = 0; k < nu.size(); ++k) {
                double mk = std::sqrt(nu[k]) - 1.0;  // eigenvalue of M01
                tr01 += mk;
                logdet01 += std::log1p(0.5 * mk);
            }
            double trace_term = q.trace[i] - 2.0 * tr01 + t.trace[j];
            double logdet_term = 2.0 * logdet01 - q.aux[i] - t.aux[j];
            return (epsilon / 4.0) * (trace_term + logdet_term);
        }
    }
    throw InputError("nn_pair_distance: unknown metric");
}

}  // namespace detail

/// 1-nearest-neighbor classification of covariance matrices; ties broken by
/// lowest train index.
inline NnResult nn_classify(const std::vector<LabeledCov>& train,
                            const std::vector<LabeledCov>& test, double gamma, Metric metric,
                            double epsilon = 0.1, int threads = detail::default_threads()) {
    if (train.empty()) throw InputError("nn_classify: train set must be nonempty");
    int num_labels = 0;
    for (const auto& it : train) num_labels = std::max(num_labels, it.label + 1);
    for (const auto& it : test) num_labels = std::max(num_labels, it.label + 1);

    std::vector<const SymMatrix*> train_items, test_items;
    for (const auto& it : train) train_items.push_back(&it.cov);
    for (const auto& it : test) test_items.push_back(&it.cov);
    detail::NnSide q = detail::nn_precompute(test_items, gamma, metric, epsilon, true, threads);
    detail::NnSide tr = detail::nn_precompute(train_items, gamma, metric, epsilon, false, threads);

    NnResult res;
    res.predicted.assign(test.size(), -1);
    detail::parallel_for(test.size(), threads, [&](std::size_t i) {
        double best = std::numeric_limits<double>::infinity();
        int best_label = -1;
        for (std::size_t j = 0; j < train.size(); ++j) {
            double d = detail::nn_pair_distance(q, i, tr, j, metric, epsilon);
            if (d < best) {
                best = d;
                best_label = train[j].label;
            }
        }
        res.predicted[i] = best_label;
    });

    res.confusion = Eigen::MatrixXi::Zero(num_labels, num_labels);
    int wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        res.confusion(test[i].label, res.predicted[i]) += 1;
        if (res.predicted[i] != test[i].label) ++wrong;
    }
    res.error_rate = test.empty() ? 0.0 : static_cast<double>(wrong) / test.size();
    return res;
}

// ---------------------------------------------------------------------------
// Classification experiment
// ---------------------------------------------------------------------------

struct ClassificationConfig {
    double sigma1 = 1.0;  // Laplacian rate, class 0
    double sigma2 = 1.3;  // Laplacian rate, class 1
    int d = 1;
    Eigen::Index m = 200;
    Eigen::Index N = 500;
    int train_per_class = 5;
    int test_per_class = 50;
    int repeats = 5;
    double gamma = 1e-9;
    double epsilon_sinkhorn = 0.1;
    std::vector<Metric> metrics = {Metric::Hs, Metric::Bw, Metric::Sinkhorn, Metric::LogHs,
                                   Metric::AiHs};
    std::uint64_t base_seed = 0;

    std::vector<std::string> validate() const {
        std::vector<std::string> errs;
        if (sigma1 <= 0.0) errs.push_back("sigma1: must be > 0");
        if (sigma2 <= 0.0) errs.push_back("sigma2: must be > 0");
        if (d < 1) errs.push_back("d: must be >= 1");
        if (m < 1) errs.push_back("m: must be >= 1");
        if (N < 1) errs.push_back("N: must be >= 1");
        if (train_per_class < 1) errs.push_back("train_per_class: must be >= 1");
        if (test_per_class < 1) errs.push_back("test_per_class: must be >= 1");
        if (repeats < 1) errs.push_back("repeats: must be >= 1");
        if (gamma <= 0.0) errs.push_back("gamma: must be > 0");
        if (epsilon_sinkhorn <= 0.0) errs.push_back("epsilon_sinkhorn: must be > 0");
        if (metrics.empty()) errs.push_back("metrics: must be nonempty");
        return errs;
    }
};

struct MetricErrors {
    std::string metric;
    double mean_error;
    double std_error;
    std::vector<Eigen::MatrixXi> confusions;  // one per repeat
};

inline std::vector<MetricErrors> run_classification(const ClassificationConfig& cfg,
                                                    int threads = detail::default_threads()) {
    auto errs = cfg.validate();
    if (!errs.empty()) {
        std::string msg = "invalid classification config:";
        for (auto& e : errs) msg += "\n  " + e;
        throw InputError(msg);
    }

    DomainSpec domain(cfg.d);
    KernelSpec specs[2] = {KernelSpec::laplacian(cfg.sigma1), KernelSpec::laplacian(cfg.sigma2)};
    int per_class = cfg.train_per_class + cfg.test_per_class;

    // errors[metric][repeat]
    std::vector<std::vector<double>> err(cfg.metrics.size(),
                                         std::vector<double>(cfg.repeats, 0.0));
    std::vector<std::vector<Eigen::MatrixXi>> conf(cfg.metrics.size());
    for (auto& c : conf) c.resize(cfg.repeats);

    for (int r = 0; r < cfg.repeats; ++r) {
        // One point set per repeat, shared by every covariance sample of both
        // classes; each covariance then draws its own fresh paths.  Distances
        // between discretizations on unrelated point sets are dominated by the
        // gamma-amplified discretization noise and carry no class signal.
        PointSet X = sample_points(domain, cfg.m, derive_seed(cfg.base_seed, 6, r));
        SymMatrix K[2] = {gram(specs[0], X), gram(specs[1], X)};
        // Each process contributes one pool of 4N sample paths per repeat;
        // every covariance sample is built from its own random N-subset of
        // that pool.  Fully independent pools of N paths per sample leave the
        // log-domain estimation noise (which at gamma = 1e-9 dwarfs the
        // between-class signal for nearby kernel rates) uncorrelated between
        // samples, washing out the class structure for every metric alike.
        const Eigen::Index pool_n = 4 * cfg.N;
        PathMatrix pool[2];
        for (int c = 0; c < 2; ++c)
            pool[c] = sample_paths(K[c], pool_n, derive_seed(cfg.base_seed, 8, r, c));
        std::vector<LabeledCov> train, test;
        std::vector<std::vector<SymMatrix>> covs(2);
        for (int c = 0; c < 2; ++c)
            covs[c].assign(per_class, SymMatrix::zero(1));
        detail::parallel_for(static_cast<std::size_t>(2 * per_class), threads,
                             [&](std::size_t idx) {
                                 int c = static_cast<int>(idx) / per_class;
                                 int i = static_cast<int>(idx) % per_class;
                                 RngStream rng(cfg.base_seed, 7,
                                               static_cast<std::uint64_t>(r),
                                               static_cast<std::uint64_t>(c * per_class + i));
                                 // Partial Fisher-Yates: first N entries of a
                                 // shuffled index range select the subset.
                                 std::vector<Eigen::Index> ix(static_cast<std::size_t>(pool_n));
                                 std::iota(ix.begin(), ix.end(), Eigen::Index{0});
                                 for (Eigen::Index k = 0; k < cfg.N; ++k) {
                                     auto j = k + static_cast<Eigen::Index>(
                                                      rng.uniform() *
                                                      static_cast<double>(pool_n - k));
                                     if (j >= pool_n) j = pool_n - 1;
                                     std::swap(ix[static_cast<std::size_t>(k)],
                                               ix[static_cast<std::size_t>(j)]);
                                 }
                                 PathMatrix Z{Matrix(cfg.m, cfg.N)};
                                 for (Eigen::Index k = 0; k < cfg.N; ++k)
                                     Z.values.col(k) =
                                         pool[c].values.col(ix[static_cast<std::size_t>(k)]);
                                 covs[c][i] = SymMatrix(empirical_gram(Z).mat() /
                                                        static_cast<double>(cfg.m));
                             });
        for (int c = 0; c < 2; ++c) {
            for (int i = 0; i < cfg.train_per_class; ++i) train.push_back({covs[c][i], c});
            for (int i = cfg.train_per_class; i < per_class; ++i) test.push_back({covs[c][i], c});
        }
        for (std::size_t im = 0; im < cfg.metrics.size(); ++im) {
            NnResult res = nn_classify(train, test, cfg.gamma, cfg.metrics[im],
                                       cfg.epsilon_sinkhorn, threads);
            err[im][r] = res.error_rate;
            conf[im][r] = res.confusion;
        }
    }

    std::vector<MetricErrors> out;
    for (std::size_t im = 0; im < cfg.metrics.size(); ++im) {
        double mean = 0.0;
        for (double e : err[im]) mean += e;
        mean /= cfg.repeats;
        double var = 0.0;
        if (cfg.repeats > 1) {
            for (double e : err[im]) var += (e - mean) * (e - mean);
            var /= (cfg.repeats - 1);
        }
        out.push_back({metric_name(cfg.metrics[im]), mean, std::sqrt(var), conf[im]});
    }
    return out;
}

}  // namespace covdist
