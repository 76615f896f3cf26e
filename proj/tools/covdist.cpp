// covdist: distances between covariance matrices and Gaussian-process
// covariance operators, with convergence and classification experiment
// runners.
//
// Exit codes: 0 success, 1 identity/acceptance failure, 2 input error,
// 3 numerical error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "covdist/covdist.hpp"

namespace {

using namespace covdist;

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("COVDIST_SEED");
    if (!s || !*s) return std::nullopt;
    return std::strtoull(s, nullptr, 10);
}

// Precedence: explicit --seed > config value > COVDIST_SEED > built-in default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli_seed,
                           const std::optional<std::uint64_t>& config_seed) {
    if (cli_seed) return *cli_seed;
    if (config_seed) return *config_seed;
    if (auto e = env_seed()) return *e;
    return 0;
}

int do_dist(const std::string& a_path, const std::string& b_path, const std::string& metric,
            double gamma, std::optional<double> gamma2, double alpha, double epsilon) {
    SymMatrix A(read_matrix_csv(a_path));
    SymMatrix B(read_matrix_csv(b_path));
    double g2 = gamma2.value_or(gamma);
    double d;
    if (metric == "hs")
        d = dist_hs(A, B);
    else if (metric == "sqrt")
        d = dist_sqrt(A, B);
    else if (metric == "bw")
        d = dist_bw(A, B);
    else if (metric == "power")
        d = dist_power_euclid(A, B, alpha);
    else if (metric == "procrustes")
        d = dist_alpha_procrustes(A, B, alpha);
    else if (metric == "ai")
        d = dist_ai_exact(A, B);
    else if (metric == "loghs")
        d = dist_loghs(RegularizedOperator(A, gamma), RegularizedOperator(B, g2));
    else if (metric == "aihs")
        d = dist_aihs(RegularizedOperator(A, gamma), RegularizedOperator(B, g2));
    else if (metric == "sinkhorn")
        d = sinkhorn_gauss(GaussianMoments(Vector::Zero(A.dim()), A),
                           GaussianMoments(Vector::Zero(B.dim()), B), epsilon);
    else
        throw InputError("unknown metric: " + metric);
    std::printf("%.12g\n", d);
    return 0;
}

int do_converge(const std::string& config_path, const std::string& out_path,
                std::optional<std::uint64_t> seed, int threads) {
    json j = load_json(config_path);
    ConvergenceConfig cfg = parse_convergence_config(j);
    std::optional<std::uint64_t> config_seed;
    if (j.contains("base_seed")) config_seed = cfg.base_seed;
    cfg.base_seed = resolve_seed(seed, config_seed);
    auto rows = run_convergence(cfg, threads);
    write_convergence_csv(out_path, rows);
    write_convergence_summary(out_path + ".summary.csv", rows);
    if (cfg.reference == ReferenceKind::Largest)
        std::fprintf(stderr, "reference: estimate at largest N (N=%lld) per trial\n",
                     static_cast<long long>(cfg.path_counts.back()));
    else
        std::fprintf(stderr, "reference: truncated commuting spectrum oracle\n");
    return 0;
}

int do_classify(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed, int threads) {
    json j = load_json(config_path);
    ClassificationConfig cfg = parse_classification_config(j);
    std::optional<std::uint64_t> config_seed;
    if (j.contains("base_seed")) config_seed = cfg.base_seed;
    cfg.base_seed = resolve_seed(seed, config_seed);
    auto results = run_classification(cfg, threads);
    write_classification_outputs(out_dir, results);
    for (const auto& r : results)
        std::printf("%s: mean error %.4g, std %.4g\n", r.metric.c_str(), r.mean_error,
                    r.std_error);
    return 0;
}

int do_identity_check(std::optional<std::uint64_t> seed, int trials) {
    IdentityReport rep = run_identity_check(resolve_seed(seed, std::nullopt), trials);
    std::printf("log_from_factor  max deviation %.3e (tol %.0e)\n", rep.max_dev_log_from_factor,
                IdentityReport::tol_log_from_factor);
    std::printf("loghs_from_factors max relative deviation %.3e (tol %.0e)\n", rep.max_dev_loghs,
                IdentityReport::tol_loghs);
    std::printf("aihs_from_factors  max relative deviation %.3e (tol %.0e)\n", rep.max_dev_aihs,
                IdentityReport::tol_aihs);
    if (!rep.pass) {
        std::printf("FAIL: first offending trial seed %llu\n",
                    static_cast<unsigned long long>(rep.first_fail_seed));
        return 1;
    }
    std::printf("PASS (%d trials)\n", trials);
    return 0;
}

int do_oracle(double s1, double s2, double gamma, std::size_t kmax) {
    double v = commuting_oracle(brownian_spectrum(s1, kmax), brownian_spectrum(s2, kmax), gamma);
    std::printf("%.12g\n", v);
    std::fprintf(stderr, "spectrum truncation tail bound: %.3e (each kernel)\n",
                 brownian_spectrum_tail_bound(std::max(s1, s2), kmax));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distances between Gaussian-process covariance operators"};
    app.require_subcommand(1);

    std::string a_path, b_path, metric = "loghs", config_path, out_path;
    double gamma = 1.0, alpha = 0.5, epsilon = 0.1;
    std::optional<double> gamma2;
    std::optional<std::uint64_t> seed;
    int trials = 100;
    int threads = covdist::detail::default_threads();
    double s1 = 1.0, s2 = 4.0;
    std::size_t kmax = 1000000;

    auto* dist = app.add_subcommand("dist", "distance between two matrix CSV files");
    dist->add_option("a", a_path, "first matrix file")->required();
    dist->add_option("b", b_path, "second matrix file")->required();
    dist->add_option("--metric", metric,
                     "hs|sqrt|bw|power|procrustes|ai|loghs|aihs|sinkhorn");
    dist->add_option("--gamma", gamma, "regularization (loghs/aihs)");
    dist->add_option("--gamma2", gamma2, "second regularization (defaults to --gamma)");
    dist->add_option("--alpha", alpha, "exponent for power/procrustes");
    dist->add_option("--epsilon", epsilon, "Sinkhorn regularization");

    auto* conv = app.add_subcommand("converge", "convergence experiment from a JSON config");
    conv->add_option("--config", config_path, "config file")->required();
    conv->add_option("--out", out_path, "output CSV path")->required();
    conv->add_option("--seed", seed, "base seed override");
    conv->add_option("--threads", threads, "worker threads");

    auto* cls = app.add_subcommand("classify", "classification experiment from a JSON config");
    cls->add_option("--config", config_path, "config file")->required();
    cls->add_option("--out", out_path, "output directory")->required();
    cls->add_option("--seed", seed, "base seed override");
    cls->add_option("--threads", threads, "worker threads");

    auto* idc = app.add_subcommand("identity-check", "factor/ambient identity suite");
    idc->add_option("--seed", seed, "base seed");
    idc->add_option("--trials", trials, "number of random trials");

    auto* orc = app.add_subcommand("oracle", "truncated Brownian commuting-spectrum oracle");
    orc->add_option("--s1", s1, "variance scale of first Brownian kernel");
    orc->add_option("--s2", s2, "variance scale of second Brownian kernel");
    orc->add_option("--gamma", gamma, "regularization")->required();
    orc->add_option("--kmax", kmax, "spectrum truncation index");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dist->parsed()) return do_dist(a_path, b_path, metric, gamma, gamma2, alpha, epsilon);
        if (conv->parsed()) return do_converge(config_path, out_path, seed, threads);
        if (cls->parsed()) return do_classify(config_path, out_path, seed, threads);
        if (idc->parsed()) return do_identity_check(seed, trials);
        if (orc->parsed()) return do_oracle(s1, s2, gamma, kmax);
    } catch (const covdist::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const covdist::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
