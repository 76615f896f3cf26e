#pragma once

#include <array>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "covdist/experiments.hpp"

namespace covdist {

using json = nlohmann::json;

inline std::string fmt_g(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    return buf;
}

// ---------------------------------------------------------------------------
// Matrix files: plain comma-separated numeric rows, no header, UTF-8.
// ---------------------------------------------------------------------------

inline Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string tok;
        int col = 0;
        while (std::getline(ss, tok, ',')) {
            ++col;
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(tok, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            // reject trailing garbage too
            while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
            if (pos == 0 || pos != tok.size()) {
                std::ostringstream os;
                os << path << ": bad numeric token at row " << lineno << ", column " << col;
                throw InputError(os.str());
            }
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            std::ostringstream os;
            os << path << ": row " << lineno << " has " << row.size() << " columns, expected "
               << rows.front().size();
            throw InputError(os.str());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError(path + ": empty matrix file");
    Matrix M(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j) M(i, j) = rows[i][j];
    return M;
}

inline void write_matrix_csv(const std::string& path, const Matrix& M) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out << ',';
            out << fmt_g(M(i, j), 17);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Config files (JSON, keys matching config field names; unknown keys error)
// ---------------------------------------------------------------------------

inline void check_keys(const json& j, const std::vector<std::string>& allowed,
                       const std::string& ctx) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw InputError(ctx + ": unknown key '" + it.key() + "'");
    }
}

inline KernelSpec parse_kernel(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw InputError(ctx + ": kernel must be an object");
    check_keys(j, {"family", "param"}, ctx);
    if (!j.contains("family") || !j.contains("param"))
        throw InputError(ctx + ": kernel needs 'family' and 'param'");
    std::string fam = j.at("family").get<std::string>();
    double p = j.at("param").get<double>();
    if (fam == "laplacian") return KernelSpec::laplacian(p);
    if (fam == "squared_exponential") return KernelSpec::squared_exponential(p);
    if (fam == "brownian") return KernelSpec::brownian(p);
    throw InputError(ctx + ": unknown kernel family '" + fam + "'");
}

inline std::vector<Metric> parse_metric_list(const json& j, const std::string& ctx) {
    if (!j.is_array()) throw InputError(ctx + ": metrics must be a list");
    std::vector<Metric> out;
    for (const auto& e : j) out.push_back(parse_metric(e.get<std::string>()));
    return out;
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    return j;
}

inline ConvergenceConfig parse_convergence_config(const json& j) {
    check_keys(j,
               {"experiment", "kernel1", "kernel2", "d", "m", "path_counts", "gamma", "metrics",
                "trials", "reference", "base_seed", "oracle_k_max"},
               "convergence config");
    ConvergenceConfig cfg;
    cfg.path_counts.clear();
    if (j.contains("experiment")) cfg.experiment = j.at("experiment").get<std::string>();
    if (j.contains("kernel1")) cfg.kernel1 = parse_kernel(j.at("kernel1"), "kernel1");
    if (j.contains("kernel2")) cfg.kernel2 = parse_kernel(j.at("kernel2"), "kernel2");
    if (j.contains("d")) cfg.domain = DomainSpec(j.at("d").get<int>());
    if (j.contains("m")) cfg.m = j.at("m").get<Eigen::Index>();
    if (j.contains("path_counts"))
        for (const auto& e : j.at("path_counts")) cfg.path_counts.push_back(e.get<Eigen::Index>());
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    if (j.contains("metrics")) cfg.metrics = parse_metric_list(j.at("metrics"), "metrics");
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("reference")) {
        std::string r = j.at("reference").get<std::string>();
        if (r == "oracle")
            cfg.reference = ReferenceKind::Oracle;
        else if (r == "largest")
            cfg.reference = ReferenceKind::Largest;
        else
            throw InputError("reference: must be 'oracle' or 'largest'");
    }
    if (j.contains("base_seed")) cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("oracle_k_max")) cfg.oracle_k_max = j.at("oracle_k_max").get<std::size_t>();
    return cfg;
}

inline ClassificationConfig parse_classification_config(const json& j) {
    check_keys(j,
               {"sigma1", "sigma2", "d", "m", "N", "train_per_class", "test_per_class", "repeats",
                "gamma", "epsilon_sinkhorn", "metrics", "base_seed"},
               "classification config");
    ClassificationConfig cfg;
    if (j.contains("sigma1")) cfg.sigma1 = j.at("sigma1").get<double>();
    if (j.contains("sigma2")) cfg.sigma2 = j.at("sigma2").get<double>();
    if (j.contains("d")) cfg.d = j.at("d").get<int>();
    if (j.contains("m")) cfg.m = j.at("m").get<Eigen::Index>();
    if (j.contains("N")) cfg.N = j.at("N").get<Eigen::Index>();
    if (j.contains("train_per_class")) cfg.train_per_class = j.at("train_per_class").get<int>();
    if (j.contains("test_per_class")) cfg.test_per_class = j.at("test_per_class").get<int>();
    if (j.contains("repeats")) cfg.repeats = j.at("repeats").get<int>();
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    if (j.contains("epsilon_sinkhorn")) cfg.epsilon_sinkhorn = j.at("epsilon_sinkhorn").get<double>();
    if (j.contains("metrics")) cfg.metrics = parse_metric_list(j.at("metrics"), "metrics");
    if (j.contains("base_seed")) cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
    return cfg;
}

// ---------------------------------------------------------------------------
// Result CSVs
// ---------------------------------------------------------------------------

inline void write_convergence_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << "experiment,trial,N,m,metric,estimate,reference,abs_error,wall_time_ms\n";
    for (const auto& r : rows) {
        out << r.experiment << ',' << r.trial << ',' << r.N << ',' << r.m << ',' << r.metric
            << ',' << fmt_g(r.estimate, 17) << ',' << fmt_g(r.reference, 17) << ','
            << fmt_g(r.abs_error, 17) << ',' << fmt_g(r.wall_time_ms, 6) << '\n';
    }
}

/// Per-(metric, N) trial means plus the fitted log-log slope per metric.
inline void write_convergence_summary(const std::string& path,
                                      const std::vector<ResultRow>& rows) {
    // metric -> N -> (sum_est, sum_err, count), insertion-ordered metrics
    std::vector<std::string> metric_order;
    std::map<std::string, std::map<Eigen::Index, std::array<double, 3>>> acc;
    for (const auto& r : rows) {
        if (!acc.count(r.metric)) metric_order.push_back(r.metric);
        auto& a = acc[r.metric][r.N];
        a[0] += r.estimate;
        a[1] += r.abs_error;
        a[2] += 1.0;
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << "metric,N,mean_estimate,mean_abs_error,loglog_slope\n";
    for (const auto& m : metric_order) {
        std::vector<ResultRow> sub;
        for (const auto& r : rows)
            if (r.metric == m) sub.push_back(r);
        std::string slope;
        try {
            slope = fmt_g(fit_loglog_slope(sub), 17);
        } catch (const InputError&) {
            slope = "nan";
        }
        for (const auto& [N, a] : acc[m]) {
            out << m << ',' << N << ',' << fmt_g(a[0] / a[2], 17) << ',' << fmt_g(a[1] / a[2], 17)
                << ',' << slope << '\n';
        }
    }
}

inline void write_classification_outputs(const std::string& dir,
                                         const std::vector<MetricErrors>& results) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir + "/errors.csv");
        if (!out) throw InputError("cannot write file: " + dir + "/errors.csv");
        out << "metric,mean_error,std_error,repeats\n";
        for (const auto& r : results)
            out << r.metric << ',' << fmt_g(r.mean_error, 17) << ',' << fmt_g(r.std_error, 17)
                << ',' << r.confusions.size() << '\n';
    }
    for (const auto& r : results) {
        for (std::size_t rep = 0; rep < r.confusions.size(); ++rep) {
            std::ostringstream name;
            name << dir << "/confusion_" << r.metric << "_" << rep << ".csv";
            std::ofstream out(name.str());
            if (!out) throw InputError("cannot write file: " + name.str());
            const auto& C = r.confusions[rep];
            for (Eigen::Index i = 0; i < C.rows(); ++i) {
                for (Eigen::Index j = 0; j < C.cols(); ++j) {
                    if (j) out << ',';
                    out << C(i, j);
                }
                out << '\n';
            }
        }
    }
}

}  // namespace covdist
