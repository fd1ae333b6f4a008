#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>
#include "rgos/finitesum.hpp"
#include "rgos/models.hpp"
#include "rgos/types.hpp"

// Run configuration and report types with JSON serialization, plus the CSV
// sample format (shortest-round-trip doubles, one row per sample).

namespace rgos {

using nlohmann::json;

struct ConstantOverrides {
    double ck = 100.0;               // joint-chain iteration constant
    double reduction_constant = 4.0;  // outer-loop constant
    double eta_direct = 0.0;          // reduction_direct step; 0 = 1/L
    double opt_tol = 1e-7;            // minimizer precomputation tolerance
    MrwConstants mrw;                 // finite-sum walk constants
};

inline void to_json(json& j, const ConstantOverrides& c) {
    j = json{{"ck", c.ck},
             {"reduction_constant", c.reduction_constant},
             {"eta_direct", c.eta_direct},
             {"opt_tol", c.opt_tol},
             {"mrw_c_h", c.mrw.c_h},
             {"mrw_c_K", c.mrw.c_K},
             {"mrw_c_R", c.mrw.c_R},
             {"mrw_c_x", c.mrw.c_x},
             {"mrw_c_xi", c.mrw.c_xi},
             {"mrw_c_p", c.mrw.c_p}};
}

inline void from_json(const json& j, ConstantOverrides& c) {
    c.ck = j.value("ck", 100.0);
    c.reduction_constant = j.value("reduction_constant", 4.0);
    c.eta_direct = j.value("eta_direct", 0.0);
    c.opt_tol = j.value("opt_tol", 1e-7);
    c.mrw.c_h = j.value("mrw_c_h", 1.0);
    c.mrw.c_K = j.value("mrw_c_K", 1.0);
    c.mrw.c_R = j.value("mrw_c_R", 1.0);
    c.mrw.c_x = j.value("mrw_c_x", 1.0);
    c.mrw.c_xi = j.value("mrw_c_xi", 1.0);
    c.mrw.c_p = j.value("mrw_c_p", 5.0);
}

inline std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::gaussian: return "gaussian";
        case ModelKind::box_gaussian: return "box_gaussian";
        case ModelKind::lasso_gaussian: return "lasso_gaussian";
        case ModelKind::logistic_finitesum: return "logistic_finitesum";
        case ModelKind::custom_1d: return "custom_1d";
    }
    return "gaussian";
}

inline ModelKind model_kind_from_name(const std::string& s) {
    if (s == "gaussian") return ModelKind::gaussian;
    if (s == "box_gaussian") return ModelKind::box_gaussian;
    if (s == "lasso_gaussian") return ModelKind::lasso_gaussian;
    if (s == "logistic_finitesum") return ModelKind::logistic_finitesum;
    if (s == "custom_1d") return ModelKind::custom_1d;
    throw ConfigError("unknown model kind '" + s + "'");
}

inline void to_json(json& j, const ModelSpec& m) {
    j = json{{"kind", model_kind_name(m.kind)},
             {"dim", m.dim},
             {"spectrum", m.spectrum},
             {"center", m.center},
             {"box_lo", m.box_lo},
             {"box_hi", m.box_hi},
             {"l1_weight", m.l1_weight},
             {"n_data", m.n_data},
             {"ridge", m.ridge},
             {"custom_name", m.custom_name}};
}

inline void from_json(const json& j, ModelSpec& m) {
    m.kind = model_kind_from_name(j.at("kind").get<std::string>());
    m.dim = j.at("dim").get<int>();
    m.spectrum = j.value("spectrum", std::vector<double>(m.dim, 1.0));
    m.center = j.value("center", std::vector<double>(m.dim, 0.0));
    m.box_lo = j.value("box_lo", -1.0);
    m.box_hi = j.value("box_hi", 1.0);
    m.l1_weight = j.value("l1_weight", 1.0);
    m.n_data = j.value("n_data", 0);
    m.ridge = j.value("ridge", 0.1);
    m.custom_name = j.value("custom_name", "logistic_quadratic");
}

struct RunConfig {
    ModelSpec model;
    std::string sampler = "wellcond";
    double eps = 0.1;
    std::uint64_t seed = 1;
    int chains = 1000;
    ConstantOverrides constants;
    std::string samples_path = "samples.csv";
    std::string report_path = "report.json";
};

inline void to_json(json& j, const RunConfig& c) {
    j = json{{"model", c.model},           {"sampler", c.sampler},
             {"eps", c.eps},               {"seed", c.seed},
             {"chains", c.chains},         {"constants", c.constants},
             {"samples_path", c.samples_path}, {"report_path", c.report_path}};
}

inline void from_json(const json& j, RunConfig& c) {
    j.at("model").get_to(c.model);
    c.sampler = j.at("sampler").get<std::string>();
    c.eps = j.at("eps").get<double>();  // no implicit default
    c.seed = j.at("seed").get<std::uint64_t>();
    c.chains = j.value("chains", 1000);
    if (j.contains("constants")) j.at("constants").get_to(c.constants);
    c.samples_path = j.value("samples_path", std::string("samples.csv"));
    c.report_path = j.value("report_path", std::string("report.json"));
}

struct CheckResult {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double threshold = 0.0;
    std::string detail;
};

inline void to_json(json& j, const CheckResult& c) {
    j = json{{"name", c.name},
             {"pass", c.pass},
             {"observed", c.observed},
             {"threshold", c.threshold},
             {"detail", c.detail}};
}

struct RunReport {
    std::string sampler;
    std::string model;
    int chains = 0;
    std::uint64_t seed = 0;
    double eps = 0.0;

    std::uint64_t value_queries = 0;
    std::uint64_t gradient_queries = 0;
    std::uint64_t summand_value_queries = 0;
    std::uint64_t summand_gradient_queries = 0;
    std::uint64_t rgo_calls = 0;
    std::uint64_t rejection_rounds = 0;
    std::uint64_t gate_failures = 0;
    std::uint64_t fallback_calls = 0;
    double acceptance_rate = 0.0;  // walk-style samplers
    double tv_budget_spent = 0.0;  // max across chains
    double log_warmness = 0.0;
    double opt_tol = 0.0;  // minimizer precomputation tolerance in effect
    long long iterations = 0;

    std::vector<CheckResult> checks;  // populated by validate suites
    std::vector<std::string> anomalies;
    bool retried = false;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return anomalies.empty();
    }
};

inline void to_json(json& j, const RunReport& r) {
    j = json{{"sampler", r.sampler},
             {"model", r.model},
             {"chains", r.chains},
             {"seed", r.seed},
             {"eps", r.eps},
             {"value_queries", r.value_queries},
             {"gradient_queries", r.gradient_queries},
             {"summand_value_queries", r.summand_value_queries},
             {"summand_gradient_queries", r.summand_gradient_queries},
             {"rgo_calls", r.rgo_calls},
             {"rejection_rounds", r.rejection_rounds},
             {"gate_failures", r.gate_failures},
             {"fallback_calls", r.fallback_calls},
             {"acceptance_rate", r.acceptance_rate},
             {"tv_budget_spent", r.tv_budget_spent},
             {"log_warmness", r.log_warmness},
             {"opt_tol", r.opt_tol},
             {"iterations", r.iterations},
             {"checks", r.checks},
             {"anomalies", r.anomalies},
             {"retried", r.retried}};
}

/// Shortest round-trip decimal formatting.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline void write_csv(const std::string& path, const std::vector<Vec>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("write_csv: cannot open '" + path + "'");
    for (const auto& x : samples) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (i) out << ',';
            out << format_double(x[i]);
        }
        out << '\n';
    }
}

inline std::vector<Vec> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("read_csv: cannot open '" + path + "'");
    std::vector<Vec> samples;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            std::string tok = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                          : comma - pos);
            double v = 0.0;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc())
                throw ConfigError("read_csv: bad number '" + tok + "'");
            row.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        samples.push_back(Eigen::Map<const Vec>(row.data(), static_cast<Eigen::Index>(row.size())));
    }
    return samples;
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("write_json: cannot open '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace rgos
