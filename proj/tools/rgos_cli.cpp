// Command-line driver: configure a model + sampler, run chains, emit samples
// and diagnostics, execute the validation suites, and sweep parameters.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include "rgos/validate.hpp"

using namespace rgos;

namespace {

int cmd_run(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot open config '" << config_path << "'\n";
        return 2;
    }
    json j;
    in >> j;
    RunConfig cfg = j.get<RunConfig>();
    check_compatibility(cfg.sampler, cfg.model);  // validate before any compute

    auto t0 = std::chrono::steady_clock::now();
    RunReport rep = run(cfg);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();

    std::cout << "sampler=" << rep.sampler << " model=" << rep.model
              << " chains=" << rep.chains << " wall_ms=" << ms << "\n"
              << "samples -> " << cfg.samples_path << "\nreport  -> " << cfg.report_path
              << "\n";
    if (!rep.anomalies.empty()) {
        std::cerr << rep.anomalies.size() << " chain anomalies; see report\n";
        return 1;
    }
    return 0;
}

int cmd_validate(const std::string& suite, std::uint64_t seed, const std::string& out_path) {
    std::vector<std::string> to_run;
    if (suite == "all")
        to_run = suite_names();
    else
        to_run.push_back(suite);

    bool all_pass = true;
    json log = json::array();
    for (const auto& name : to_run) {
        auto t0 = std::chrono::steady_clock::now();
        RunReport rep = validate(name, seed);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        for (const auto& c : rep.checks) {
            std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << name << "/" << c.name
                      << " observed=" << format_double(c.observed)
                      << " threshold=" << format_double(c.threshold)
                      << (c.detail.empty() ? "" : "  (" + c.detail + ")")
                      << (rep.retried ? " [retried]" : "") << "\n";
            all_pass = all_pass && c.pass;
        }
        std::cout << "suite " << name << " wall_ms=" << ms << "\n";
        log.push_back(json(rep));
    }
    if (!out_path.empty()) write_json(out_path, log);
    return all_pass ? 0 : 1;
}

int cmd_bench(const std::string& sweep, const std::string& out_path) {
    json rows = json::array();
    if (sweep == "kappa") {
        for (double kappa : {2.0, 4.0, 8.0}) {
            RunConfig cfg;
            cfg.model = ModelSpec::gaussian_spec({kappa, 1.0});
            cfg.sampler = "wellcond";
            cfg.eps = 0.1;
            cfg.seed = 1;
            cfg.chains = 50;
            cfg.constants.reduction_constant = 2.0;
            cfg.samples_path = "bench_samples.csv";
            cfg.report_path = "bench_report.json";
            RunOutput out = run_chains(cfg);
            rows.push_back({{"kappa", kappa},
                            {"gradient_queries", out.report.gradient_queries},
                            {"rgo_calls", out.report.rgo_calls}});
            std::cout << "kappa=" << kappa
                      << " gradient_queries=" << out.report.gradient_queries << "\n";
        }
    } else if (sweep == "dim") {
        for (int d : {2, 4, 8}) {
            RunConfig cfg;
            cfg.model = ModelSpec::gaussian_spec(std::vector<double>(d, 1.0));
            cfg.sampler = "wellcond";
            cfg.eps = 0.1;
            cfg.seed = 1;
            cfg.chains = 50;
            cfg.constants.reduction_constant = 2.0;
            RunOutput out = run_chains(cfg);
            rows.push_back({{"dim", d},
                            {"gradient_queries", out.report.gradient_queries},
                            {"rgo_calls", out.report.rgo_calls}});
            std::cout << "dim=" << d
                      << " gradient_queries=" << out.report.gradient_queries << "\n";
        }
    } else if (sweep == "eps") {
        for (double eps : {0.2, 0.1, 0.05}) {
            RunConfig cfg;
            cfg.model = ModelSpec::gaussian_spec({4.0, 1.0});
            cfg.sampler = "wellcond";
            cfg.eps = eps;
            cfg.seed = 1;
            cfg.chains = 50;
            cfg.constants.reduction_constant = 2.0;
            RunOutput out = run_chains(cfg);
            rows.push_back({{"eps", eps},
                            {"gradient_queries", out.report.gradient_queries},
                            {"rgo_calls", out.report.rgo_calls}});
            std::cout << "eps=" << eps
                      << " gradient_queries=" << out.report.gradient_queries << "\n";
        }
    } else {
        std::cerr << "error: unknown sweep '" << sweep << "' (kappa|dim|eps)\n";
        return 2;
    }
    if (!out_path.empty()) write_json(out_path, rows);
    return 0;
}

int cmd_two_sample(const std::string& a_path, const std::string& b_path) {
    auto a = read_csv(a_path);
    auto b = read_csv(b_path);
    auto res = two_sample_test(a, b, RngStream(1, 0));
    std::cout << "ks_min_p_bonferroni=" << format_double(res.ks_min_p_bonferroni)
              << " energy_stat=" << format_double(res.energy.statistic)
              << " energy_p=" << format_double(res.energy.p_value) << "\n"
              << (res.pass(0.01) ? "PASS" : "FAIL") << " at alpha=0.01\n";
    return res.pass(0.01) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structured logconcave sampling via restricted Gaussian oracles"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "run a configured sampler");
    run_cmd->add_option("--config", config_path, "JSON config path")->required();

    std::string suite = "all";
    std::uint64_t seed = 1;
    std::string out_path;
    auto* val_cmd = app.add_subcommand("validate", "run a validation suite");
    val_cmd->add_option("--suite", suite,
                        "exactness|estimators|structural|scaling|coupling|rounds|"
                        "stationarity|determinism|all");
    val_cmd->add_option("--seed", seed, "base seed");
    val_cmd->add_option("--out", out_path, "write the suite report JSON here");

    std::string sweep;
    std::string bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "sweep a parameter and report tallies");
    bench_cmd->add_option("--sweep", sweep, "kappa|dim|eps")->required();
    bench_cmd->add_option("--out", bench_out, "write the sweep JSON here");

    std::string a_path, b_path;
    auto* ts_cmd = app.add_subcommand("two-sample", "two-sample test between CSV files");
    ts_cmd->add_option("a", a_path, "first sample CSV")->required();
    ts_cmd->add_option("b", b_path, "second sample CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(config_path);
        if (val_cmd->parsed()) return cmd_validate(suite, seed, out_path);
        if (bench_cmd->parsed()) return cmd_bench(sweep, bench_out);
        if (ts_cmd->parsed()) return cmd_two_sample(a_path, b_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
