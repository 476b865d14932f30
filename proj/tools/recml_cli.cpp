// Command-line driver for the recml shared library. Subcommands mirror the
// C API run functions; every subcommand prints the JSON result on stdout
// and exits with the library status code (0 ok, 2 config error, 3 sampler
// stall, 4 connectivity failure, 5 non-convergence).
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recml/recml.h"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string seed;
    std::string out_dir;
    bool full = false;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file (key = value lines)");
    cmd->add_option("--seed", opts.seed, "base seed (overrides config)");
    cmd->add_option("--out", opts.out_dir, "output directory for report/trace files");
    cmd->add_flag("--full", opts.full, "run the full-scale (slow) profile");
    cmd->add_option("--set", opts.overrides, "extra config overrides, key=value")->take_all();
}

int fail(recml_experiment* exp, recml_status st) {
    std::fprintf(stderr, "error: %s\n", recml_last_error(exp));
    recml_experiment_destroy(exp);
    return static_cast<int>(st);
}

recml_experiment* make_experiment(const CommonOpts& opts, int& err) {
    recml_experiment* exp = nullptr;
    recml_status st;
    if (!opts.config_path.empty())
        st = recml_experiment_create_from_file(opts.config_path.c_str(), &exp);
    else
        st = recml_experiment_create("", &exp);
    if (st != RECML_OK) {
        std::fprintf(stderr, "error: cannot load config %s\n", opts.config_path.c_str());
        err = static_cast<int>(st);
        return nullptr;
    }
    if (!opts.seed.empty()) recml_experiment_set(exp, "seed", opts.seed.c_str());
    if (!opts.out_dir.empty()) recml_experiment_set(exp, "out", opts.out_dir.c_str());
    if (opts.full) recml_experiment_set(exp, "full", "1");
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
            err = static_cast<int>(RECML_ERR_CONFIG);
            recml_experiment_destroy(exp);
            return nullptr;
        }
        recml_experiment_set(exp, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    }
    return exp;
}

int finish(recml_experiment* exp, recml_status st) {
    if (st != RECML_OK) return fail(exp, st);
    std::printf("%s\n", recml_last_result_json(exp));
    recml_experiment_destroy(exp);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recml: recursive marginal likelihood estimation"};
    app.require_subcommand(1);

    CommonOpts oracle_o, estimate_o, replicate_o, nested_o, galaxy_o, reweight_o, csweep_o;
    std::size_t replicates = 100;
    std::size_t csweep_R = 100;
    std::vector<double> csweep_c{0.5, 1.0, 2.0, 4.0};

    auto* oracle = app.add_subcommand("oracle", "brute-force quadrature evidence");
    add_common(oracle, oracle_o);
    auto* estimate = app.add_subcommand("estimate", "single estimation run");
    add_common(estimate, estimate_o);
    auto* replicate = app.add_subcommand("replicate", "replicate study (mean/SE summary)");
    add_common(replicate, replicate_o);
    replicate->add_option("--replicates,-R", replicates, "number of replicates");
    auto* nested = app.add_subcommand("nested", "ellipse-based nested sampling run");
    add_common(nested, nested_o);
    auto* galaxy = app.add_subcommand("galaxy", "galaxy mixture study: per-k evidences and pi(k|y)");
    add_common(galaxy, galaxy_o);
    auto* reweight = app.add_subcommand("reweight", "galaxy study reweighted to alternative priors");
    add_common(reweight, reweight_o);
    auto* csweep = app.add_subcommand("csweep", "replicate SE across schedule exponents");
    add_common(csweep, csweep_o);
    csweep->add_option("--replicates,-R", csweep_R, "replicates per c");
    csweep->add_option("--c", csweep_c, "schedule exponents to sweep")->take_all();

    CLI11_PARSE(app, argc, argv);

    int err = 0;
    if (oracle->parsed()) {
        auto* exp = make_experiment(oracle_o, err);
        return exp ? finish(exp, recml_run_oracle(exp)) : err;
    }
    if (estimate->parsed()) {
        auto* exp = make_experiment(estimate_o, err);
        return exp ? finish(exp, recml_run_estimate(exp)) : err;
    }
    if (replicate->parsed()) {
        auto* exp = make_experiment(replicate_o, err);
        return exp ? finish(exp, recml_run_replicates(exp, replicates)) : err;
    }
    if (nested->parsed()) {
        auto* exp = make_experiment(nested_o, err);
        return exp ? finish(exp, recml_run_nested(exp)) : err;
    }
    if (galaxy->parsed()) {
        auto* exp = make_experiment(galaxy_o, err);
        return exp ? finish(exp, recml_run_galaxy(exp)) : err;
    }
    if (reweight->parsed()) {
        auto* exp = make_experiment(reweight_o, err);
        return exp ? finish(exp, recml_run_reweight(exp)) : err;
    }
    if (csweep->parsed()) {
        auto* exp = make_experiment(csweep_o, err);
        return exp ? finish(exp, recml_run_csweep(exp, csweep_c.data(), csweep_c.size(), csweep_R)) : err;
    }
    return 1;
}
