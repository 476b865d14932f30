#include "recml/recml.h"

#include <string>

#include "recml/experiment.hpp"

using namespace recml;

struct recml_experiment {
    Config config;
    std::string last_result;
    std::string last_error;
};

namespace {

recml_status classify(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return RECML_ERR_CONFIG;
    if (dynamic_cast<const SamplerStallError*>(&e)) return RECML_ERR_STALL;
    if (dynamic_cast<const ConnectivityError*>(&e)) return RECML_ERR_CONNECTIVITY;
    if (dynamic_cast<const ConvergenceError*>(&e)) return RECML_ERR_NONCONVERGENCE;
    return RECML_ERR_INTERNAL;
}

template <typename Fn>
recml_status guarded(recml_experiment* exp, Fn&& fn) {
    if (!exp) return RECML_ERR_CONFIG;
    try {
        exp->last_error.clear();
        fn();
        return RECML_OK;
    } catch (const std::exception& e) {
        exp->last_error = e.what();
        return classify(e);
    } catch (...) {
        exp->last_error = "unknown error";
        return RECML_ERR_INTERNAL;
    }
}

void maybe_write(const recml_experiment& exp, const std::string& filename) {
    if (!exp.config.has("out")) return;
    write_text_file(exp.config.get_string("out") + "/" + filename, exp.last_result);
}

}  // namespace

extern "C" {

const char* recml_version(void) { return "0.1.0"; }

recml_status recml_experiment_create(const char* config_text, recml_experiment** out) {
    if (!out) return RECML_ERR_CONFIG;
    *out = nullptr;
    try {
        auto* exp = new recml_experiment;
        exp->config = Config::parse(config_text ? config_text : "");
        *out = exp;
        return RECML_OK;
    } catch (const std::exception&) {
        return RECML_ERR_CONFIG;
    }
}

recml_status recml_experiment_create_from_file(const char* path, recml_experiment** out) {
    if (!out || !path) return RECML_ERR_CONFIG;
    *out = nullptr;
    try {
        auto* exp = new recml_experiment;
        exp->config = Config::load(path);
        *out = exp;
        return RECML_OK;
    } catch (const std::exception&) {
        return RECML_ERR_CONFIG;
    }
}

void recml_experiment_destroy(recml_experiment* exp) { delete exp; }

recml_status recml_experiment_set(recml_experiment* exp, const char* key, const char* value) {
    if (!exp || !key || !value) return RECML_ERR_CONFIG;
    exp->config.set(key, value);
    return RECML_OK;
}

recml_status recml_run_oracle(recml_experiment* exp) {
    return guarded(exp, [&] {
        exp->last_result = run_oracle(exp->config).to_json();
        maybe_write(*exp, "oracle.json");
    });
}

recml_status recml_run_estimate(recml_experiment* exp) {
    return guarded(exp, [&] {
        const auto rep = run_experiment(exp->config);
        exp->last_result = rep.to_json();
        maybe_write(*exp, "report.json");
    });
}

recml_status recml_run_replicates(recml_experiment* exp, size_t replicates) {
    return guarded(exp, [&] {
        const auto base_seed = exp->config.get_uint64("seed", 1);
        exp->last_result = replicate_study(exp->config, replicates, base_seed).to_json();
        maybe_write(*exp, "replicates.json");
    });
}

recml_status recml_run_nested(recml_experiment* exp) {
    return guarded(exp, [&] {
        Config cfg = exp->config;
        if (!cfg.has("estimator")) cfg.set("estimator", "nested");
        const auto rep = run_experiment(cfg);
        exp->last_result = rep.to_json();
        maybe_write(*exp, "nested.json");
    });
}

recml_status recml_run_galaxy(recml_experiment* exp) {
    return guarded(exp, [&] {
        exp->last_result = galaxy_study(exp->config, false).to_json();
        maybe_write(*exp, "galaxy.json");
    });
}

recml_status recml_run_reweight(recml_experiment* exp) {
    return guarded(exp, [&] {
        exp->last_result = galaxy_study(exp->config, true).to_json();
        maybe_write(*exp, "reweight.json");
    });
}

recml_status recml_run_csweep(recml_experiment* exp, const double* c_values, size_t n_c, size_t replicates) {
    return guarded(exp, [&] {
        if (!c_values || n_c == 0) throw ConfigError("csweep: no c values supplied");
        std::vector<double> cs(c_values, c_values + n_c);
        exp->last_result = csweep(exp->config, cs, replicates).to_json();
        maybe_write(*exp, "csweep.json");
    });
}

const char* recml_last_result_json(const recml_experiment* exp) {
    return exp ? exp->last_result.c_str() : "";
}

const char* recml_last_error(const recml_experiment* exp) { return exp ? exp->last_error.c_str() : ""; }

}  // extern "C"
