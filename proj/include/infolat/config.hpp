#ifndef INFOLAT_CONFIG_HPP
#define INFOLAT_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "infolat/chain_model.hpp"

// Run configuration: strict JSON schema (unknown keys rejected), preset
// merging, and the parsed parameter structs the task runner consumes.

namespace infolat {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_object(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be an object");
    }
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::string& where,
                                std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

inline double get_number(const nlohmann::json& j, const std::string& where, const char* key,
                         std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) {
            return *fallback;
        }
        throw ConfigError(where + " is missing required key '" + key + "'");
    }
    if (!j.at(key).is_number()) {
        throw ConfigError(where + "." + key + " must be a number");
    }
    return j.at(key).get<double>();
}

inline long long get_integer(const nlohmann::json& j, const std::string& where, const char* key,
                             std::optional<long long> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) {
            return *fallback;
        }
        throw ConfigError(where + " is missing required key '" + key + "'");
    }
    if (!j.at(key).is_number_integer()) {
        throw ConfigError(where + "." + key + " must be an integer");
    }
    return j.at(key).get<long long>();
}

inline std::string get_string(const nlohmann::json& j, const std::string& where, const char* key,
                              std::optional<std::string> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) {
            return *fallback;
        }
        throw ConfigError(where + " is missing required key '" + key + "'");
    }
    if (!j.at(key).is_string()) {
        throw ConfigError(where + "." + key + " must be a string");
    }
    return j.at(key).get<std::string>();
}

inline std::vector<double> get_number_array(const nlohmann::json& j, const std::string& where,
                                            const char* key) {
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).empty()) {
        throw ConfigError(where + "." + key + " must be a nonempty array");
    }
    std::vector<double> values;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) {
            throw ConfigError(where + "." + key + " must contain numbers only");
        }
        values.push_back(v.get<double>());
    }
    return values;
}

inline std::vector<int> get_site_array(const nlohmann::json& j, const std::string& where,
                                       const char* key) {
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).empty()) {
        throw ConfigError(where + "." + key + " must be a nonempty array of site indices");
    }
    std::vector<int> sites;
    for (const auto& v : j.at(key)) {
        if (!v.is_number_integer()) {
            throw ConfigError(where + "." + key + " must contain integers only");
        }
        sites.push_back(v.get<int>());
    }
    return sites;
}

} // namespace detail

inline ChainSpec parse_chain(const nlohmann::json& j, const std::string& where = "chain") {
    detail::require_object(j, where);
    detail::reject_unknown_keys(j, where,
                                {"n_sites", "hopping", "onsite", "onsite_defects", "hopping_defects"});
    const long long n = detail::get_integer(j, where, "n_sites");
    if (n < 2 || n > 1 << 20) {
        throw ConfigError(where + ".n_sites must be at least 2");
    }
    const double hop = detail::get_number(j, where, "hopping", 1.0);
    const double eps = detail::get_number(j, where, "onsite", 0.0);
    ChainSpec chain = ChainSpec::uniform(static_cast<int>(n), hop, eps);
    try {
        if (j.contains("onsite_defects")) {
            for (const auto& d : j.at("onsite_defects")) {
                detail::require_object(d, where + ".onsite_defects[]");
                detail::reject_unknown_keys(d, where + ".onsite_defects[]", {"site", "value"});
                chain.set_onsite(static_cast<int>(detail::get_integer(d, where, "site")),
                                 detail::get_number(d, where, "value"));
            }
        }
        if (j.contains("hopping_defects")) {
            for (const auto& d : j.at("hopping_defects")) {
                detail::require_object(d, where + ".hopping_defects[]");
                detail::reject_unknown_keys(d, where + ".hopping_defects[]", {"bond", "value"});
                chain.set_hopping(static_cast<int>(detail::get_integer(d, where, "bond")),
                                  detail::get_number(d, where, "value"));
            }
        }
    } catch (const std::out_of_range& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return chain;
}

// Reservoir regime with its parameters, kept symbolic so sweeps can rebuild
// the rates at other drive values.
struct ReservoirConfig {
    std::string regime; // large_bias | linear_response | fermi
    double g = 1.0;
    double delta = 0.0;
    double phi = 0.0;
    double g_left = 0.0, g_right = 0.0;
    double mu_left = 0.0, mu_right = 0.0;
    double t_left = 0.0, t_right = 0.0;

    ReservoirSpec build(int n_sites, const ChainSpec& chain) const {
        try {
            if (regime == "large_bias") {
                return rates_large_bias(n_sites, g, delta);
            }
            if (regime == "linear_response") {
                return rates_linear_response(n_sites, g, delta, phi);
            }
            return rates_from_fermi(n_sites, g_left, g_right, mu_left, mu_right, t_left, t_right,
                                    chain.onsite(0), chain.onsite(n_sites - 1));
        } catch (const std::domain_error& e) {
            throw ConfigError(std::string("reservoir: ") + e.what());
        }
    }

    ReservoirConfig with_delta(double new_delta) const {
        if (regime == "fermi") {
            throw ConfigError("sweep over delta is not defined for the fermi regime");
        }
        ReservoirConfig out = *this;
        out.delta = new_delta;
        return out;
    }
};

inline ReservoirConfig parse_reservoir(const nlohmann::json& j) {
    detail::require_object(j, "reservoir");
    ReservoirConfig res;
    res.regime = detail::get_string(j, "reservoir", "regime");
    if (res.regime == "large_bias") {
        detail::reject_unknown_keys(j, "reservoir", {"regime", "g", "delta"});
        res.g = detail::get_number(j, "reservoir", "g", 1.0);
        res.delta = detail::get_number(j, "reservoir", "delta", 0.0);
    } else if (res.regime == "linear_response") {
        detail::reject_unknown_keys(j, "reservoir", {"regime", "g", "delta", "phi"});
        res.g = detail::get_number(j, "reservoir", "g", 1.0);
        res.delta = detail::get_number(j, "reservoir", "delta", 0.0);
        res.phi = detail::get_number(j, "reservoir", "phi");
    } else if (res.regime == "fermi") {
        detail::reject_unknown_keys(j, "reservoir",
                                    {"regime", "g_left", "g_right", "mu_left", "mu_right", "t_left",
                                     "t_right"});
        res.g_left = detail::get_number(j, "reservoir", "g_left");
        res.g_right = detail::get_number(j, "reservoir", "g_right");
        res.mu_left = detail::get_number(j, "reservoir", "mu_left");
        res.mu_right = detail::get_number(j, "reservoir", "mu_right");
        res.t_left = detail::get_number(j, "reservoir", "t_left");
        res.t_right = detail::get_number(j, "reservoir", "t_right");
    } else {
        throw ConfigError("reservoir.regime must be large_bias, linear_response or fermi");
    }
    return res;
}

// Initial state of a time-dependent protocol: the empty chain, or the steady
// state of (possibly different) pre-quench generators.
struct QuenchInitial {
    std::string kind = "empty"; // empty | ness
    std::optional<ChainSpec> chain;
    std::optional<ReservoirConfig> reservoir;
};

inline QuenchInitial parse_initial(const nlohmann::json& j, const std::string& where) {
    QuenchInitial init;
    init.kind = detail::get_string(j, where, "initial", std::string("empty"));
    if (init.kind != "empty" && init.kind != "ness") {
        throw ConfigError(where + ".initial must be 'empty' or 'ness'");
    }
    const bool has_pre = j.contains("initial_chain") || j.contains("initial_reservoir");
    if (has_pre && init.kind != "ness") {
        throw ConfigError(where + ": pre-quench generators require initial = 'ness'");
    }
    if (j.contains("initial_chain")) {
        init.chain = parse_chain(j.at("initial_chain"), where + ".initial_chain");
    }
    if (j.contains("initial_reservoir")) {
        init.reservoir = parse_reservoir(j.at("initial_reservoir"));
    }
    return init;
}

struct EvolveParams {
    std::optional<double> dt; // default: resolved from the fastest scale
    int n_steps = 0;
    int store_every = 0;
    QuenchInitial initial;
};

struct NegativityParams {
    std::vector<int> a1;
    std::vector<int> a2;
    std::optional<double> dt;
    int n_steps = 0;
    int store_every = 1;
    QuenchInitial initial;
    // NESS sweep over the defect energy instead of a time series.
    std::optional<int> sweep_site;
    std::vector<double> sweep_values;
};

struct TrajectoryParams {
    int n_traj = 0;
    double dt = 0.0;
    int n_steps = 0;
    std::uint64_t seed = 1;
    int store_every = 0;
};

// NESS parameter sweep for the ness and info_currents tasks.
struct SweepParams {
    std::string parameter; // delta | onsite_defect
    int site = 0;          // defect site for onsite_defect
    std::vector<double> values;
};

struct ExperimentConfig {
    std::string task; // declared task, empty if the config leaves it to the CLI
    ChainSpec chain;
    ReservoirConfig reservoir;
    std::optional<EvolveParams> evolve;
    std::optional<NegativityParams> negativity;
    std::optional<TrajectoryParams> trajectories;
    std::optional<SweepParams> sweep;
    nlohmann::json resolved; // the merged JSON, echoed into the manifest
};

inline EvolveParams parse_evolve(const nlohmann::json& j) {
    detail::require_object(j, "evolve");
    detail::reject_unknown_keys(
        j, "evolve", {"dt", "n_steps", "store_every", "initial", "initial_chain", "initial_reservoir"});
    EvolveParams p;
    if (j.contains("dt")) {
        p.dt = detail::get_number(j, "evolve", "dt");
    }
    p.n_steps = static_cast<int>(detail::get_integer(j, "evolve", "n_steps"));
    p.store_every = static_cast<int>(detail::get_integer(j, "evolve", "store_every", 0));
    if (p.n_steps < 0 || p.store_every < 0) {
        throw ConfigError("evolve: n_steps and store_every must be nonnegative");
    }
    p.initial = parse_initial(j, "evolve");
    return p;
}

inline NegativityParams parse_negativity(const nlohmann::json& j) {
    detail::require_object(j, "negativity");
    detail::reject_unknown_keys(j, "negativity",
                                {"a1", "a2", "dt", "n_steps", "store_every", "initial",
                                 "initial_chain", "initial_reservoir", "sweep_site", "sweep_values"});
    NegativityParams p;
    p.a1 = detail::get_site_array(j, "negativity", "a1");
    p.a2 = detail::get_site_array(j, "negativity", "a2");
    if (j.contains("dt")) {
        p.dt = detail::get_number(j, "negativity", "dt");
    }
    const bool has_sweep = j.contains("sweep_site") || j.contains("sweep_values");
    if (has_sweep) {
        if (j.contains("n_steps") || j.contains("store_every") || j.contains("initial") ||
            j.contains("initial_chain") || j.contains("initial_reservoir")) {
            throw ConfigError("negativity: a defect sweep excludes the time-series keys");
        }
        p.sweep_site = static_cast<int>(detail::get_integer(j, "negativity", "sweep_site"));
        p.sweep_values = detail::get_number_array(j, "negativity", "sweep_values");
    } else {
        p.n_steps = static_cast<int>(detail::get_integer(j, "negativity", "n_steps"));
        p.store_every = static_cast<int>(detail::get_integer(j, "negativity", "store_every", 1));
        if (p.n_steps < 0 || p.store_every < 1) {
            throw ConfigError("negativity: n_steps must be nonnegative, store_every positive");
        }
        p.initial = parse_initial(j, "negativity");
    }
    return p;
}

inline TrajectoryParams parse_trajectories(const nlohmann::json& j) {
    detail::require_object(j, "trajectories");
    detail::reject_unknown_keys(j, "trajectories", {"n_traj", "dt", "n_steps", "seed", "store_every"});
    TrajectoryParams p;
    p.n_traj = static_cast<int>(detail::get_integer(j, "trajectories", "n_traj"));
    p.dt = detail::get_number(j, "trajectories", "dt");
    p.n_steps = static_cast<int>(detail::get_integer(j, "trajectories", "n_steps"));
    const long long seed = detail::get_integer(j, "trajectories", "seed", 1);
    if (seed < 0) {
        throw ConfigError("trajectories.seed must be nonnegative");
    }
    p.seed = static_cast<std::uint64_t>(seed);
    p.store_every = static_cast<int>(detail::get_integer(j, "trajectories", "store_every", 0));
    if (p.n_traj < 1 || p.dt <= 0.0 || p.n_steps < 0 || p.store_every < 0) {
        throw ConfigError("trajectories: need n_traj >= 1, dt > 0, nonnegative n_steps/store_every");
    }
    return p;
}

inline SweepParams parse_sweep(const nlohmann::json& j, int n_sites) {
    detail::require_object(j, "sweep");
    detail::reject_unknown_keys(j, "sweep", {"parameter", "site", "values"});
    SweepParams p;
    p.parameter = detail::get_string(j, "sweep", "parameter");
    if (p.parameter == "onsite_defect") {
        p.site = static_cast<int>(detail::get_integer(j, "sweep", "site"));
        if (p.site < 1 || p.site > n_sites) {
            throw ConfigError("sweep.site outside the chain");
        }
    } else if (p.parameter == "delta") {
        if (j.contains("site")) {
            throw ConfigError("sweep.site is only meaningful for the onsite_defect parameter");
        }
    } else {
        throw ConfigError("sweep.parameter must be 'delta' or 'onsite_defect'");
    }
    p.values = detail::get_number_array(j, "sweep", "values");
    return p;
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    detail::require_object(j, "config");
    detail::reject_unknown_keys(
        j, "config", {"task", "chain", "reservoir", "evolve", "negativity", "trajectories", "sweep"});
    if (!j.contains("chain") || !j.contains("reservoir")) {
        throw ConfigError("config needs 'chain' and 'reservoir' sections");
    }
    ExperimentConfig cfg;
    cfg.task = j.contains("task") ? detail::get_string(j, "config", "task") : "";
    cfg.chain = parse_chain(j.at("chain"));
    cfg.reservoir = parse_reservoir(j.at("reservoir"));
    if (j.contains("evolve")) {
        cfg.evolve = parse_evolve(j.at("evolve"));
    }
    if (j.contains("negativity")) {
        cfg.negativity = parse_negativity(j.at("negativity"));
    }
    if (j.contains("trajectories")) {
        cfg.trajectories = parse_trajectories(j.at("trajectories"));
    }
    if (j.contains("sweep")) {
        cfg.sweep = parse_sweep(j.at("sweep"), cfg.chain.n_sites);
    }
    const auto check_sites = [&](const std::vector<int>& sites, const char* where) {
        for (const int s : sites) {
            if (s < 1 || s > cfg.chain.n_sites) {
                throw ConfigError(std::string(where) + ": site " + std::to_string(s) +
                                  " outside the chain");
            }
        }
    };
    if (cfg.negativity) {
        check_sites(cfg.negativity->a1, "negativity.a1");
        check_sites(cfg.negativity->a2, "negativity.a2");
        if (cfg.negativity->sweep_site &&
            (*cfg.negativity->sweep_site < 1 || *cfg.negativity->sweep_site > cfg.chain.n_sites)) {
            throw ConfigError("negativity.sweep_site outside the chain");
        }
    }
    cfg.resolved = j;
    return cfg;
}

inline nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
}

// Preset as the base, config file entries layered on top (objects merge
// recursively, scalars and arrays replace).
inline nlohmann::json merge_config(nlohmann::json base, const nlohmann::json& overlay) {
    base.merge_patch(overlay);
    return base;
}

} // namespace infolat

#endif
