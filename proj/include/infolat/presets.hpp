#ifndef INFOLAT_PRESETS_HPP
#define INFOLAT_PRESETS_HPP

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "infolat/config.hpp"

// Named parameter sets for the documented experiment scenarios (see
// docs/output_formats.md for the scenario catalog and the intended task of
// each preset). Presets never pin the task; the command line chooses what to
// compute on the preset's model.

namespace infolat {

namespace detail {

inline const std::map<std::string, const char*>& preset_sources() {
    static const std::map<std::string, const char*> sources = {
        // Occupation profiles of the boundary-driven N=21 chain.
        {"fig5a", R"({
            "chain": {"n_sites": 21},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0},
            "sweep": {"parameter": "delta", "values": [0.0, 0.25, 0.5, 0.75]}
        })"},
        {"fig5b", R"({
            "chain": {"n_sites": 21},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0},
            "sweep": {"parameter": "onsite_defect", "site": 11, "values": [0.0, 1.0, 3.0, 5.0]}
        })"},

        // N=7 information lattices and currents: clean/defect x symmetric/biased.
        {"fig6a", R"({
            "chain": {"n_sites": 7},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0}
        })"},
        {"fig6b", R"({
            "chain": {"n_sites": 7},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.75}
        })"},
        {"fig6c", R"({
            "chain": {"n_sites": 7, "onsite_defects": [{"site": 4, "value": 3.0}]},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0}
        })"},
        {"fig6d", R"({
            "chain": {"n_sites": 7, "onsite_defects": [{"site": 4, "value": 3.0}]},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.75}
        })"},

        // Boundary-injected, vertical and horizontal current sweeps at N=7.
        {"fig8a", R"({
            "chain": {"n_sites": 7},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0},
            "sweep": {"parameter": "delta", "values": [0.0, 0.05, 0.1, 0.15, 0.2, 0.25,
                      0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85,
                      0.9, 0.95]}
        })"},
        {"fig8b", R"({
            "chain": {"n_sites": 7},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0},
            "sweep": {"parameter": "onsite_defect", "site": 4, "values": [0.0, 0.5, 1.0,
                      1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0]}
        })"},

        // Noise lattice against the exact lattice at N=21.
        {"fig11a", R"({
            "chain": {"n_sites": 21},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.75}
        })"},
        {"fig11c", R"({
            "chain": {"n_sites": 21, "onsite_defects": [{"site": 11, "value": 3.0}]},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0}
        })"},

        // Bond defect in the chain center.
        {"fig13", R"({
            "chain": {"n_sites": 20, "hopping_defects": [{"bond": 10, "value": 0.5}]},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0}
        })"},

        // Off-center defect: pillar plus mirror ghost pillar.
        {"fig14", R"({
            "chain": {"n_sites": 21, "onsite_defects": [{"site": 7, "value": 3.0}]},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0}
        })"},

        // Linear-response drive around the central defect.
        {"fig15", R"({
            "chain": {"n_sites": 21, "onsite_defects": [{"site": 11, "value": 3.0}]},
            "reservoir": {"regime": "linear_response", "g": 1.0, "delta": 0.0, "phi": 0.1}
        })"},

        // Negativity after a defect quench from the clean steady state.
        {"fig16", R"({
            "chain": {"n_sites": 21, "onsite_defects": [{"site": 11, "value": 3.0}]},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0},
            "negativity": {
                "a1": [1, 2, 3, 4], "a2": [18, 19, 20, 21],
                "dt": 0.05, "n_steps": 20000, "store_every": 10,
                "initial": "ness",
                "initial_chain": {"n_sites": 21},
                "initial_reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0}
            }
        })"},

        // Transient negativity of the clean chain from the empty state.
        {"fig17", R"({
            "chain": {"n_sites": 21},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0},
            "negativity": {
                "a1": [1, 2, 3, 4], "a2": [18, 19, 20, 21],
                "dt": 0.05, "n_steps": 20000, "store_every": 10,
                "initial": "empty"
            }
        })"},

        // Steady-state negativity against the defect energy.
        {"fig18", R"({
            "chain": {"n_sites": 21},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0},
            "negativity": {
                "a1": [1, 2, 3, 4], "a2": [18, 19, 20, 21],
                "sweep_site": 11,
                "sweep_values": [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0]
            }
        })"},

        // Trajectory-averaged lattices at N=7, panels as in fig6.
        {"fig19a", R"({
            "chain": {"n_sites": 7},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0},
            "trajectories": {"n_traj": 1000, "dt": 0.1, "n_steps": 35000, "seed": 1}
        })"},
        {"fig19b", R"({
            "chain": {"n_sites": 7},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.75},
            "trajectories": {"n_traj": 1000, "dt": 0.1, "n_steps": 35000, "seed": 1}
        })"},
        {"fig19c", R"({
            "chain": {"n_sites": 7, "onsite_defects": [{"site": 4, "value": 3.0}]},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.0},
            "trajectories": {"n_traj": 1000, "dt": 0.1, "n_steps": 35000, "seed": 1}
        })"},
        {"fig19d", R"({
            "chain": {"n_sites": 7, "onsite_defects": [{"site": 4, "value": 3.0}]},
            "reservoir": {"regime": "large_bias", "g": 1.0, "delta": 0.75},
            "trajectories": {"n_traj": 1000, "dt": 0.1, "n_steps": 35000, "seed": 1}
        })"},
    };
    return sources;
}

// Panels that share another panel's parameters, and bare figure numbers
// resolving to their first panel.
inline const std::map<std::string, std::string>& preset_aliases() {
    static const std::map<std::string, std::string> aliases = {
        {"fig5", "fig5a"},    {"fig6", "fig6a"},    {"fig7", "fig7a"},    {"fig7a", "fig6a"},
        {"fig7b", "fig6b"},   {"fig7c", "fig6c"},   {"fig7d", "fig6d"},   {"fig8", "fig8a"},
        {"fig9", "fig8a"},    {"fig9a", "fig8a"},   {"fig9b", "fig8b"},   {"fig10", "fig8a"},
        {"fig10a", "fig8a"},  {"fig10b", "fig8b"},  {"fig11", "fig11a"},  {"fig11b", "fig11a"},
        {"fig11d", "fig11c"}, {"fig12", "fig11a"},  {"fig12a", "fig11a"}, {"fig12b", "fig11a"},
        {"fig12c", "fig11c"}, {"fig12d", "fig11c"}, {"fig19", "fig19a"},
    };
    return aliases;
}

} // namespace detail

inline std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, src] : detail::preset_sources()) {
        names.push_back(name);
    }
    for (const auto& [name, target] : detail::preset_aliases()) {
        names.push_back(name);
    }
    return names; // both maps are ordered, so the listing is sorted per group
}

// Alias -> canonical name, for catalog listings.
inline const std::map<std::string, std::string>& preset_alias_map() {
    return detail::preset_aliases();
}

inline nlohmann::json preset_config(const std::string& name) {
    std::string key = name;
    const auto& aliases = detail::preset_aliases();
    if (const auto alias = aliases.find(key); alias != aliases.end()) {
        key = alias->second;
    }
    const auto& sources = detail::preset_sources();
    const auto it = sources.find(key);
    if (it == sources.end()) {
        std::string known;
        for (const auto& n : preset_names()) {
            known += known.empty() ? n : ", " + n;
        }
        throw ConfigError("unknown preset '" + name + "' (available: " + known + ")");
    }
    return nlohmann::json::parse(it->second);
}

} // namespace infolat

#endif
