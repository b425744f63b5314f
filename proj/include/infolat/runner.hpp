#ifndef INFOLAT_RUNNER_HPP
#define INFOLAT_RUNNER_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "infolat/config.hpp"
#include "infolat/correlation_dynamics.hpp"
#include "infolat/csv_writer.hpp"
#include "infolat/fock_space.hpp"
#include "infolat/information_currents.hpp"
#include "infolat/information_lattice.hpp"
#include "infolat/mcwf.hpp"
#include "infolat/negativity.hpp"
#include "infolat/noise_lattice.hpp"
#include "infolat/version.hpp"

// Task dispatch: every task solves or evolves the configured model and writes
// CSV tables plus a JSON manifest into the output directory. File contents
// are byte-stable for identical configs (fixed formatting, fixed row order,
// no timestamps). Schemas are documented in docs/output_formats.md.

namespace infolat {

struct RunResult {
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
    nlohmann::json stats; // task-specific scalars echoed into the manifest
};

namespace detail {

struct TaskContext {
    const ExperimentConfig& cfg;
    std::filesystem::path dir;
    RunResult result;

    std::string file(const std::string& name) {
        result.outputs.push_back(name);
        return (dir / name).string();
    }
};

// The model instance a sweep point runs on; the base config with one drive or
// defect parameter replaced.
struct ModelInstance {
    ChainSpec chain;
    ReservoirSpec res;
    Eigen::MatrixXcd h;
};

inline ModelInstance base_model(const ExperimentConfig& cfg) {
    ModelInstance m{cfg.chain, cfg.reservoir.build(cfg.chain.n_sites, cfg.chain), {}};
    m.h = build_hamiltonian(m.chain);
    return m;
}

inline ModelInstance sweep_model(const ExperimentConfig& cfg, double value) {
    ModelInstance m{cfg.chain, {}, {}};
    ReservoirConfig res_cfg = cfg.reservoir;
    if (cfg.sweep->parameter == "delta") {
        res_cfg = res_cfg.with_delta(value);
    } else {
        m.chain.set_onsite(cfg.sweep->site, value);
    }
    m.res = res_cfg.build(m.chain.n_sites, m.chain);
    m.h = build_hamiltonian(m.chain);
    return m;
}

inline void write_lattice_csv(const std::string& path, const InfoLattice& lat) {
    CsvWriter csv(path, {"ell", "n2", "segment_info", "site_info"});
    for (const LatticeCoord& coord : all_coords(lat.triangle.n_sites())) {
        csv.row({static_cast<long long>(coord.ell), static_cast<long long>(coord.n2),
                 lat.triangle.at(coord), lat.site.at(coord)});
    }
}

inline void write_correlation_csv(const std::string& path, const Eigen::MatrixXcd& c) {
    CsvWriter csv(path, {"i", "j", "re", "im"});
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            csv.row({static_cast<long long>(i + 1), static_cast<long long>(j + 1), c(i, j).real(),
                     c(i, j).imag()});
        }
    }
}

inline Eigen::MatrixXcd initial_state(const QuenchInitial& init, const ModelInstance& post) {
    if (init.kind == "empty") {
        return Eigen::MatrixXcd::Zero(post.chain.n_sites, post.chain.n_sites);
    }
    const ChainSpec& chain = init.chain ? *init.chain : post.chain;
    if (chain.n_sites != post.chain.n_sites) {
        throw ConfigError("pre-quench chain length differs from the post-quench chain");
    }
    const ReservoirSpec res = init.reservoir ? init.reservoir->build(chain.n_sites, chain)
                                             : post.res;
    return solve_ness(build_hamiltonian(chain), res);
}

inline void run_ness(TaskContext& ctx) {
    if (ctx.cfg.sweep) {
        CsvWriter occ(ctx.file("occupations_sweep.csv"), {"value", "site", "occupation"});
        CsvWriter sum(ctx.file("sweep_summary.csv"), {"value", "particle_current"});
        for (const double value : ctx.cfg.sweep->values) {
            const ModelInstance m = sweep_model(ctx.cfg, value);
            const Eigen::MatrixXcd c = solve_ness(m.h, m.res);
            for (int j = 1; j <= m.chain.n_sites; ++j) {
                occ.row({value, static_cast<long long>(j), c(j - 1, j - 1).real()});
            }
            sum.row({value, particle_current(m.chain, c, 1)});
        }
        return;
    }
    const ModelInstance m = base_model(ctx.cfg);
    const Eigen::MatrixXcd c = solve_ness(m.h, m.res);
    write_correlation_csv(ctx.file("correlation.csv"), c);
    CsvWriter occ(ctx.file("occupations.csv"), {"site", "occupation"});
    for (int j = 1; j <= m.chain.n_sites; ++j) {
        occ.row({static_cast<long long>(j), c(j - 1, j - 1).real()});
    }
    ctx.result.stats["particle_current"] = particle_current(m.chain, c, 1);
}

inline void run_evolve(TaskContext& ctx) {
    if (!ctx.cfg.evolve) {
        throw ConfigError("task evolve needs an 'evolve' config section");
    }
    const EvolveParams& p = *ctx.cfg.evolve;
    const ModelInstance m = base_model(ctx.cfg);
    const double dt = p.dt ? *p.dt : default_dt(m.chain, m.res);
    const Eigen::MatrixXcd c0 = initial_state(p.initial, m);
    const std::vector<Snapshot> snaps = evolve(m.h, m.res, c0, dt, p.n_steps, p.store_every);

    CsvWriter occ(ctx.file("occupations_time.csv"), {"t", "site", "occupation"});
    CsvWriter cur(ctx.file("boundary_currents.csv"), {"t", "injected", "outgoing"});
    const int n = m.chain.n_sites;
    for (const Snapshot& s : snaps) {
        for (int j = 1; j <= n; ++j) {
            occ.row({s.t, static_cast<long long>(j), s.c(j - 1, j - 1).real()});
        }
        cur.row({s.t, -particle_current_env(s.c, m.res, 1), particle_current_env(s.c, m.res, n)});
    }
    write_correlation_csv(ctx.file("correlation.csv"), snaps.back().c);
    ctx.result.stats["dt"] = dt;
    ctx.result.stats["t_final"] = snaps.back().t;
}

inline void run_info_lattice(TaskContext& ctx) {
    const ModelInstance m = base_model(ctx.cfg);
    const InfoLattice lat = build_info_lattice(solve_ness(m.h, m.res));
    write_lattice_csv(ctx.file("info_lattice.csv"), lat);
    ctx.result.stats["total_information"] = lat.total;
}

inline void write_current_summaries(TaskContext& ctx, const ModelInstance& m,
                                    const Eigen::MatrixXcd& c, const TriangleCurrentSet& tri,
                                    const CurrentLattice& lat) {
    const int n = m.chain.n_sites;
    {
        CsvWriter csv(ctx.file("injected_currents.csv"),
                      {"j_in_left", "j_in_right", "particle_current"});
        csv.row({-lat.env.at({0, 2}), -lat.env.at({0, 2 * n}), particle_current(m.chain, c, 1)});
    }
    {
        CsvWriter csv(ctx.file("vertical_currents.csv"), {"ell", "value"});
        for (int ell = 0; ell < n - 1; ++ell) {
            csv.row({static_cast<long long>(ell), vertical_currents(lat, ell)});
        }
    }
    {
        CsvWriter csv(ctx.file("horizontal_currents.csv"), {"n", "plus", "minus"});
        for (int col = 1; col <= n; ++col) {
            const HorizontalCurrents h = horizontal_currents(lat, tri, col);
            csv.row({static_cast<long long>(col), h.plus, h.minus});
        }
    }
}

inline void run_info_currents(TaskContext& ctx) {
    if (ctx.cfg.sweep) {
        CsvWriter inj(ctx.file("sweep_injected.csv"),
                      {"value", "j_in_left", "j_in_right", "particle_current"});
        CsvWriter ver(ctx.file("sweep_vertical.csv"), {"value", "ell", "vertical"});
        CsvWriter hor(ctx.file("sweep_horizontal.csv"), {"value", "n", "plus", "minus"});
        bool clipped = false;
        for (const double value : ctx.cfg.sweep->values) {
            const ModelInstance m = sweep_model(ctx.cfg, value);
            const Eigen::MatrixXcd c = solve_ness(m.h, m.res);
            const TriangleCurrentSet tri = triangle_currents(m.h, m.res, c);
            const CurrentLattice lat = effective_currents(tri);
            clipped = clipped || tri.any_clipped;
            const int n = m.chain.n_sites;
            inj.row({value, -lat.env.at({0, 2}), -lat.env.at({0, 2 * n}),
                     particle_current(m.chain, c, 1)});
            for (int ell = 0; ell < n - 1; ++ell) {
                ver.row({value, static_cast<long long>(ell), vertical_currents(lat, ell)});
            }
            for (int col = 1; col <= n; ++col) {
                const HorizontalCurrents h = horizontal_currents(lat, tri, col);
                hor.row({value, static_cast<long long>(col), h.plus, h.minus});
            }
        }
        if (clipped) {
            ctx.result.warnings.push_back("log clip applied near a maximally mixed segment");
        }
        return;
    }
    const ModelInstance m = base_model(ctx.cfg);
    const Eigen::MatrixXcd c = solve_ness(m.h, m.res);
    const TriangleCurrentSet tri = triangle_currents(m.h, m.res, c);
    const CurrentLattice lat = effective_currents(tri);
    {
        CsvWriter csv(ctx.file("current_lattice.csv"), {"ell", "n2", "left", "right", "env",
                                                        "clipped"});
        for (const LatticeCoord& coord : all_coords(m.chain.n_sites)) {
            csv.row({static_cast<long long>(coord.ell), static_cast<long long>(coord.n2),
                     lat.left.at(coord), lat.right.at(coord), lat.env.at(coord),
                     static_cast<long long>(tri.clipped.at(coord) != 0.0)});
        }
    }
    write_current_summaries(ctx, m, c, tri, lat);
    if (tri.any_clipped) {
        ctx.result.warnings.push_back("log clip applied near a maximally mixed segment");
    }
}

inline void run_noise_lattice(TaskContext& ctx) {
    const ModelInstance m = base_model(ctx.cfg);
    const Eigen::MatrixXcd c = solve_ness(m.h, m.res);
    const NoiseLattice noise = build_noise_lattice(c);
    const InfoLattice info = build_info_lattice(c);
    const CurrentLattice exact = effective_currents(triangle_currents(m.h, m.res, c));
    const CurrentLattice appr = approx_currents(m.h, m.res, c);

    {
        CsvWriter csv(ctx.file("noise_lattice.csv"),
                      {"ell", "n2", "variance", "kappa", "i_appr", "i_exact"});
        for (const LatticeCoord& coord : all_coords(m.chain.n_sites)) {
            csv.row({static_cast<long long>(coord.ell), static_cast<long long>(coord.n2),
                     noise.variance.at(coord), noise.kappa.at(coord), noise.i_appr.at(coord),
                     info.site.at(coord)});
        }
    }
    {
        CsvWriter csv(ctx.file("current_comparison.csv"),
                      {"ell", "n2", "left_exact", "right_exact", "env_exact", "left_appr",
                       "right_appr", "env_appr"});
        for (const LatticeCoord& coord : all_coords(m.chain.n_sites)) {
            csv.row({static_cast<long long>(coord.ell), static_cast<long long>(coord.n2),
                     exact.left.at(coord), exact.right.at(coord), exact.env.at(coord),
                     appr.left.at(coord), appr.right.at(coord), appr.env.at(coord)});
        }
    }
}

inline void run_negativity(TaskContext& ctx) {
    if (!ctx.cfg.negativity) {
        throw ConfigError("task negativity needs a 'negativity' config section");
    }
    const NegativityParams& p = *ctx.cfg.negativity;
    const Bipartition part{p.a1, p.a2};

    if (p.sweep_site) {
        CsvWriter csv(ctx.file("negativity_sweep.csv"), {"onsite", "negativity"});
        for (const double value : p.sweep_values) {
            ChainSpec chain = ctx.cfg.chain;
            chain.set_onsite(*p.sweep_site, value);
            const ReservoirSpec res = ctx.cfg.reservoir.build(chain.n_sites, chain);
            const Eigen::MatrixXcd c = solve_ness(build_hamiltonian(chain), res);
            csv.row({value, fermionic_negativity(c, part)});
        }
        return;
    }

    const ModelInstance m = base_model(ctx.cfg);
    const double dt = p.dt ? *p.dt : default_dt(m.chain, m.res);
    const Eigen::MatrixXcd c0 = initial_state(p.initial, m);
    const std::vector<Snapshot> snaps = evolve(m.h, m.res, c0, dt, p.n_steps, p.store_every);

    CsvWriter neg(ctx.file("negativity_time.csv"), {"t", "negativity"});
    CsvWriter cur(ctx.file("boundary_currents.csv"), {"t", "injected", "outgoing"});
    const int n = m.chain.n_sites;
    for (const Snapshot& s : snaps) {
        neg.row({s.t, fermionic_negativity(s.c, part)});
        cur.row({s.t, -particle_current_env(s.c, m.res, 1), particle_current_env(s.c, m.res, n)});
    }
    ctx.result.stats["dt"] = dt;
    ctx.result.stats["negativity_final"] = fermionic_negativity(snaps.back().c, part);
}

inline void run_trajectories(TaskContext& ctx) {
    if (!ctx.cfg.trajectories) {
        throw ConfigError("task trajectories needs a 'trajectories' config section");
    }
    const TrajectoryParams& p = *ctx.cfg.trajectories;
    const ModelInstance m = base_model(ctx.cfg);
    const FockOperators ops = build_fock_operators(m.chain, m.res);
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(fock_dimension(m.chain.n_sites));
    psi0(0) = 1.0; // empty chain

    const TrajectoryEnsemble ens =
        mcwf_run(ops, psi0, p.dt, p.n_steps, p.n_traj, p.seed, p.store_every);
    write_correlation_csv(ctx.file("ensemble_correlation.csv"), ensemble_correlation(ens));
    const InfoLattice lat = trajectory_info_lattice(ens);
    write_lattice_csv(ctx.file("trajectory_lattice.csv"), lat);

    ctx.result.stats["total_information"] = lat.total;
    ctx.result.stats["total_jumps"] = ens.total_jumps;
    ctx.result.stats["oversize_steps"] = ens.oversize_steps;
    ctx.result.stats["max_p_total"] = ens.max_p_total;
    if (ens.oversize_steps > 0) {
        ctx.result.warnings.push_back(
            "jump probability exceeded the first-order comfort zone on " +
            std::to_string(ens.oversize_steps) + " steps (max " +
            std::to_string(ens.max_p_total) + "); consider a smaller dt");
    }
}

} // namespace detail

inline const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names = {
        "ness",          "evolve",     "info_lattice", "info_currents",
        "noise_lattice", "negativity", "trajectories",
    };
    return names;
}

inline RunResult run_task(const std::string& task, const ExperimentConfig& cfg,
                          const std::string& out_dir) {
    if (!cfg.task.empty() && cfg.task != task) {
        throw ConfigError("config declares task '" + cfg.task + "' but '" + task +
                          "' was requested");
    }
    detail::TaskContext ctx{cfg, std::filesystem::path(out_dir), {}};
    try {
        std::filesystem::create_directories(ctx.dir);
    } catch (const std::filesystem::filesystem_error& e) {
        throw IoError("cannot create output directory " + out_dir + ": " + e.what());
    }

    if (task == "ness") {
        detail::run_ness(ctx);
    } else if (task == "evolve") {
        detail::run_evolve(ctx);
    } else if (task == "info_lattice") {
        detail::run_info_lattice(ctx);
    } else if (task == "info_currents") {
        detail::run_info_currents(ctx);
    } else if (task == "noise_lattice") {
        detail::run_noise_lattice(ctx);
    } else if (task == "negativity") {
        detail::run_negativity(ctx);
    } else if (task == "trajectories") {
        detail::run_trajectories(ctx);
    } else {
        std::string known;
        for (const std::string& name : task_names()) {
            known += known.empty() ? name : " | " + name;
        }
        throw ConfigError("unknown task '" + task + "' (tasks: " + known + ")");
    }

    nlohmann::json manifest;
    manifest["schema_version"] = manifest_schema_version;
    manifest["version"] = version_string;
    manifest["task"] = task;
    manifest["config"] = cfg.resolved;
    manifest["outputs"] = ctx.result.outputs;
    manifest["warnings"] = ctx.result.warnings;
    manifest["stats"] = ctx.result.stats.is_null() ? nlohmann::json::object() : ctx.result.stats;
    std::ofstream out(ctx.dir / "manifest.json", std::ios::binary);
    if (!out) {
        throw IoError("cannot open output file " + (ctx.dir / "manifest.json").string());
    }
    out << manifest.dump(2) << '\n';
    ctx.result.outputs.push_back("manifest.json");
    return ctx.result;
}

} // namespace infolat

#endif
