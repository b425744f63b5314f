#ifndef INFOLAT_MCWF_HPP
#define INFOLAT_MCWF_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "infolat/fock_space.hpp"
#include "infolat/information_lattice.hpp"

// Monte-Carlo wave-function unraveling of the master equation: stochastic
// pure-state trajectories in the full Fock space, propagated with a fixed
// first-order step, and trajectory-averaged observables on top of them.

namespace infolat {

// A step whose total jump probability exceeds this is counted as oversized
// (the first-order splitting is no longer accurate there); a total above 1 is
// not a probability at all and aborts the run.
inline constexpr double mcwf_warn_threshold = 0.1;

struct PureState {
    Eigen::VectorXcd amplitudes;
    double norm() const { return amplitudes.norm(); }
};

struct TrajectoryEnsemble {
    int n_sites = 0;
    int n_traj = 0;
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::vector<int> sample_steps;                 // ascending, the last one is the final step
    std::vector<std::vector<PureState>> snapshots; // snapshots[trajectory][sample]
    long long total_jumps = 0;
    long long oversize_steps = 0; // steps with p_total > mcwf_warn_threshold
    double max_p_total = 0.0;

    int n_samples() const { return static_cast<int>(sample_steps.size()); }
    double sample_time(int s) const { return sample_steps.at(s) * dt; }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Engine for one trajectory, reproducible in isolation from (seed, index).
inline std::mt19937_64 trajectory_engine(std::uint64_t seed, int index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) + std::uint64_t(index)));
}

// Uniform double in [0,1) built from the raw 64-bit draw, so the stream does
// not depend on the standard library's distribution implementation.
inline double uniform01(std::mt19937_64& eng) {
    return double(eng() >> 11) * 0x1.0p-53;
}

// Applies exp(A) by scaled Taylor summation; A is fixed at construction (the
// per-step generator -i dt H_eff), with column sums deciding the number of
// substeps that keep each series convergent to machine precision.
class ExpmApplier {
public:
    ExpmApplier() = default;

    explicit ExpmApplier(SparseOperator a) : a_(std::move(a)) {
        double theta = 0.0;
        for (int k = 0; k < a_.outerSize(); ++k) {
            double col = 0.0;
            for (SparseOperator::InnerIterator it(a_, k); it; ++it) {
                col += std::abs(it.value());
            }
            theta = std::max(theta, col);
        }
        substeps_ = std::max(1, static_cast<int>(std::ceil(theta)));
        if (substeps_ > 1) {
            a_ *= 1.0 / substeps_;
        }
    }

    void apply(Eigen::VectorXcd& v, Eigen::VectorXcd& term, Eigen::VectorXcd& prod) const {
        for (int r = 0; r < substeps_; ++r) {
            term = v;
            const double scale = v.norm();
            bool converged = false;
            for (int m = 1; m <= max_terms; ++m) {
                prod.noalias() = a_ * term;
                term.swap(prod);
                term *= 1.0 / m;
                v += term;
                if (term.norm() <= 1e-16 * scale) {
                    converged = true;
                    break;
                }
            }
            if (!converged) {
                throw std::runtime_error("ExpmApplier: Taylor series did not converge");
            }
        }
    }

private:
    static constexpr int max_terms = 64;

    SparseOperator a_;
    int substeps_ = 1;
};

} // namespace detail

// Runs n_traj stochastic trajectories of n_steps fixed steps each. Per step,
// jump k fires with probability p_k = dt <L_k^dag L_k>; one jump is selected
// proportionally, applied and normalized, and otherwise the state evolves
// under exp(-i dt H_eff) with H_eff = H - (i/2) sum L^dag L and is
// renormalized. Snapshots are stored every store_every steps plus the final
// step (store_every = 0 stores the final state only).
inline TrajectoryEnsemble mcwf_run(const FockOperators& ops, const Eigen::VectorXcd& psi0,
                                   double dt, int n_steps, int n_traj, std::uint64_t seed,
                                   int store_every = 0) {
    const Eigen::Index dim = fock_dimension(ops.n_sites);
    if (ops.hamiltonian.rows() != dim || ops.hamiltonian.cols() != dim) {
        throw std::invalid_argument("mcwf_run: Hamiltonian dimension does not match n_sites");
    }
    for (const SparseOperator& jump : ops.jumps) {
        if (jump.rows() != dim || jump.cols() != dim) {
            throw std::invalid_argument("mcwf_run: jump operator dimension does not match n_sites");
        }
    }
    if (psi0.size() != dim) {
        throw std::invalid_argument("mcwf_run: initial state length does not match n_sites");
    }
    if (dt <= 0.0) {
        throw std::invalid_argument("mcwf_run: dt must be positive");
    }
    if (n_steps < 0 || n_traj < 1 || store_every < 0) {
        throw std::invalid_argument("mcwf_run: bad n_steps, n_traj or store_every");
    }
    if (ops.max_rate > 0.0 && dt * ops.max_rate >= 1.0) {
        throw std::invalid_argument("mcwf_run: dt does not resolve the fastest reservoir time 1/" +
                                    std::to_string(ops.max_rate));
    }
    const double norm0 = psi0.norm();
    if (norm0 < 1e-12) {
        throw std::invalid_argument("mcwf_run: initial state has zero norm");
    }

    TrajectoryEnsemble ens;
    ens.n_sites = ops.n_sites;
    ens.n_traj = n_traj;
    ens.seed = seed;
    ens.dt = dt;
    if (store_every > 0) {
        for (int step = 0; step < n_steps; step += store_every) {
            ens.sample_steps.push_back(step);
        }
    }
    ens.sample_steps.push_back(n_steps);
    ens.snapshots.resize(n_traj);

    // Fixed-step generator -i dt H_eff = -i dt H - (dt/2) sum L^dag L.
    SparseOperator gen = SparseOperator(std::complex<double>(0.0, -dt) * ops.hamiltonian);
    for (const SparseOperator& jump : ops.jumps) {
        gen = gen - std::complex<double>(0.5 * dt) * SparseOperator(jump.adjoint() * jump);
    }
    gen.makeCompressed();
    const detail::ExpmApplier stepper(std::move(gen));

    const int n_jumps = static_cast<int>(ops.jumps.size());
    std::vector<Eigen::VectorXcd> phi(n_jumps, Eigen::VectorXcd(dim));
    std::vector<double> p(n_jumps, 0.0);
    Eigen::VectorXcd term(dim);
    Eigen::VectorXcd prod(dim);

    for (int k = 0; k < n_traj; ++k) {
        std::mt19937_64 eng = detail::trajectory_engine(seed, k);
        Eigen::VectorXcd psi = psi0 / norm0;
        ens.snapshots[k].reserve(ens.sample_steps.size());
        std::size_t next_sample = 0;
        if (ens.sample_steps[next_sample] == 0) {
            ens.snapshots[k].push_back({psi});
            ++next_sample;
        }
        for (int step = 1; step <= n_steps; ++step) {
            double p_total = 0.0;
            for (int q = 0; q < n_jumps; ++q) {
                phi[q].noalias() = ops.jumps[q] * psi;
                p[q] = dt * phi[q].squaredNorm();
                p_total += p[q];
            }
            ens.max_p_total = std::max(ens.max_p_total, p_total);
            if (p_total > 1.0) {
                throw std::runtime_error("mcwf_run: total jump probability " +
                                         std::to_string(p_total) + " exceeds 1 at step " +
                                         std::to_string(step) + " of trajectory " +
                                         std::to_string(k));
            }
            if (p_total > mcwf_warn_threshold) {
                ++ens.oversize_steps;
            }
            const double u = detail::uniform01(eng);
            if (u < p_total) {
                double cumulative = 0.0;
                int chosen = -1;
                for (int q = 0; q < n_jumps; ++q) {
                    cumulative += p[q];
                    if (u < cumulative) {
                        chosen = q;
                        break;
                    }
                }
                if (chosen < 0) { // roundoff in the cumulative walk
                    for (int q = n_jumps - 1; q >= 0; --q) {
                        if (p[q] > 0.0) {
                            chosen = q;
                            break;
                        }
                    }
                }
                psi = phi[chosen] / std::sqrt(p[chosen] / dt);
                ++ens.total_jumps;
            } else {
                stepper.apply(psi, term, prod);
                psi /= psi.norm();
            }
            if (next_sample < ens.sample_steps.size() && ens.sample_steps[next_sample] == step) {
                ens.snapshots[k].push_back({psi});
                ++next_sample;
            }
        }
        while (next_sample < ens.sample_steps.size()) { // n_steps == 0 with no step-0 sample
            ens.snapshots[k].push_back({psi});
            ++next_sample;
        }
    }
    return ens;
}

namespace detail {

inline int resolve_sample(const TrajectoryEnsemble& ens, int sample) {
    if (ens.n_traj < 1 || ens.snapshots.size() != std::size_t(ens.n_traj) ||
        ens.sample_steps.empty()) {
        throw std::invalid_argument("trajectory ensemble is empty or inconsistent");
    }
    const int n_samples = ens.n_samples();
    if (sample < 0) {
        return n_samples - 1;
    }
    if (sample >= n_samples) {
        throw std::out_of_range("sample index " + std::to_string(sample) + " outside 0.." +
                                std::to_string(n_samples - 1));
    }
    return sample;
}

} // namespace detail

// Ensemble-averaged correlation matrix at one sample time (default: final).
inline Eigen::MatrixXcd ensemble_correlation(const TrajectoryEnsemble& ens, int sample = -1) {
    const int s = detail::resolve_sample(ens, sample);
    Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(ens.n_sites, ens.n_sites);
    for (int k = 0; k < ens.n_traj; ++k) {
        mean += state_correlation(ens.snapshots[k][s].amplitudes, ens.n_sites);
    }
    return mean / double(ens.n_traj);
}

// Trajectory-averaged information lattice at one sample time: per trajectory,
// segment informations from exact partial traces of the pure state, then the
// site decomposition, then the ensemble mean. Averaging happens after the
// per-trajectory decomposition, so pure-trajectory information survives where
// the averaged (mixed) state would wash it out.
inline InfoLattice trajectory_info_lattice(const TrajectoryEnsemble& ens, int sample = -1) {
    const int s = detail::resolve_sample(ens, sample);
    const int n = ens.n_sites;
    InfoLattice mean{TriangularArray(n), TriangularArray(n), 0.0};
    const std::vector<LatticeCoord> coords = all_coords(n);
    for (int k = 0; k < ens.n_traj; ++k) {
        const Eigen::VectorXcd& psi = ens.snapshots[k][s].amplitudes;
        TriangularArray triangle(n);
        for (const LatticeCoord& coord : coords) {
            const Eigen::MatrixXcd rdm =
                fock_segment_density(psi, n, coord.j_left(), coord.j_right());
            triangle.at(coord) = coord.n_sites() - fock_entropy_bits(rdm);
        }
        const InfoLattice one = lattice_from_triangle(std::move(triangle));
        for (const LatticeCoord& coord : coords) {
            mean.triangle.at(coord) += one.triangle.at(coord);
            mean.site.at(coord) += one.site.at(coord);
        }
        mean.total += one.total;
    }
    for (const LatticeCoord& coord : coords) {
        mean.triangle.at(coord) /= double(ens.n_traj);
        mean.site.at(coord) /= double(ens.n_traj);
    }
    mean.total /= double(ens.n_traj);
    return mean;
}

} // namespace infolat

#endif
