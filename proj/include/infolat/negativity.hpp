#ifndef INFOLAT_NEGATIVITY_HPP
#define INFOLAT_NEGATIVITY_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "infolat/correlation_dynamics.hpp"
#include "infolat/information_lattice.hpp"

// Fermionic logarithmic negativity between two disjoint site sets of a
// Gaussian state. The partial transpose of a Gaussian density matrix on the
// second region is a weighted sum of two Gaussian operators whose covariance
// matrices differ only in the sign pattern applied to the blocks of
// G = 2C - 1; the negativity then follows from the spectra of the combined
// transformed matrix and of the reduced correlation matrix itself. Values
// are in natural-log units, unlike the bit-valued information quantities.

namespace infolat {

// The transformed matrix is similar to a Hermitian one, so its spectrum is
// real and confined to [0,1] up to roundoff. Larger imaginary parts or
// excursions indicate a genuinely broken input and abort the evaluation.
inline constexpr double negativity_imag_tol = 1e-8;
inline constexpr double negativity_clip_tol = 1e-10;

// Two disjoint nonempty site sets (1-based), neither required to be
// contiguous, with an arbitrary untouched remainder of the chain.
struct Bipartition {
    std::vector<int> a1;
    std::vector<int> a2;

    void validate(Eigen::Index n_sites) const {
        if (a1.empty() || a2.empty()) {
            throw std::invalid_argument("Bipartition: both regions must be nonempty");
        }
        std::vector<char> seen(static_cast<std::size_t>(n_sites), 0);
        for (const auto* region : {&a1, &a2}) {
            for (const int j : *region) {
                if (j < 1 || j > n_sites) {
                    throw std::out_of_range("Bipartition: site index out of range");
                }
                if (seen[j - 1]++) {
                    throw std::invalid_argument("Bipartition: regions overlap or repeat a site");
                }
            }
        }
    }

    // Sites of A1 then A2, each in ascending order; the block layout the
    // sign pattern below is written for.
    std::vector<int> joint() const {
        std::vector<int> sites = a1;
        std::sort(sites.begin(), sites.end());
        std::vector<int> tail = a2;
        std::sort(tail.begin(), tail.end());
        sites.insert(sites.end(), tail.begin(), tail.end());
        return sites;
    }
};

inline double fermionic_negativity(const Eigen::MatrixXcd& c, const Bipartition& part) {
    part.validate(c.rows());
    const PhysicalityReport report = check_physicality(c);
    if (!report.is_physical()) {
        throw std::invalid_argument(
            "fermionic_negativity: not a correlation matrix (min eig " +
            std::to_string(report.min_eigenvalue) + ", max eig " +
            std::to_string(report.max_eigenvalue) + ")");
    }

    const Eigen::MatrixXcd ca = reduced_correlation(c, part.joint());
    const Eigen::Index m1 = static_cast<Eigen::Index>(part.a1.size());
    const Eigen::Index m2 = static_cast<Eigen::Index>(part.a2.size());
    const Eigen::Index m = m1 + m2;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);
    const Eigen::MatrixXcd ga = 2.0 * ca - id;

    // Covariance matrices of the two Gaussian factors of the partial
    // transpose: off-diagonal blocks rotated by +-i, transposed-region
    // diagonal block negated. They are mutual adjoints.
    const std::complex<double> i1(0.0, 1.0);
    Eigen::MatrixXcd gp = ga;
    gp.topRightCorner(m1, m2) *= i1;
    gp.bottomLeftCorner(m2, m1) *= i1;
    gp.bottomRightCorner(m2, m2) *= -1.0;
    Eigen::MatrixXcd gm = ga;
    gm.topRightCorner(m1, m2) *= -i1;
    gm.bottomLeftCorner(m2, m1) *= -i1;
    gm.bottomRightCorner(m2, m2) *= -1.0;

    // 1 + gp*gm = 1 + gp*gp^H never drops below the identity, so a failed
    // solve here means the inputs were broken rather than ill-conditioned.
    const Eigen::MatrixXcd denom = id + gp * gm;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(denom);
    if (lu.rcond() < 1e-14) {
        throw std::runtime_error("fermionic_negativity: singular combination of transformed blocks");
    }
    const Eigen::MatrixXcd gt = 0.5 * (id - lu.solve(gp + gm));

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(gt);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("fermionic_negativity: eigensolver failed");
    }
    double value = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
        const std::complex<double> lam = es.eigenvalues()(k);
        if (std::abs(lam.imag()) > negativity_imag_tol) {
            throw std::runtime_error("fermionic_negativity: complex eigenvalue " +
                                     std::to_string(lam.real()) + " + " +
                                     std::to_string(lam.imag()) + "i");
        }
        double lr = lam.real();
        if (lr < -negativity_clip_tol || lr > 1.0 + negativity_clip_tol) {
            throw std::runtime_error("fermionic_negativity: eigenvalue " + std::to_string(lr) +
                                     " outside [0,1]");
        }
        lr = std::min(1.0, std::max(0.0, lr));
        value += std::log(std::sqrt(lr) + std::sqrt(1.0 - lr));
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> mes(ca, Eigen::EigenvaluesOnly);
    for (Eigen::Index k = 0; k < m; ++k) {
        const double mu = mes.eigenvalues()(k);
        value += 0.5 * std::log(mu * mu + (1.0 - mu) * (1.0 - mu));
    }
    return value;
}

struct NegativityPoint {
    double t;
    double value;
};

// Negativity along a trajectory of the dissipative evolution, sampled after
// every integrator step, starting from an arbitrary initial state.
inline std::vector<NegativityPoint> negativity_series(const Eigen::MatrixXcd& h,
                                                      const ReservoirSpec& res,
                                                      const Eigen::MatrixXcd& c0,
                                                      const Bipartition& part, double dt,
                                                      int n_steps) {
    if (dt <= 0.0) {
        throw std::invalid_argument("negativity_series: dt must be positive");
    }
    if (n_steps < 0) {
        throw std::invalid_argument("negativity_series: n_steps must be nonnegative");
    }
    Eigen::MatrixXcd c = 0.5 * (c0 + c0.adjoint());
    std::vector<NegativityPoint> out;
    out.reserve(static_cast<std::size_t>(n_steps) + 1);
    out.push_back({0.0, fermionic_negativity(c, part)});
    for (int step = 1; step <= n_steps; ++step) {
        c = detail::rk4_step(h, res, c, dt);
        c = 0.5 * (c + c.adjoint()).eval();
        detail::enforce_physicality(c, step);
        out.push_back({step * dt, fermionic_negativity(c, part)});
    }
    return out;
}

// Sudden-quench protocol: prepare the steady state of the pre-quench
// generators, then evolve and sample under the post-quench ones.
inline std::vector<NegativityPoint> negativity_quench_series(
    const Eigen::MatrixXcd& h_pre, const ReservoirSpec& res_pre, const Eigen::MatrixXcd& h_post,
    const ReservoirSpec& res_post, const Bipartition& part, double dt, int n_steps) {
    return negativity_series(h_post, res_post, solve_ness(h_pre, res_pre), part, dt, n_steps);
}

} // namespace infolat

#endif
