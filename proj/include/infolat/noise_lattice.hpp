#ifndef INFOLAT_NOISE_LATTICE_HPP
#define INFOLAT_NOISE_LATTICE_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "infolat/chain_model.hpp"
#include "infolat/correlation_dynamics.hpp"
#include "infolat/information_currents.hpp"
#include "infolat/lattice_coord.hpp"

// Particle-number fluctuations arranged on the segment lattice, plus the
// second-cumulant stand-ins for local information and information currents
// built from them. Everything reduces to quadratic functions of the
// correlation matrix through Wick contractions; docs/wick_covariances.md
// records the derivations and the telescoping that yields the cell currents.

namespace infolat {

// Weight of the second cumulant in the entropy expansion, in bits:
// the entropy of a segment is approximated by this factor times the
// particle-number variance.
inline const double second_cumulant_weight =
    (M_PI * M_PI) / (3.0 * std::log(2.0));

// Var(n_A) = Tr(C_A - C_A^2) for the reduced correlation matrix of a
// contiguous or arbitrary index set. Validates that the block is a
// physical correlation matrix first.
inline double subsystem_variance(const Eigen::MatrixXcd& c_a) {
    if (c_a.rows() != c_a.cols()) {
        throw std::invalid_argument("subsystem_variance: block is not square");
    }
    const PhysicalityReport report = check_physicality(c_a);
    if (!report.is_physical()) {
        throw std::invalid_argument("subsystem_variance: block is not a correlation matrix (min eig " +
                                    std::to_string(report.min_eigenvalue) + ", max eig " +
                                    std::to_string(report.max_eigenvalue) + ")");
    }
    return c_a.trace().real() - c_a.squaredNorm();
}

// Cov(n_i, n_j) = -|C_ij|^2 for distinct sites, 1-based.
inline double wick_covariance_nn(const Eigen::MatrixXcd& c, int i, int j) {
    const int n = static_cast<int>(c.rows());
    if (i < 1 || i > n || j < 1 || j > n) {
        throw std::out_of_range("wick_covariance_nn: site index outside the chain");
    }
    if (i == j) {
        throw std::invalid_argument("wick_covariance_nn: same site twice, use the variance");
    }
    return -std::norm(c(i - 1, j - 1));
}

// Cov of the bond-a particle current with the occupation of site b,
//   Cov(I_{a->a+1}, n_b) = -2 J_a Im( C_{a+1,b} C_{b,a} ),
// valid only when b is not an endpoint of the bond.
inline double wick_covariance_current_number(const ChainSpec& chain, const Eigen::MatrixXcd& c,
                                             int a, int b) {
    const int n = static_cast<int>(c.rows());
    if (a < 1 || a >= n || b < 1 || b > n) {
        throw std::out_of_range("wick_covariance_current_number: index outside the chain");
    }
    if (b == a || b == a + 1) {
        throw std::invalid_argument(
            "wick_covariance_current_number: site touches the bond, extra contractions apply");
    }
    const double j_hop = chain.hopping_at(a);
    return -2.0 * j_hop * (c(a, b - 1) * c(b - 1, a - 1)).imag();
}

struct NoiseLattice {
    TriangularArray variance; // Var(n_A) per segment
    TriangularArray kappa;    // second difference of the variances
    TriangularArray i_appr;   // second-cumulant estimate of the site values
};

// Variances for every contiguous segment and their lattice second
// differences. The estimate i_appr = [ell == 0] - weight * kappa mirrors the
// construction of the site-resolved information from segment informations;
// slightly negative values are expected where the approximation strains.
inline NoiseLattice build_noise_lattice(const Eigen::MatrixXcd& c) {
    const int n = static_cast<int>(c.rows());
    const PhysicalityReport report = check_physicality(c);
    if (!report.is_physical()) {
        throw std::invalid_argument("build_noise_lattice: not a correlation matrix (min eig " +
                                    std::to_string(report.min_eigenvalue) + ", max eig " +
                                    std::to_string(report.max_eigenvalue) + ")");
    }

    NoiseLattice lat{TriangularArray(n), TriangularArray(n), TriangularArray(n)};
    for (const LatticeCoord& coord : all_coords(n)) {
        const int a0 = coord.j_left() - 1;
        const int len = coord.n_sites();
        const Eigen::MatrixXcd block = c.block(a0, a0, len, len);
        lat.variance.at(coord) = block.trace().real() - block.squaredNorm();
    }
    for (const LatticeCoord& coord : all_coords(n)) {
        const double kappa = lat.variance.at(coord) -
                             lat.variance.at_or_zero(coord.left_sub()) -
                             lat.variance.at_or_zero(coord.right_sub()) +
                             lat.variance.at_or_zero(coord.center_sub());
        lat.kappa.at(coord) = kappa;
        lat.i_appr.at(coord) = (coord.ell == 0 ? 1.0 : 0.0) - second_cumulant_weight * kappa;
    }
    return lat;
}

// d/dt Var(n_A) = Tr_A[(I - 2 C_A)(i F_left + i F_right + F_env)]; the
// commutator part of the segment equation of motion traces away against any
// function of C_A.
inline double variance_rate(const Eigen::MatrixXcd& h, const ReservoirSpec& res,
                            const Eigen::MatrixXcd& c, const LatticeCoord& segment) {
    const FMatrices f = f_matrices(h, res, c, segment);
    const int a0 = segment.j_left() - 1;
    const int len = segment.n_sites();
    const Eigen::MatrixXcd weight =
        Eigen::MatrixXcd::Identity(len, len) - 2.0 * c.block(a0, a0, len, len);
    const std::complex<double> i1(0.0, 1.0);
    const std::complex<double> rate = (weight * (i1 * f.left + i1 * f.right + f.env)).trace();
    return detail::real_checked(rate, "variance_rate");
}

// Second-cumulant estimates of the effective cell currents. The bottom layer
// weighs the particle currents through the cell with alpha (2 C_nn - 1);
// higher cells reduce to endpoint covariances after the stencil telescopes,
// with the uniform prefactor 2 alpha derived in docs/wick_covariances.md.
// Flows that would leave the lattice sideways are structural zeros, as in
// the exact currents.
inline CurrentLattice approx_currents(const Eigen::MatrixXcd& h, const ReservoirSpec& res,
                                      const Eigen::MatrixXcd& c) {
    const int n = static_cast<int>(c.rows());
    if (h.rows() != n || h.cols() != n || res.inject.size() != n) {
        throw std::invalid_argument("approx_currents: dimension mismatch");
    }
    const double alpha = second_cumulant_weight;
    const auto bond = [&](int a) { return h(a - 1, a).real(); }; // J_a, 1-based bond
    const auto particle_bond = [&](int a) {
        return -2.0 * bond(a) * c(a - 1, a).imag();
    };
    const auto cov_current_number = [&](int a, int b) {
        return -2.0 * bond(a) * (c(a, b - 1) * c(b - 1, a - 1)).imag();
    };

    CurrentLattice lat{TriangularArray(n), TriangularArray(n), TriangularArray(n)};
    for (const LatticeCoord& coord : all_coords(n)) {
        const int jl = coord.j_left();
        const int jr = coord.j_right();
        if (coord.ell == 0) {
            const double weight = alpha * (2.0 * c(jl - 1, jl - 1).real() - 1.0);
            lat.right.at(coord) = jr < n ? particle_bond(jl) * weight : 0.0;
            lat.left.at(coord) = jl > 1 ? -particle_bond(jl - 1) * weight : 0.0;
            lat.env.at(coord) = particle_current_env(c, res, jl) * weight;
        } else {
            lat.right.at(coord) = jr < n ? -2.0 * alpha * cov_current_number(jr, jl) : 0.0;
            lat.left.at(coord) = jl > 1 ? 2.0 * alpha * cov_current_number(jl - 1, jr) : 0.0;
            const double rate_sum = res.total_rate(jl) + res.total_rate(jr);
            lat.env.at(coord) = 2.0 * alpha * rate_sum * std::norm(c(jl - 1, jr - 1));
        }
    }
    return lat;
}

} // namespace infolat

#endif
