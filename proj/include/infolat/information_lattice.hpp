#ifndef INFOLAT_INFORMATION_LATTICE_HPP
#define INFOLAT_INFORMATION_LATTICE_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "infolat/lattice_coord.hpp"
#include "infolat/matrix_functions.hpp"

// Von Neumann information of connected segments and its decomposition into
// the scale-resolved information lattice.

namespace infolat {

// Submatrix of C on the given 1-based sites, order-preserving. Handles
// non-contiguous site sets (as needed for two disjoint regions).
inline Eigen::MatrixXcd reduced_correlation(const Eigen::MatrixXcd& c,
                                            const std::vector<int>& sites) {
    if (sites.empty()) {
        throw std::invalid_argument("reduced_correlation: empty site set");
    }
    const Eigen::Index n = c.rows();
    Eigen::MatrixXcd sub(sites.size(), sites.size());
    for (std::size_t a = 0; a < sites.size(); ++a) {
        if (sites[a] < 1 || sites[a] > n) {
            throw std::out_of_range("reduced_correlation: site index out of range");
        }
        for (std::size_t b = 0; b < sites.size(); ++b) {
            sub(a, b) = c(sites[a] - 1, sites[b] - 1);
        }
    }
    return sub;
}

inline Eigen::MatrixXcd reduced_correlation(const Eigen::MatrixXcd& c, const LatticeCoord& coord) {
    const int len = coord.n_sites();
    if (coord.j_left() < 1 || coord.j_right() > c.rows()) {
        throw std::out_of_range("reduced_correlation: segment outside chain");
    }
    return c.block(coord.j_left() - 1, coord.j_left() - 1, len, len);
}

// Information of a subsystem in bits: I_A = N_A - sum_i H2(mu_i) over the
// occupation eigenvalues of C_A.
inline double subsystem_information(const Eigen::MatrixXcd& c_a) {
    const Eigen::VectorXd mu = occupation_spectrum(c_a);
    double info = static_cast<double>(c_a.rows());
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        info -= binary_entropy(mu(i));
    }
    return info;
}

inline double total_information(const Eigen::MatrixXcd& c) {
    return subsystem_information(c);
}

struct InfoLattice {
    TriangularArray triangle; // I_(ell,n): information of each segment
    TriangularArray site;     // i_(ell,n): information first visible at scale ell
    double total = 0.0;
};

// Second-difference decomposition of a filled segment-information triangle:
//   i_(ell,n) = I_(ell,n) - I_(ell-1,n-1/2) - I_(ell-1,n+1/2) + I_(ell-2,n),
// with I == 0 below the bottom layer. The triangle can come from any segment
// information source (correlation matrices here, trajectory ensembles in the
// unraveling module), so it is exposed separately.
inline InfoLattice lattice_from_triangle(TriangularArray triangle) {
    const int n = triangle.n_sites();
    InfoLattice lattice{std::move(triangle), TriangularArray(n), 0.0};
    for (const LatticeCoord& coord : all_coords(n)) {
        lattice.site.at(coord) = lattice.triangle.at(coord) -
                                 lattice.triangle.at_or_zero(coord.left_sub()) -
                                 lattice.triangle.at_or_zero(coord.right_sub()) +
                                 lattice.triangle.at_or_zero(coord.center_sub());
    }
    lattice.total = lattice.triangle.at({n - 1, n + 1});
    return lattice;
}

inline InfoLattice build_info_lattice(const Eigen::MatrixXcd& c) {
    const int n = static_cast<int>(c.rows());
    TriangularArray triangle(n);
    for (const LatticeCoord& coord : all_coords(n)) {
        triangle.at(coord) = subsystem_information(reduced_correlation(c, coord));
    }
    return lattice_from_triangle(std::move(triangle));
}

} // namespace infolat

#endif
