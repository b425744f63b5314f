#ifndef INFOLAT_INFORMATION_CURRENTS_HPP
#define INFOLAT_INFORMATION_CURRENTS_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "infolat/chain_model.hpp"
#include "infolat/correlation_dynamics.hpp"
#include "infolat/information_lattice.hpp"
#include "infolat/lattice_coord.hpp"
#include "infolat/matrix_functions.hpp"
#include "infolat/oracle_n3.hpp"

// Information currents on the triangular segment lattice: per-segment flow
// matrices, the effective cell-to-cell currents obtained from them by
// differencing, the resulting local balance law, and the coarse horizontal
// and vertical flow aggregates.

namespace infolat {

// Imaginary parts of current traces below this threshold are roundoff and
// get discarded; anything larger indicates a conjugation-symmetry bug and
// must not be silently dropped.
inline constexpr double current_imag_tol = 1e-10;

struct FMatrices {
    Eigen::MatrixXcd left;  // flow through the left boundary of A
    Eigen::MatrixXcd right; // flow through the right boundary of A
    Eigen::MatrixXcd env;   // flow between A and the reservoirs
};

// Boundary flow matrices of the contiguous segment A. The left/right members
// are anti-Hermitian, env is Hermitian, and together they complete the
// A-block of the full equation of motion:
//   dC_A/dt = i [H^T_A, C_A] + i F_left + i F_right + F_env.
inline FMatrices f_matrices(const Eigen::MatrixXcd& h, const ReservoirSpec& res,
                            const Eigen::MatrixXcd& c, const LatticeCoord& segment) {
    const Eigen::Index n = h.rows();
    if (c.rows() != n || c.cols() != n || res.inject.size() != n) {
        throw std::invalid_argument("f_matrices: dimension mismatch");
    }
    if (!segment.valid(static_cast<int>(n))) {
        throw std::out_of_range("f_matrices: segment outside the chain");
    }
    const Eigen::Index a0 = segment.j_left() - 1; // first 0-based index of A
    const Eigen::Index len = segment.n_sites();
    const Eigen::Index n_left = a0;
    const Eigen::Index n_right = n - (a0 + len);

    const Eigen::MatrixXcd ht = h.transpose();
    FMatrices f;

    if (n_left > 0) {
        const Eigen::MatrixXcd ht_al = ht.block(a0, 0, len, n_left);  // (A, complement-left)
        const Eigen::MatrixXcd ht_la = ht.block(0, a0, n_left, len);
        const Eigen::MatrixXcd c_la = c.block(0, a0, n_left, len);
        const Eigen::MatrixXcd c_al = c.block(a0, 0, len, n_left);
        f.left = ht_al * c_la - c_al * ht_la;
    } else {
        f.left = Eigen::MatrixXcd::Zero(len, len);
    }

    if (n_right > 0) {
        const Eigen::Index r0 = a0 + len;
        const Eigen::MatrixXcd ht_ar = ht.block(a0, r0, len, n_right); // (A, complement-right)
        const Eigen::MatrixXcd ht_ra = ht.block(r0, a0, n_right, len);
        const Eigen::MatrixXcd c_ra = c.block(r0, a0, n_right, len);
        const Eigen::MatrixXcd c_ar = c.block(a0, r0, len, n_right);
        f.right = ht_ar * c_ra - c_ar * ht_ra;
    } else {
        f.right = Eigen::MatrixXcd::Zero(len, len);
    }

    const Eigen::VectorXd inject_a = res.inject.segment(a0, len);
    const Eigen::VectorXd total_a = inject_a + res.remove.segment(a0, len);
    const Eigen::MatrixXcd c_a = c.block(a0, a0, len, len);
    f.env = Eigen::MatrixXcd(inject_a.cast<std::complex<double>>().asDiagonal());
    f.env -= 0.5 * (total_a.asDiagonal() * c_a + c_a * total_a.asDiagonal());
    return f;
}

struct SegmentCurrents {
    double left = 0.0;
    double right = 0.0;
    double env = 0.0;
    bool clipped = false; // an occupation eigenvalue needed the log clip
};

namespace detail {

inline double real_checked(std::complex<double> value, const char* what) {
    if (std::abs(value.imag()) > current_imag_tol) {
        throw std::runtime_error(std::string(what) + ": imaginary residue " +
                                 std::to_string(value.imag()) + " exceeds tolerance");
    }
    return value.real();
}

} // namespace detail

// Information currents out of segment A through its three interfaces,
// -i Tr[F_{L/R} log2(C_A (1-C_A)^{-1})] and -Tr[F_env log2(...)].
inline SegmentCurrents triangle_currents(const Eigen::MatrixXcd& h, const ReservoirSpec& res,
                                         const Eigen::MatrixXcd& c, const LatticeCoord& segment) {
    const FMatrices f = f_matrices(h, res, c, segment);
    const Eigen::Index a0 = segment.j_left() - 1;
    const Eigen::Index len = segment.n_sites();

    SegmentCurrents out;
    const Eigen::MatrixXcd g = log2_ratio_matrix(c.block(a0, a0, len, len), &out.clipped);
    const std::complex<double> i1(0.0, 1.0);
    out.left = detail::real_checked(-i1 * (f.left * g).trace(), "triangle_currents: left");
    out.right = detail::real_checked(-i1 * (f.right * g).trace(), "triangle_currents: right");
    out.env = detail::real_checked(-(f.env * g).trace(), "triangle_currents: env");
    return out;
}

struct TriangleCurrentSet {
    TriangularArray left;
    TriangularArray right;
    TriangularArray env;
    TriangularArray clipped; // 1.0 where the log clip was applied
    bool any_clipped = false;
};

// Triangle currents for every contiguous segment of the chain.
inline TriangleCurrentSet triangle_currents(const Eigen::MatrixXcd& h, const ReservoirSpec& res,
                                            const Eigen::MatrixXcd& c) {
    const int n = static_cast<int>(c.rows());
    TriangleCurrentSet set{TriangularArray(n), TriangularArray(n), TriangularArray(n),
                           TriangularArray(n), false};
    for (const LatticeCoord& coord : all_coords(n)) {
        const SegmentCurrents cur = triangle_currents(h, res, c, coord);
        set.left.at(coord) = cur.left;
        set.right.at(coord) = cur.right;
        set.env.at(coord) = cur.env;
        set.clipped.at(coord) = cur.clipped ? 1.0 : 0.0;
        set.any_clipped = set.any_clipped || cur.clipped;
    }
    return set;
}

struct CurrentLattice {
    TriangularArray left;  // tilde currents leaving (ell,n) toward (ell+1,n-1/2)
    TriangularArray right; // toward (ell+1,n+1/2)
    TriangularArray env;   // into the environment
};

// Effective cell currents: differences of triangle currents such that each
// current is attributed to exactly one lattice cell. Cells below the bottom
// layer read as zero, so layer 0 keeps its triangle values.
inline CurrentLattice effective_currents(const TriangleCurrentSet& tri) {
    const int n = tri.left.n_sites();
    CurrentLattice lat{TriangularArray(n), TriangularArray(n), TriangularArray(n)};
    for (const LatticeCoord& coord : all_coords(n)) {
        lat.left.at(coord) = tri.left.at(coord) - tri.left.at_or_zero(coord.left_sub());
        lat.right.at(coord) = tri.right.at(coord) - tri.right.at_or_zero(coord.right_sub());
        lat.env.at(coord) = tri.env.at(coord) - tri.env.at_or_zero(coord.left_sub()) -
                            tri.env.at_or_zero(coord.right_sub()) +
                            tri.env.at_or_zero(coord.center_sub());
    }
    return lat;
}

// Right-hand side of the local balance law,
//   di_(ell,n)/dt = -I~_L - I~_R + I~_(ell-1,n-1/2),R + I~_(ell-1,n+1/2),L - I~_E.
inline TriangularArray balance_rhs(const CurrentLattice& lat) {
    const int n = lat.left.n_sites();
    TriangularArray rhs(n);
    for (const LatticeCoord& coord : all_coords(n)) {
        rhs.at(coord) = -lat.left.at(coord) - lat.right.at(coord) - lat.env.at(coord) +
                        lat.right.at_or_zero(coord.left_sub()) +
                        lat.left.at_or_zero(coord.right_sub());
    }
    return rhs;
}

// Residual of the balance law with di/dt estimated by a central difference
// of the information lattice across one forward and one backward step.
inline TriangularArray site_balance_residual(const Eigen::MatrixXcd& h, const ReservoirSpec& res,
                                             const Eigen::MatrixXcd& c, const CurrentLattice& lat,
                                             double dt) {
    if (dt <= 0.0) {
        throw std::invalid_argument("site_balance_residual: dt must be positive");
    }
    const InfoLattice plus = build_info_lattice(detail::rk4_step(h, res, c, dt));
    const InfoLattice minus = build_info_lattice(detail::rk4_step(h, res, c, -dt));
    const TriangularArray rhs = balance_rhs(lat);

    const int n = static_cast<int>(c.rows());
    TriangularArray residual(n);
    for (const LatticeCoord& coord : all_coords(n)) {
        const double di_dt = (plus.site.at(coord) - minus.site.at(coord)) / (2.0 * dt);
        residual.at(coord) = di_dt - rhs.at(coord);
    }
    return residual;
}

struct HorizontalCurrents {
    double plus = 0.0;  // rightward flow through the cut just right of column n
    double minus = 0.0; // leftward flow through the cut just left of column n
};

namespace detail {

// Triangle-sum form of a horizontal current: even layers read at column n,
// odd layers at the neighbor column, both truncated at the same cutoff. The
// truncation matters: boundary cells beyond it carry currents that never
// cross the cut, and summing them naively breaks the identity with the
// tilde-sum form.
inline double horizontal_triangle_sum(const TriangleCurrentSet& tri, int n2_even, int n2_odd,
                                      int ell_max) {
    double sum = 0.0;
    for (int ell = 0; ell <= ell_max; ell += 2) {
        const LatticeCoord c{ell, n2_even};
        sum += tri.left.at(c) + tri.right.at(c);
    }
    for (int ell = 1; ell <= ell_max; ell += 2) {
        const LatticeCoord c{ell, n2_odd};
        sum -= tri.left.at(c) + tri.right.at(c);
    }
    return sum;
}

} // namespace detail

// Net horizontal information currents at column n (1-based): `plus` crosses
// the vertical cut between columns n and n+1/2, `minus` the cut between
// n-1/2 and n. Both the tilde-sum and the truncated triangle-sum forms are
// evaluated and must agree; disagreement means a broken current identity.
inline HorizontalCurrents horizontal_currents(const CurrentLattice& lat,
                                              const TriangleCurrentSet& tri, int n) {
    const int n_sites = lat.left.n_sites();
    if (n < 1 || n > n_sites) {
        throw std::out_of_range("horizontal_currents: column outside the chain");
    }

    HorizontalCurrents out;
    double plus_tilde = 0.0;
    double minus_tilde = 0.0;
    for (int ell = 0; ell < n_sites; ell += 2) {
        const LatticeCoord c{ell, 2 * n};
        if (!c.valid(n_sites)) {
            break;
        }
        plus_tilde += lat.right.at(c);
        minus_tilde += lat.left.at(c);
    }
    for (int ell = 1; ell < n_sites; ell += 2) {
        const LatticeCoord cp{ell, 2 * n + 1};
        if (cp.valid(n_sites)) {
            plus_tilde -= lat.left.at(cp);
        }
        const LatticeCoord cm{ell, 2 * n - 1};
        if (cm.valid(n_sites)) {
            minus_tilde -= lat.right.at(cm);
        }
    }

    const int ell_even_max = 2 * std::min(n - 1, n_sites - n);
    const int ell_plus_max = std::min(ell_even_max, std::min(2 * n - 1, 2 * (n_sites - n) - 1));
    const int ell_minus_max = std::min(ell_even_max, std::min(2 * n - 3, 2 * (n_sites - n) + 1));
    const double plus_triangle = detail::horizontal_triangle_sum(tri, 2 * n, 2 * n + 1, ell_plus_max);
    const double minus_triangle =
        detail::horizontal_triangle_sum(tri, 2 * n, 2 * n - 1, ell_minus_max);

    const double scale = std::max({1.0, std::abs(plus_tilde), std::abs(minus_tilde)});
    if (std::abs(plus_tilde - plus_triangle) > 1e-10 * scale ||
        std::abs(minus_tilde - minus_triangle) > 1e-10 * scale) {
        throw std::runtime_error("horizontal_currents: tilde-sum and triangle-sum forms disagree");
    }
    out.plus = plus_tilde;
    out.minus = minus_tilde;
    return out;
}

// Horizontal flow restricted to cells strictly inside the lattice: layers
// 0 < ell < N-1 with the two boundary diagonals excluded. This isolates
// transport through the shielded interior. The full sums above also count
// the bottom layer and the dissipative climb along the boundary diagonals,
// which dominate whenever end reservoirs are attached; under a symmetric
// drive the interior component vanishes identically while the full sums
// keep a small boundary residue.
inline HorizontalCurrents horizontal_currents_interior(const CurrentLattice& lat, int n) {
    const int n_sites = lat.left.n_sites();
    if (n < 1 || n > n_sites) {
        throw std::out_of_range("horizontal_currents_interior: column outside the chain");
    }
    const auto inside = [n_sites](const LatticeCoord& c) {
        return c.ell > 0 && c.ell < n_sites - 1 && c.n2 > c.ell + 2 && c.n2 < 2 * n_sites - c.ell;
    };

    HorizontalCurrents out;
    for (int ell = 2; ell < n_sites - 1; ell += 2) {
        const LatticeCoord c{ell, 2 * n};
        if (!c.valid(n_sites)) {
            break;
        }
        if (!inside(c)) {
            continue;
        }
        out.plus += lat.right.at(c);
        out.minus += lat.left.at(c);
    }
    for (int ell = 1; ell < n_sites - 1; ell += 2) {
        const LatticeCoord cp{ell, 2 * n + 1};
        if (cp.valid(n_sites) && inside(cp)) {
            out.plus -= lat.left.at(cp);
        }
        const LatticeCoord cm{ell, 2 * n - 1};
        if (cm.valid(n_sites) && inside(cm)) {
            out.minus -= lat.right.at(cm);
        }
    }
    return out;
}

// Total information current flowing from layer ell into layer ell+1.
inline double vertical_currents(const CurrentLattice& lat, int ell) {
    const int n_sites = lat.left.n_sites();
    if (ell < 0 || ell >= n_sites) {
        throw std::out_of_range("vertical_currents: layer outside the lattice");
    }
    double sum = 0.0;
    for (int k = 0; k < n_sites - ell; ++k) {
        const LatticeCoord c{ell, ell + 2 + 2 * k};
        sum += lat.left.at(c) + lat.right.at(c);
    }
    return sum;
}

// Particle current through bond j -> j+1 (1-based left site).
inline double particle_current(const ChainSpec& chain, const Eigen::MatrixXcd& c, int j) {
    const double j_hop = chain.hopping_at(j);
    const std::complex<double> i1(0.0, 1.0);
    return (i1 * j_hop * (c(j - 1, j) - std::conj(c(j - 1, j)))).real();
}

// Particle current from site j into the environment.
inline double particle_current_env(const Eigen::MatrixXcd& c, const ReservoirSpec& res, int j) {
    if (j < 1 || j > c.rows()) {
        throw std::out_of_range("particle_current_env: site index out of range");
    }
    const double occ = c(j - 1, j - 1).real();
    return res.remove(j - 1) * occ - res.inject(j - 1) * (1.0 - occ);
}

struct BottomLayerResiduals {
    Eigen::VectorXd left;  // per site, 1-based site j at index j-1
    Eigen::VectorXd right;
    Eigen::VectorXd env;

    double max_abs() const {
        double m = left.cwiseAbs().maxCoeff();
        m = std::max(m, right.cwiseAbs().maxCoeff());
        return std::max(m, env.cwiseAbs().maxCoeff());
    }
};

// Verifies that every bottom-layer information current is the corresponding
// particle current weighted by log2(n_j / (1-n_j)), returning the residuals.
inline BottomLayerResiduals bottom_layer_relation_check(const ChainSpec& chain,
                                                        const ReservoirSpec& res,
                                                        const Eigen::MatrixXcd& c) {
    const int n = chain.n_sites;
    const Eigen::MatrixXcd h = build_hamiltonian(chain);
    BottomLayerResiduals out{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n),
                             Eigen::VectorXd::Zero(n)};
    for (int j = 1; j <= n; ++j) {
        const SegmentCurrents cur = triangle_currents(h, res, c, LatticeCoord{0, 2 * j});
        // Same clip path as the current computation, so the residual is an
        // exact algebraic identity and not tolerance-limited.
        const double weight = log2_ratio_matrix(c.block(j - 1, j - 1, 1, 1))(0, 0).real();
        const double right_ref = (j < n) ? particle_current(chain, c, j) * weight : 0.0;
        const double left_ref = (j > 1) ? -particle_current(chain, c, j - 1) * weight : 0.0;
        const double env_ref = particle_current_env(c, res, j) * weight;
        out.right(j - 1) = cur.right - right_ref;
        out.left(j - 1) = cur.left - left_ref;
        out.env(j - 1) = cur.env - env_ref;
    }
    return out;
}

// Rate asymmetry at which the removal-side end occupation crosses one half
// and environment-injected information starts to penetrate the lattice.
inline double shielding_threshold(double g, double j_hop) { return delta_star(g, j_hop); }

} // namespace infolat

#endif
