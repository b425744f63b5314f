#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "infolat/information_currents.hpp"
#include "support/random_states.hpp"

using namespace infolat;
using infolat_tests::random_physical_correlation;
using Catch::Approx;

namespace {

struct Setup {
    ChainSpec chain;
    ReservoirSpec res;
    Eigen::MatrixXcd h;
};

Setup clean_large_bias(int n, double g, double delta, double eps_mid = 0.0) {
    Setup s{ChainSpec::uniform(n, 1.0), rates_large_bias(n, g, delta), {}};
    if (eps_mid != 0.0) {
        s.chain.set_onsite((n + 1) / 2, eps_mid);
    }
    s.h = build_hamiltonian(s.chain);
    return s;
}

} // namespace

TEST_CASE("flow matrices have the required symmetry and complete the drift") {
    const int n = 6;
    const Setup s = clean_large_bias(n, 1.3, 0.4);
    const Eigen::MatrixXcd c = random_physical_correlation(n, 42);

    for (const LatticeCoord& coord : all_coords(n)) {
        const FMatrices f = f_matrices(s.h, s.res, c, coord);
        CHECK((f.left + f.left.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((f.right + f.right.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((f.env - f.env.adjoint()).cwiseAbs().maxCoeff() < 1e-13);

        // i[H^T_A, C_A] + i F_L + i F_R + F_E must equal the A-block of the
        // full equation of motion.
        const int a0 = coord.j_left() - 1;
        const int len = coord.n_sites();
        const Eigen::MatrixXcd ht_a = s.h.transpose().block(a0, a0, len, len);
        const Eigen::MatrixXcd c_a = c.block(a0, a0, len, len);
        const std::complex<double> i1(0.0, 1.0);
        const Eigen::MatrixXcd lhs =
            i1 * (ht_a * c_a - c_a * ht_a) + i1 * f.left + i1 * f.right + f.env;
        const Eigen::MatrixXcd rhs = drift(s.h, s.res, c).block(a0, a0, len, len);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("flow matrices vanish for decoupled or complete segments") {
    const int n = 5;
    Setup s = clean_large_bias(n, 1.0, 0.3);
    const Eigen::MatrixXcd c = random_physical_correlation(n, 7);

    const FMatrices full = f_matrices(s.h, s.res, c, LatticeCoord::from_sites(1, n));
    CHECK(full.left.cwiseAbs().maxCoeff() == 0.0);
    CHECK(full.right.cwiseAbs().maxCoeff() == 0.0);

    // Cutting the bonds around segment {3, 4} decouples it.
    s.chain.set_hopping(2, 0.0);
    s.chain.set_hopping(4, 0.0);
    s.h = build_hamiltonian(s.chain);
    const FMatrices cut = f_matrices(s.h, s.res, c, LatticeCoord::from_sites(3, 4));
    CHECK(cut.left.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(cut.right.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("two-site chain reproduces the closed-form right current") {
    const int n = 2;
    const Setup s = clean_large_bias(n, 0.9, 0.2);
    const Eigen::MatrixXcd c = random_physical_correlation(n, 12);

    const SegmentCurrents cur = triangle_currents(s.h, s.res, c, LatticeCoord{0, 2});
    const std::complex<double> i1(0.0, 1.0);
    const double occ = c(0, 0).real();
    const std::complex<double> expected =
        -i1 * 1.0 * (std::conj(c(0, 1)) - c(0, 1)) * std::log2(occ / (1.0 - occ));
    CHECK(cur.right == Approx(expected.real()).margin(1e-12));
    CHECK(cur.left == 0.0);
}

TEST_CASE("half-filled single site carries no information current") {
    const int n = 4;
    const Setup s = clean_large_bias(n, 1.0, 0.6);
    Eigen::MatrixXcd c = random_physical_correlation(n, 3);
    c(1, 1) = 0.5;

    const SegmentCurrents cur = triangle_currents(s.h, s.res, c, LatticeCoord{0, 4});
    CHECK(std::abs(cur.left) < 1e-12);
    CHECK(std::abs(cur.right) < 1e-12);
    CHECK(std::abs(cur.env) < 1e-12);
}

TEST_CASE("closed full chain carries no information current") {
    const int n = 4;
    const ChainSpec chain = ChainSpec::uniform(n, 1.0);
    const ReservoirSpec res = ReservoirSpec::empty(n);
    const Eigen::MatrixXcd c = random_physical_correlation(n, 9);
    const SegmentCurrents cur =
        triangle_currents(build_hamiltonian(chain), res, c, LatticeCoord::from_sites(1, n));
    CHECK(cur.left == 0.0);
    CHECK(cur.right == 0.0);
    CHECK(std::abs(cur.env) < 1e-14);
}

TEST_CASE("bottom-layer currents reduce to weighted particle currents") {
    const int n = 5;
    const Setup s = clean_large_bias(n, 1.0, 0.75);

    const Eigen::MatrixXcd random_c = random_physical_correlation(n, 21);
    CHECK(bottom_layer_relation_check(s.chain, s.res, random_c).max_abs() < 1e-10);

    const Eigen::MatrixXcd ness = solve_ness(s.h, s.res);
    CHECK(bottom_layer_relation_check(s.chain, s.res, ness).max_abs() < 1e-10);

    // At half filling both sides vanish.
    Eigen::MatrixXcd half = random_c;
    for (int j = 0; j < n; ++j) {
        half(j, j) = 0.5;
    }
    const SegmentCurrents mid = triangle_currents(s.h, s.res, half, LatticeCoord{0, 6});
    CHECK(std::abs(mid.right) < 1e-12);
    CHECK(bottom_layer_relation_check(s.chain, s.res, half).max_abs() < 1e-10);
}

TEST_CASE("particle currents in the three-site steady state") {
    const Setup s = clean_large_bias(3, 1.0, 0.0);
    const Eigen::MatrixXcd c = ness_large_bias_n3(1.0, 1.0, 0.0, 0.0);

    CHECK(particle_current(s.chain, c, 1) == Approx(0.4).margin(1e-12));
    CHECK(particle_current(s.chain, c, 2) == Approx(0.4).margin(1e-12));
    // Conservation through the contacts: env -> 1 inflow equals bond flow
    // equals N -> env outflow.
    CHECK(-particle_current_env(c, s.res, 1) == Approx(0.4).margin(1e-12));
    CHECK(particle_current_env(c, s.res, 3) == Approx(0.4).margin(1e-12));

    // A real correlation matrix carries no bond current.
    Eigen::MatrixXcd real_c = Eigen::MatrixXcd::Zero(3, 3);
    real_c << 0.5, 0.2, 0.0, 0.2, 0.5, 0.1, 0.0, 0.1, 0.5;
    CHECK(particle_current(s.chain, real_c, 1) == 0.0);
    CHECK_THROWS_AS(particle_current(s.chain, real_c, 3), std::out_of_range);
}

TEST_CASE("effective currents keep the bottom layer and localize dissipation") {
    const int n = 6;
    const Setup s = clean_large_bias(n, 1.0, 0.5);
    const Eigen::MatrixXcd c = solve_ness(s.h, s.res);

    const TriangleCurrentSet tri = triangle_currents(s.h, s.res, c);
    const CurrentLattice lat = effective_currents(tri);

    for (int j = 1; j <= n; ++j) {
        const LatticeCoord bottom{0, 2 * j};
        CHECK(lat.left.at(bottom) == tri.left.at(bottom));
        CHECK(lat.right.at(bottom) == tri.right.at(bottom));
        CHECK(lat.env.at(bottom) == tri.env.at(bottom));
    }

    // Reservoirs act on the end sites only, so effective dissipative currents
    // live on the two outer diagonals of the lattice.
    for (const LatticeCoord& coord : all_coords(n)) {
        if (coord.j_left() > 1 && coord.j_right() < n) {
            CHECK(std::abs(lat.env.at(coord)) < 1e-12);
        }
    }
}

TEST_CASE("steady-state site balance closes on every cell") {
    for (int n : {5, 7}) {
        const Setup s = clean_large_bias(n, 1.0, 0.75, n == 7 ? 3.0 : 0.0);
        const Eigen::MatrixXcd c = solve_ness(s.h, s.res);
        const TriangularArray rhs = balance_rhs(effective_currents(triangle_currents(s.h, s.res, c)));
        double worst = 0.0;
        rhs.for_each([&](const LatticeCoord&, double v) { worst = std::max(worst, std::abs(v)); });
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("finite-difference balance residual scales as dt squared") {
    const int n = 5;
    const Eigen::MatrixXcd c = random_physical_correlation(n, 31);

    const auto residual_norm = [](const Setup& s, const Eigen::MatrixXcd& state, double dt) {
        const CurrentLattice lat = effective_currents(triangle_currents(s.h, s.res, state));
        const TriangularArray residual = site_balance_residual(s.h, s.res, state, lat, dt);
        double total = 0.0;
        residual.for_each([&](const LatticeCoord&, double v) { total += std::abs(v); });
        return total;
    };

    // Open chain.
    const Setup open = clean_large_bias(n, 1.0, 0.4);
    const double open_1 = residual_norm(open, c, 0.02);
    const double open_2 = residual_norm(open, c, 0.01);
    CHECK(open_1 / open_2 == Approx(4.0).margin(1.0));

    // Closed chain.
    Setup closed{ChainSpec::uniform(n, 1.0, 0.2), ReservoirSpec::empty(n), {}};
    closed.chain.set_onsite(2, -0.5);
    closed.h = build_hamiltonian(closed.chain);
    const double closed_1 = residual_norm(closed, c, 0.02);
    const double closed_2 = residual_norm(closed, c, 0.01);
    CHECK(closed_1 / closed_2 == Approx(4.0).margin(1.0));
}

TEST_CASE("tilde-sum and triangle-sum horizontal currents agree") {
    // The agreement is asserted inside horizontal_currents; exercise it for
    // arbitrary states, both parities of N, and every column.
    for (int n_sites : {6, 7}) {
        const Setup s = clean_large_bias(n_sites, 1.1, 0.6, 2.0);
        for (unsigned seed : {1u, 2u, 3u}) {
            const Eigen::MatrixXcd c = random_physical_correlation(n_sites, seed);
            const TriangleCurrentSet tri = triangle_currents(s.h, s.res, c);
            const CurrentLattice lat = effective_currents(tri);
            for (int n = 1; n <= n_sites; ++n) {
                CHECK_NOTHROW(horizontal_currents(lat, tri, n));
            }
        }
    }
}

TEST_CASE("clean-chain horizontal currents vanish or equalize") {
    const int n_sites = 7;

    // Symmetric drive: the shielded interior carries no horizontal flow at
    // all. The full zigzag sums keep only dissipative bookkeeping along the
    // boundary diagonals, an order of magnitude below the injected current.
    {
        const Setup s = clean_large_bias(n_sites, 1.0, 0.0);
        const Eigen::MatrixXcd c = solve_ness(s.h, s.res);
        const TriangleCurrentSet tri = triangle_currents(s.h, s.res, c);
        const CurrentLattice lat = effective_currents(tri);

        // Everything injected at site 1 crosses the first cut rightward.
        const double injected = horizontal_currents(lat, tri, 1).plus;
        CHECK(injected == Approx(-lat.env.at(LatticeCoord{0, 2})).margin(1e-10));
        CHECK(injected > 0.2);

        for (int n = 2; n < n_sites; ++n) {
            const HorizontalCurrents inner = horizontal_currents_interior(lat, n);
            CHECK(std::abs(inner.plus) < 1e-12);
            CHECK(std::abs(inner.minus) < 1e-12);
            CHECK(std::abs(horizontal_currents(lat, tri, n).plus) < 0.1 * injected);
        }
    }

    // Asymmetric drive: interior currents are positive and agree to a few
    // percent. They cannot agree better than that: adjacent cuts differ by
    // exactly the dissipative currents released between them, which are
    // finite once the asymmetry exceeds the shielding threshold.
    {
        const Setup s = clean_large_bias(n_sites, 1.0, 0.75);
        const Eigen::MatrixXcd c = solve_ness(s.h, s.res);
        const TriangleCurrentSet tri = triangle_currents(s.h, s.res, c);
        const CurrentLattice lat = effective_currents(tri);

        double lo = 1e300;
        double hi = -1e300;
        for (int n = 2; n < n_sites; ++n) {
            const double flow = horizontal_currents(lat, tri, n).plus;
            CHECK(flow > 0.0);
            lo = std::min(lo, flow);
            hi = std::max(hi, flow);
        }
        CHECK((hi - lo) / hi < 0.05);

        for (int n = 2; n < n_sites - 1; ++n) {
            const double drop = horizontal_currents(lat, tri, n).plus -
                                horizontal_currents(lat, tri, n + 1).plus;
            double released = 0.0;
            lat.env.for_each([&](const LatticeCoord& coord, double v) {
                if (coord.n2 == 2 * n + 1 || coord.n2 == 2 * n + 2) {
                    released += v;
                }
            });
            CHECK(drop == Approx(released).margin(1e-10));
        }

        // Past the shielding threshold the interior itself conducts, though
        // most of the flow still rides the bottom layer and the boundary
        // diagonals. The last cut has no strictly interior cells.
        for (int n = 2; n < n_sites - 1; ++n) {
            const double inner = horizontal_currents_interior(lat, n).plus;
            CHECK(inner > 0.0);
            CHECK(inner < 0.2 * hi);
        }
        CHECK(horizontal_currents_interior(lat, n_sites - 1).plus == 0.0);
    }
}

namespace {

// Dissipative exchange happening strictly above layer ell. In a steady state
// the upward flow out of layer ell must carry exactly this amount.
double env_above_layer(const CurrentLattice& lat, int ell) {
    double sum = 0.0;
    lat.env.for_each([&](const LatticeCoord& coord, double v) {
        if (coord.ell > ell) {
            sum += v;
        }
    });
    return sum;
}

} // namespace

TEST_CASE("vertical currents carry exactly the dissipation above each layer") {
    const int n_sites = 7;

    // Symmetric drive: the interior is shielded, so only a small fraction of
    // the injected information climbs past layer 1 along the outer diagonals.
    {
        const Setup s = clean_large_bias(n_sites, 1.0, 0.0);
        const Eigen::MatrixXcd c = solve_ness(s.h, s.res);
        const CurrentLattice lat = effective_currents(triangle_currents(s.h, s.res, c));
        const double base = vertical_currents(lat, 0);
        CHECK(base > 0.4);
        for (int ell = 2; ell < n_sites; ++ell) {
            CHECK(vertical_currents(lat, ell) < 0.01 * base);
        }
    }

    // Strong asymmetry: dissipation penetrates the lattice, the currents
    // decay monotonically with height, and every layer satisfies the exact
    // steady-state bookkeeping.
    {
        const Setup s = clean_large_bias(n_sites, 1.0, 0.75);
        const Eigen::MatrixXcd c = solve_ness(s.h, s.res);
        const CurrentLattice lat = effective_currents(triangle_currents(s.h, s.res, c));
        for (int ell = 0; ell < n_sites; ++ell) {
            CHECK(vertical_currents(lat, ell) == Approx(env_above_layer(lat, ell)).margin(1e-10));
        }
        for (int ell = 0; ell < n_sites - 1; ++ell) {
            CHECK(vertical_currents(lat, ell + 1) < vertical_currents(lat, ell));
        }
    }

    CurrentLattice zero{TriangularArray(4), TriangularArray(4), TriangularArray(4)};
    CHECK(vertical_currents(zero, 1) == 0.0);
    CHECK_THROWS_AS(vertical_currents(zero, 4), std::out_of_range);
}

TEST_CASE("central defect builds an information pillar") {
    const int n_sites = 7;
    Setup s = clean_large_bias(n_sites, 1.0, 0.0);
    s.chain.set_onsite(4, 3.0);
    s.h = build_hamiltonian(s.chain);
    const Eigen::MatrixXcd c = solve_ness(s.h, s.res);
    const TriangleCurrentSet tri = triangle_currents(s.h, s.res, c);
    const CurrentLattice lat = effective_currents(tri);

    // Vertical currents through the pillar: positive, near-equal, and closing
    // the steady-state balance at every height.
    double lo = 1e300;
    double hi = -1e300;
    for (int ell = 1; ell <= n_sites - 3; ++ell) {
        const double flow = vertical_currents(lat, ell);
        CHECK(flow > 0.0);
        lo = std::min(lo, flow);
        hi = std::max(hi, flow);
    }
    CHECK((hi - lo) / hi < 0.01);
    for (int ell = 0; ell < n_sites; ++ell) {
        CHECK(vertical_currents(lat, ell) == Approx(env_above_layer(lat, ell)).margin(1e-10));
    }

    // Horizontal currents converge on the defect from both sides; by mirror
    // symmetry the interior flow cancels exactly at the defect column.
    for (int n = 1; n < 4; ++n) {
        CHECK(horizontal_currents(lat, tri, n).plus > 0.0);
    }
    for (int n = 4; n < n_sites; ++n) {
        CHECK(horizontal_currents(lat, tri, n).plus < 0.0);
    }
    CHECK(std::abs(horizontal_currents_interior(lat, 4).plus) < 1e-12);

    // The configuration is mirror symmetric, so the two cut families map
    // onto each other.
    for (int n = 1; n <= n_sites; ++n) {
        const HorizontalCurrents here = horizontal_currents(lat, tri, n);
        const HorizontalCurrents there = horizontal_currents(lat, tri, n_sites + 1 - n);
        CHECK(here.plus == Approx(there.minus).margin(1e-10));
    }
}

TEST_CASE("impurity sign leaves lattice and currents unchanged") {
    const int n_sites = 7;
    const int j0 = 4;
    for (double delta : {0.0, 0.75}) {
        Setup a = clean_large_bias(n_sites, 1.0, delta);
        a.chain.set_onsite(j0, 3.0);
        a.h = build_hamiltonian(a.chain);
        Setup b = clean_large_bias(n_sites, 1.0, delta);
        b.chain.set_onsite(j0, -3.0);
        b.h = build_hamiltonian(b.chain);

        const Eigen::MatrixXcd ca = solve_ness(a.h, a.res);
        const Eigen::MatrixXcd cb = solve_ness(b.h, b.res);
        const InfoLattice ia = build_info_lattice(ca);
        const InfoLattice ib = build_info_lattice(cb);
        const CurrentLattice la = effective_currents(triangle_currents(a.h, a.res, ca));
        const CurrentLattice lb = effective_currents(triangle_currents(b.h, b.res, cb));

        for (const LatticeCoord& coord : all_coords(n_sites)) {
            CHECK(ia.site.at(coord) == Approx(ib.site.at(coord)).margin(1e-9));
            CHECK(la.left.at(coord) == Approx(lb.left.at(coord)).margin(1e-9));
            CHECK(la.right.at(coord) == Approx(lb.right.at(coord)).margin(1e-9));
            CHECK(la.env.at(coord) == Approx(lb.env.at(coord)).margin(1e-9));
        }
    }
}

TEST_CASE("rate asymmetry reversal mirrors the current lattice") {
    const int n_sites = 6;
    const double delta = 0.6;
    const Setup fwd = clean_large_bias(n_sites, 1.0, delta);
    const Setup rev = clean_large_bias(n_sites, 1.0, -delta);
    const Eigen::MatrixXcd cf = solve_ness(fwd.h, fwd.res);
    const Eigen::MatrixXcd cr = solve_ness(rev.h, rev.res);

    const InfoLattice info_f = build_info_lattice(cf);
    const InfoLattice info_r = build_info_lattice(cr);
    const CurrentLattice lat_f = effective_currents(triangle_currents(fwd.h, fwd.res, cf));
    const CurrentLattice lat_r = effective_currents(triangle_currents(rev.h, rev.res, cr));

    for (const LatticeCoord& coord : all_coords(n_sites)) {
        const LatticeCoord mirrored{coord.ell, 2 * (n_sites + 1) - coord.n2};
        CHECK(info_f.site.at(coord) == Approx(info_r.site.at(mirrored)).margin(1e-10));
        CHECK(lat_f.left.at(coord) == Approx(lat_r.right.at(mirrored)).margin(1e-10));
        CHECK(lat_f.right.at(coord) == Approx(lat_r.left.at(mirrored)).margin(1e-10));
        CHECK(lat_f.env.at(coord) == Approx(lat_r.env.at(mirrored)).margin(1e-10));
    }
}

TEST_CASE("shielded chain confines environment currents to the ends") {
    const int n_sites = 7;
    const Setup s = clean_large_bias(n_sites, 1.0, 0.0);
    const Eigen::MatrixXcd c = solve_ness(s.h, s.res);
    const TriangleCurrentSet tri = triangle_currents(s.h, s.res, c);
    const CurrentLattice lat = effective_currents(tri);

    // Both ends inject the same dissipative current.
    CHECK(lat.env.at(LatticeCoord{0, 2}) ==
          Approx(lat.env.at(LatticeCoord{0, 2 * n_sites})).margin(1e-10));
    CHECK(lat.env.at(LatticeCoord{0, 2}) < 0.0);

    // Cell balance at the left end: injected information leaves rightward.
    CHECK(lat.right.at(LatticeCoord{0, 2}) == Approx(-lat.env.at(LatticeCoord{0, 2})).margin(1e-10));

    // A representative bulk sample stays far below the injected magnitude.
    CHECK(std::abs(lat.right.at(LatticeCoord{0, 8})) < 1e-4);
    CHECK(std::abs(lat.left.at(LatticeCoord{2, 8})) < 1e-4);
    CHECK(std::abs(lat.right.at(LatticeCoord{3, 9})) < 1e-4);
}

TEST_CASE("end dissipative currents follow the small-asymmetry expansion") {
    const EndCurrentConstants k = end_current_constants_n3(1.0, 1.0, 0.0);
    const double base = -k.a1 * std::log2(1.0 + k.a2);
    CHECK(base == Approx(-0.4 * std::log2(1.5)).margin(1e-15));

    const auto end_envs = [&](double delta) {
        const Setup s = clean_large_bias(3, 1.0, delta);
        const Eigen::MatrixXcd c = ness_large_bias_n3(1.0, 1.0, 0.0, delta);
        const TriangleCurrentSet tri = triangle_currents(s.h, s.res, c);
        return std::pair<double, double>{tri.env.at(LatticeCoord{0, 2}),
                                         tri.env.at(LatticeCoord{0, 6})};
    };

    const auto [left0, right0] = end_envs(0.0);
    CHECK(left0 == Approx(base).margin(1e-12));
    CHECK(right0 == Approx(base).margin(1e-12));

    // Central-difference slope in delta picks out the linear coefficients
    // -a3 at site 1 and +a3 at site N.
    const double d = 1e-4;
    const auto [left_p, right_p] = end_envs(d);
    const auto [left_m, right_m] = end_envs(-d);
    CHECK((left_p - left_m) / (2.0 * d) == Approx(-k.a3).margin(1e-5));
    CHECK((right_p - right_m) / (2.0 * d) == Approx(k.a3).margin(1e-5));
}

TEST_CASE("log clip fires on pure occupations and is reported") {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 2);
    c(0, 0) = 0.0;
    c(1, 1) = 0.5;
    const Setup s = clean_large_bias(2, 1.0, 0.0);

    const TriangleCurrentSet set = triangle_currents(s.h, s.res, c);
    CHECK(set.any_clipped);
    CHECK(set.clipped.at(LatticeCoord{0, 2}) == 1.0);
    CHECK(std::isfinite(set.left.at(LatticeCoord{1, 3})));
}

TEST_CASE("shielding threshold matches the closed form") {
    CHECK(shielding_threshold(1.0, 1.0) == Approx(std::sqrt(5.0) - 2.0).margin(1e-15));
    // Strong coupling pushes the threshold toward 1, weak coupling toward
    // g^2/(4 J^2).
    CHECK(shielding_threshold(50.0, 1.0) > 0.99);
    CHECK(shielding_threshold(0.01, 1.0) == Approx(0.25e-4).epsilon(1e-4));
}
