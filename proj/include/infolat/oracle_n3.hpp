#ifndef INFOLAT_ORACLE_N3_HPP
#define INFOLAT_ORACLE_N3_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

// Closed-form steady-state correlation matrices for the three-site chain with
// injection at site 1 and removal at site 3. These are evaluated directly from
// the printed algebraic solution, never through the generic Lyapunov solver,
// so the two paths stay independent for testing purposes.

namespace infolat {

namespace detail {
inline void require_large_bias_rates(double g, double delta) {
    if (g <= 0.0) {
        throw std::domain_error("oracle_n3: g must be positive");
    }
    if (std::abs(delta) >= 1.0) {
        throw std::domain_error("oracle_n3: |delta| must be < 1");
    }
}
} // namespace detail

// Large-bias steady state: Gamma_1 = g(1+delta), gamma_3 = g(1-delta),
// on-site energies (0, eps2, 0), uniform hopping J.
inline Eigen::MatrixXcd ness_large_bias_n3(double g, double j_hop, double eps2, double delta) {
    detail::require_large_bias_rates(g, delta);
    const std::complex<double> i1(0.0, 1.0);
    const double gam_in = g * (1.0 + delta);  // Gamma_1
    const double gam_out = g * (1.0 - delta); // gamma_3
    const double j2 = j_hop * j_hop;
    const double p = gam_in * gam_out;
    const double core = 4.0 * j2 + p;
    const double denom = (gam_in + gam_out) * (core * core + 4.0 * p * eps2 * eps2);

    Eigen::MatrixXcd c(3, 3);
    const double c11 = 1.0 - 4.0 * j2 * gam_out * core / denom;
    const std::complex<double> c12 =
        -2.0 * i1 * j_hop * p * (4.0 * j2 + gam_out * (gam_in - 2.0 * i1 * eps2)) / denom;
    const std::complex<double> c13 = 8.0 * i1 * j2 * p * eps2 / denom;
    const double c22 =
        gam_in * (core * (4.0 * j2 + gam_out * gam_out) + 4.0 * p * eps2 * eps2) / denom;
    const std::complex<double> c23 =
        -2.0 * i1 * j_hop * p * (4.0 * j2 + gam_in * (gam_out + 2.0 * i1 * eps2)) / denom;
    const double c33 = (gam_in / gam_out) * (1.0 - c11);

    c(0, 0) = c11;
    c(1, 1) = c22;
    c(2, 2) = c33;
    c(0, 1) = c12;
    c(1, 0) = std::conj(c12);
    c(0, 2) = c13;
    c(2, 0) = std::conj(c13);
    c(1, 2) = c23;
    c(2, 1) = std::conj(c23);
    return c;
}

// Steady-state particle current, computed through both printed forms
// (injection balance at site 1 and bond coherence) and cross-asserted.
inline double particle_current_n3(double g, double j_hop, double eps2, double delta) {
    const Eigen::MatrixXcd c = ness_large_bias_n3(g, j_hop, eps2, delta);
    const double gam_in = g * (1.0 + delta);
    const double from_contact = gam_in * (1.0 - c(0, 0).real());
    const double from_bond = -2.0 * j_hop * c(0, 1).imag();
    if (std::abs(from_contact - from_bond) > 1e-12 * std::max(1.0, std::abs(from_contact))) {
        throw std::runtime_error("particle_current_n3: contact and bond forms disagree");
    }
    return from_contact;
}

// Linear-response steady state at delta = 0 with drive amplitude phi.
inline Eigen::MatrixXcd ness_linear_response_n3(double g, double j_hop, double eps2, double phi) {
    if (g <= 0.0) {
        throw std::domain_error("oracle_n3: g must be positive");
    }
    const std::complex<double> i1(0.0, 1.0);
    const double j2 = j_hop * j_hop;
    const std::complex<double> d = g * g + 4.0 * j2 + 2.0 * i1 * g * eps2;
    const double d_abs2 = std::norm(d);

    Eigen::MatrixXcd c(3, 3);
    const double c11 = 0.5 + (1.0 - 4.0 * j2 * (g * g + 4.0 * j2) / d_abs2) * 0.5 * phi;
    const std::complex<double> c12 = -i1 * g * j_hop * phi / d;
    const std::complex<double> c23 = -i1 * g * j_hop * phi / std::conj(d);
    const std::complex<double> c13 = 4.0 * i1 * g * j2 * eps2 * phi / d_abs2;

    c(0, 0) = c11;
    c(1, 1) = 0.5;
    c(2, 2) = 1.0 - c11;
    c(0, 1) = c12;
    c(1, 0) = std::conj(c12);
    c(0, 2) = c13;
    c(2, 0) = std::conj(c13);
    c(1, 2) = c23;
    c(2, 1) = std::conj(c23);
    return c;
}

// First order in delta around the symmetric large-bias solution. Valid for
// small |delta|; used to pin the printed linear coefficients in tests.
inline Eigen::MatrixXcd ness_large_bias_n3_first_order(double g, double j_hop, double eps2,
                                                       double delta) {
    const std::complex<double> i1(0.0, 1.0);
    const Eigen::MatrixXcd c0 = ness_large_bias_n3(g, j_hop, eps2, 0.0);
    const double j2 = j_hop * j_hop;
    const double d_abs2 = std::norm(std::complex<double>(g * g + 4.0 * j2, 2.0 * g * eps2));

    Eigen::MatrixXcd c(3, 3);
    const double c33_0 = c0(2, 2).real();
    c(0, 0) = 1.0 - c33_0 * (1.0 - delta);
    c(2, 2) = c33_0 * (1.0 + delta);
    c(1, 1) = 0.5 + delta * (16.0 * j2 * j2 - std::pow(g, 4) + 4.0 * g * g * eps2 * eps2) /
                        (2.0 * d_abs2);
    const std::complex<double> slope = 2.0 * j_hop * g * g * eps2 / d_abs2;
    c(0, 1) = c0(0, 1) + slope * delta;
    c(1, 2) = -std::conj(c0(0, 1)) + slope * delta;
    c(0, 2) = c0(0, 2);
    c(1, 0) = std::conj(c(0, 1));
    c(2, 1) = std::conj(c(1, 2));
    c(2, 0) = std::conj(c(0, 2));
    return c;
}

// Constants of the small-delta expansion of the two dissipative end currents
// on the bottom lattice layer:
//   current(site 1) = -a1*log2(1+a2) - a3*delta,
//   current(site 3) = -a1*log2(1+a2) + a3*delta.
struct EndCurrentConstants {
    double a1;
    double a2;
    double a3;
};

inline EndCurrentConstants end_current_constants_n3(double g, double j_hop, double eps2) {
    const double j2 = j_hop * j_hop;
    const double s = g * g + 4.0 * j2;
    const double d_abs2 = s * s + 4.0 * g * g * eps2 * eps2;
    EndCurrentConstants k;
    k.a1 = 2.0 * g * j2 * s / d_abs2;
    k.a2 = g * g * (s + 4.0 * eps2 * eps2) / (2.0 * j2 * s);
    k.a3 = 2.0 * g * j2 * s / (std::numbers::ln2 * (d_abs2 - 2.0 * j2 * s));
    return k;
}

// Asymmetry threshold where the end occupation crosses 1/2 and the
// environment-injected information currents start to penetrate the lattice.
inline double delta_star(double g, double j_hop) {
    if (g <= 0.0 || j_hop <= 0.0) {
        throw std::domain_error("delta_star: g and J must be positive");
    }
    const double j2 = j_hop * j_hop;
    return (std::sqrt(std::pow(g, 4) + 4.0 * j2 * j2) - 2.0 * j2) / (g * g);
}

// Clean-chain extension of the three-site solution: for eps2 = 0 the same
// entries give the steady state of the uniform N-site chain (end diagonals
// from sites 1 and 3, all bulk diagonals from site 2, uniform bond coherence,
// zero beyond nearest neighbors).
inline Eigen::MatrixXcd ness_large_bias_clean(int n_sites, double g, double j_hop, double delta) {
    if (n_sites < 3) {
        throw std::invalid_argument("ness_large_bias_clean: n_sites must be >= 3");
    }
    const Eigen::MatrixXcd c3 = ness_large_bias_n3(g, j_hop, 0.0, delta);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n_sites, n_sites);
    c(0, 0) = c3(0, 0);
    c(n_sites - 1, n_sites - 1) = c3(2, 2);
    for (int j = 1; j < n_sites - 1; ++j) {
        c(j, j) = c3(1, 1);
    }
    for (int j = 0; j < n_sites - 1; ++j) {
        c(j, j + 1) = c3(0, 1);
        c(j + 1, j) = std::conj(c3(0, 1));
    }
    return c;
}

} // namespace infolat

#endif
