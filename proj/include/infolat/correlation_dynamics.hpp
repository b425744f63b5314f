#ifndef INFOLAT_CORRELATION_DYNAMICS_HPP
#define INFOLAT_CORRELATION_DYNAMICS_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "infolat/chain_model.hpp"
#include "infolat/matrix_functions.hpp"

// Equation of motion and steady-state solver for the correlation matrix
// C_ij = <c_i^dag c_j> of the boundary-driven chain.

namespace infolat {

struct NonUniqueSteadyState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PhysicalityViolation : std::runtime_error {
    int step;
    PhysicalityViolation(const std::string& what, int step_index)
        : std::runtime_error(what), step(step_index) {}
};

// dC/dt = i[H^T, C] + Gamma - 1/2 {Gamma + gamma, C} with diagonal rate
// matrices. The transpose on H comes from the chosen index order of C.
inline Eigen::MatrixXcd drift(const Eigen::MatrixXcd& h, const ReservoirSpec& res,
                              const Eigen::MatrixXcd& c) {
    const Eigen::Index n = h.rows();
    if (c.rows() != n || c.cols() != n || res.inject.size() != n) {
        throw std::invalid_argument("drift: dimension mismatch");
    }
    const Eigen::MatrixXcd ht = h.transpose();
    Eigen::MatrixXcd d = std::complex<double>(0.0, 1.0) * (ht * c - c * ht);
    const Eigen::VectorXd total = res.inject + res.remove;
    d += res.inject.asDiagonal();
    d -= 0.5 * (total.asDiagonal() * c + c * total.asDiagonal());
    return d;
}

struct PhysicalityReport {
    double hermiticity_residual;
    double min_eigenvalue;
    double max_eigenvalue;
    double trace;

    bool is_physical(double tol = physicality_tol) const {
        return hermiticity_residual <= 1e-12 && min_eigenvalue >= -tol &&
               max_eigenvalue <= 1.0 + tol;
    }
};

inline PhysicalityReport check_physicality(const Eigen::MatrixXcd& c) {
    PhysicalityReport report;
    report.hermiticity_residual = (c - c.adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (c + c.adjoint()),
                                                           Eigen::EigenvaluesOnly);
    report.min_eigenvalue = solver.eigenvalues().minCoeff();
    report.max_eigenvalue = solver.eigenvalues().maxCoeff();
    report.trace = c.trace().real();
    return report;
}

namespace detail {

// Clips spectrum spill within the tolerance band back into [0,1]; anything
// beyond the band throws, pointing at the offending step.
inline void enforce_physicality(Eigen::MatrixXcd& c, int step) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(c);
    const Eigen::VectorXd& mu = solver.eigenvalues();
    if (mu.minCoeff() < -physicality_tol || mu.maxCoeff() > 1.0 + physicality_tol) {
        throw PhysicalityViolation("evolve: correlation spectrum left [0,1] at step " +
                                       std::to_string(step) + " (min " +
                                       std::to_string(mu.minCoeff()) + ", max " +
                                       std::to_string(mu.maxCoeff()) + ")",
                                   step);
    }
    if (mu.minCoeff() < 0.0 || mu.maxCoeff() > 1.0) {
        Eigen::VectorXd clipped = mu;
        for (Eigen::Index i = 0; i < clipped.size(); ++i) {
            clipped(i) = std::min(1.0, std::max(0.0, clipped(i)));
        }
        c = solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().adjoint();
    }
}

// One classical Runge-Kutta step; dt may be negative (backward step), which
// the finite-difference balance checks rely on.
inline Eigen::MatrixXcd rk4_step(const Eigen::MatrixXcd& h, const ReservoirSpec& res,
                                 const Eigen::MatrixXcd& c, double dt) {
    const Eigen::MatrixXcd k1 = drift(h, res, c);
    const Eigen::MatrixXcd k2 = drift(h, res, c + 0.5 * dt * k1);
    const Eigen::MatrixXcd k3 = drift(h, res, c + 0.5 * dt * k2);
    const Eigen::MatrixXcd k4 = drift(h, res, c + dt * k3);
    return c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace detail

struct Snapshot {
    int step;
    double t;
    Eigen::MatrixXcd c;
};

// Fixed-step classical fourth-order Runge-Kutta integration. Every step is
// re-symmetrized; snapshots (every store_every steps plus the final state) are
// physicality-checked with the clip band of the module contract.
inline std::vector<Snapshot> evolve(const Eigen::MatrixXcd& h, const ReservoirSpec& res,
                                    const Eigen::MatrixXcd& c0, double dt, int n_steps,
                                    int store_every = 0) {
    if (dt <= 0.0) {
        throw std::invalid_argument("evolve: dt must be positive");
    }
    if (n_steps < 0) {
        throw std::invalid_argument("evolve: n_steps must be nonnegative");
    }
    std::vector<Snapshot> out;
    Eigen::MatrixXcd c = 0.5 * (c0 + c0.adjoint());
    if (store_every > 0) {
        out.push_back({0, 0.0, c});
    }
    for (int step = 1; step <= n_steps; ++step) {
        c = detail::rk4_step(h, res, c, dt);
        c = 0.5 * (c + c.adjoint()).eval();
        const bool store = (store_every > 0 && step % store_every == 0) || step == n_steps;
        if (store) {
            detail::enforce_physicality(c, step);
            out.push_back({step, step * dt, c});
        }
    }
    if (out.empty()) {
        out.push_back({0, 0.0, c});
    }
    return out;
}

inline Eigen::MatrixXcd evolve_final(const Eigen::MatrixXcd& h, const ReservoirSpec& res,
                                     const Eigen::MatrixXcd& c0, double dt, int n_steps) {
    return evolve(h, res, c0, dt, n_steps).back().c;
}

// Step size resolving the fastest Hamiltonian and dissipative scales.
inline double default_dt(const ChainSpec& chain, const ReservoirSpec& res) {
    double scale = 0.0;
    if (chain.hopping.size() > 0) {
        scale = chain.hopping.cwiseAbs().maxCoeff();
    }
    scale = std::max(scale, chain.onsite.cwiseAbs().maxCoeff());
    scale = std::max(scale, res.inject.maxCoeff());
    scale = std::max(scale, res.remove.maxCoeff());
    if (scale <= 0.0) {
        throw std::domain_error("default_dt: no nonzero energy or rate scale");
    }
    return 0.05 / scale;
}

// Direct steady-state solve of W C + C W^dag + Gamma = 0 with
// W = i H^T - 1/2 (Gamma + gamma), vectorized into an N^2 x N^2 linear
// system (column-major vec convention, so vec(WC) = (I (x) W) vec(C) and
// vec(C W^dag) = (conj(W) (x) I) vec(C)).
inline Eigen::MatrixXcd solve_ness(const Eigen::MatrixXcd& h, const ReservoirSpec& res) {
    const Eigen::Index n = h.rows();
    if (res.inject.size() != n || res.remove.size() != n) {
        throw std::invalid_argument("solve_ness: dimension mismatch");
    }
    if (res.inject.maxCoeff() <= 0.0 && res.remove.maxCoeff() <= 0.0) {
        throw NonUniqueSteadyState("solve_ness: all rates vanish, stationary state not unique");
    }

    const Eigen::VectorXd total = res.inject + res.remove;
    Eigen::MatrixXcd w = std::complex<double>(0.0, 1.0) * h.transpose();
    w -= 0.5 * Eigen::MatrixXcd(total.cast<std::complex<double>>().asDiagonal());

    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(n * n, n * n);
    for (Eigen::Index col = 0; col < n; ++col) {
        big.block(col * n, col * n, n, n) += w;
    }
    for (Eigen::Index col = 0; col < n; ++col) {
        for (Eigen::Index col2 = 0; col2 < n; ++col2) {
            big.block(col * n, col2 * n, n, n).diagonal().array() += std::conj(w(col, col2));
        }
    }

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        rhs(j * n + j) = -res.inject(j);
    }

    const Eigen::VectorXcd sol = big.partialPivLu().solve(rhs);
    Eigen::MatrixXcd c = Eigen::Map<const Eigen::MatrixXcd>(sol.data(), n, n);
    c = 0.5 * (c + c.adjoint()).eval();

    const double residual = drift(h, res, c).cwiseAbs().maxCoeff();
    if (!std::isfinite(residual) || residual > 1e-9 * std::max(1.0, total.maxCoeff())) {
        throw NonUniqueSteadyState("solve_ness: Lyapunov system is singular (residual " +
                                   std::to_string(residual) + ")");
    }
    const PhysicalityReport report = check_physicality(c);
    if (!report.is_physical()) {
        throw std::runtime_error("solve_ness: unphysical steady state (min eig " +
                                 std::to_string(report.min_eigenvalue) + ", max eig " +
                                 std::to_string(report.max_eigenvalue) + ")");
    }
    return c;
}

} // namespace infolat

#endif
