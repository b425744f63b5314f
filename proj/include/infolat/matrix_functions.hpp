#ifndef INFOLAT_MATRIX_FUNCTIONS_HPP
#define INFOLAT_MATRIX_FUNCTIONS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

// Shared numeric helpers: binary entropy, occupation-spectrum clipping, and
// Hermitian matrix functions evaluated through the eigendecomposition.

namespace infolat {

// Tolerance for eigenvalues of a correlation matrix leaving [0,1]: values
// within this band are clipped, anything worse is treated as a genuine
// physicality violation.
inline constexpr double physicality_tol = 1e-10;

// Clip applied to occupation eigenvalues before forming the singular
// log2(mu/(1-mu)); keeps current traces finite at (numerically) pure modes.
inline constexpr double log_ratio_clip = 1e-12;

// x*log2(x) with the 0*log0 = 0 convention.
inline double xlog2x(double x) {
    return x > 0.0 ? x * std::log2(x) : 0.0;
}

// Binary entropy in bits.
inline double binary_entropy(double p) {
    return -xlog2x(p) - xlog2x(1.0 - p);
}

// Checks an occupation eigenvalue against [0,1] and clips roundoff spill.
inline double clip_occupation(double mu, double tol = physicality_tol) {
    if (mu < -tol || mu > 1.0 + tol) {
        throw std::runtime_error("occupation eigenvalue " + std::to_string(mu) +
                                 " outside [0,1] beyond tolerance");
    }
    return std::min(1.0, std::max(0.0, mu));
}

// Eigenvalues of a Hermitian correlation matrix, clipped to [0,1].
inline Eigen::VectorXd occupation_spectrum(const Eigen::MatrixXcd& c_a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(c_a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("occupation_spectrum: eigensolver failed");
    }
    Eigen::VectorXd mu = solver.eigenvalues();
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        mu(i) = clip_occupation(mu(i));
    }
    return mu;
}

// log2(C_A (1 - C_A)^{-1}) in the eigenbasis of C_A. Eigenvalues are clipped
// into [clip, 1-clip] first; `clipped` reports whether the clip was active so
// callers can flag the affected currents.
inline Eigen::MatrixXcd log2_ratio_matrix(const Eigen::MatrixXcd& c_a, bool* clipped = nullptr,
                                          double clip = log_ratio_clip) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(c_a);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("log2_ratio_matrix: eigensolver failed");
    }
    Eigen::VectorXd mu = solver.eigenvalues();
    bool any_clipped = false;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        double m = clip_occupation(mu(i));
        if (m < clip) {
            m = clip;
            any_clipped = true;
        } else if (m > 1.0 - clip) {
            m = 1.0 - clip;
            any_clipped = true;
        }
        mu(i) = std::log2(m / (1.0 - m));
    }
    if (clipped != nullptr) {
        *clipped = any_clipped;
    }
    const Eigen::MatrixXcd& v = solver.eigenvectors();
    return v * mu.asDiagonal() * v.adjoint();
}

} // namespace infolat

#endif
