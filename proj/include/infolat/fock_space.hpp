#ifndef INFOLAT_FOCK_SPACE_HPP
#define INFOLAT_FOCK_SPACE_HPP

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "infolat/chain_model.hpp"

// Many-body lifting of the chain into the full 2^N occupation-number space:
// Jordan-Wigner fermion operators, the lifted Hamiltonian and jump operators,
// and partial traces of pure states. Basis convention: Fock index b stores
// site j (1-based) in bit j-1, and the string phase of c_j counts occupied
// sites with smaller index.

namespace infolat {

using SparseOperator = Eigen::SparseMatrix<std::complex<double>>;

// Hard cap on the chain length for any 2^N construction; beyond this the
// operators alone stop fitting in memory.
inline constexpr int fock_site_limit = 14;

// States whose smaller parity-sector weight exceeds this are rejected by the
// segment partial trace, which is only fermionically meaningful for states of
// definite parity.
inline constexpr double fock_parity_tol = 1e-9;

inline Eigen::Index fock_dimension(int n_sites) {
    if (n_sites < 1 || n_sites > fock_site_limit) {
        throw std::invalid_argument("fock_dimension: n_sites " + std::to_string(n_sites) +
                                    " outside 1.." + std::to_string(fock_site_limit));
    }
    return Eigen::Index(1) << n_sites;
}

// Sparse annihilation operator c_j with the string sign, 1-based site index.
inline SparseOperator fock_annihilation(int n_sites, int j) {
    const Eigen::Index dim = fock_dimension(n_sites);
    if (j < 1 || j > n_sites) {
        throw std::out_of_range("fock_annihilation: site " + std::to_string(j) + " outside 1.." +
                                std::to_string(n_sites));
    }
    const std::uint64_t bit = std::uint64_t(1) << (j - 1);
    std::vector<Eigen::Triplet<std::complex<double>>> entries;
    entries.reserve(dim / 2);
    for (std::uint64_t b = 0; b < std::uint64_t(dim); ++b) {
        if ((b & bit) == 0) {
            continue;
        }
        const double sign = (std::popcount(b & (bit - 1)) % 2 == 0) ? 1.0 : -1.0;
        entries.emplace_back(Eigen::Index(b ^ bit), Eigen::Index(b), sign);
    }
    SparseOperator op(dim, dim);
    op.setFromTriplets(entries.begin(), entries.end());
    return op;
}

struct FockOperators {
    int n_sites = 0;
    SparseOperator hamiltonian;
    std::vector<SparseOperator> jumps; // site-ascending, injection before removal
    double max_rate = 0.0;             // largest reservoir rate entering any jump
};

// Lifts the single-particle chain and its reservoir couplings to the full
// Fock space. Jump operators are sqrt(Gamma_j) c_j^dag and sqrt(gamma_j) c_j;
// sites with zero rate contribute no operator.
inline FockOperators build_fock_operators(const ChainSpec& chain, const ReservoirSpec& res) {
    chain.validate();
    res.validate();
    if (res.inject.size() != chain.n_sites) {
        throw std::invalid_argument("build_fock_operators: reservoir length does not match chain");
    }
    const int n = chain.n_sites;
    const Eigen::Index dim = fock_dimension(n);

    std::vector<SparseOperator> c_ops;
    c_ops.reserve(n);
    for (int j = 1; j <= n; ++j) {
        c_ops.push_back(fock_annihilation(n, j));
    }

    FockOperators ops;
    ops.n_sites = n;
    SparseOperator h(dim, dim);
    for (int j = 0; j < n; ++j) {
        if (chain.onsite(j) != 0.0) {
            h = h + std::complex<double>(chain.onsite(j)) *
                        SparseOperator(c_ops[j].adjoint() * c_ops[j]);
        }
    }
    for (int j = 0; j < n - 1; ++j) {
        if (chain.hopping(j) != 0.0) {
            const SparseOperator hop = SparseOperator(c_ops[j].adjoint() * c_ops[j + 1]);
            h = h + std::complex<double>(chain.hopping(j)) *
                        SparseOperator(hop + SparseOperator(hop.adjoint()));
        }
    }
    h.makeCompressed();
    ops.hamiltonian = std::move(h);

    for (int j = 0; j < n; ++j) {
        if (res.inject(j) > 0.0) {
            ops.jumps.emplace_back(std::sqrt(res.inject(j)) * SparseOperator(c_ops[j].adjoint()));
            ops.max_rate = std::max(ops.max_rate, res.inject(j));
        }
        if (res.remove(j) > 0.0) {
            ops.jumps.emplace_back(std::sqrt(res.remove(j)) * c_ops[j]);
            ops.max_rate = std::max(ops.max_rate, res.remove(j));
        }
    }
    for (SparseOperator& jump : ops.jumps) {
        jump.makeCompressed();
    }
    return ops;
}

namespace detail {

// Weight of the smaller fermion-parity sector, relative to the total weight.
inline double parity_mixing(const Eigen::VectorXcd& psi) {
    double even = 0.0;
    double odd = 0.0;
    for (Eigen::Index b = 0; b < psi.size(); ++b) {
        const double w = std::norm(psi(b));
        if (std::popcount(std::uint64_t(b)) % 2 == 0) {
            even += w;
        } else {
            odd += w;
        }
    }
    const double total = even + odd;
    if (total <= 0.0) {
        throw std::invalid_argument("parity_mixing: zero state");
    }
    return std::min(even, odd) / total;
}

} // namespace detail

// Correlation matrix C_ij = <psi| c_i^dag c_j |psi> of a Fock-space state,
// taken on the amplitudes as given (callers pass normalized states).
inline Eigen::MatrixXcd state_correlation(const Eigen::VectorXcd& psi, int n_sites) {
    const Eigen::Index dim = fock_dimension(n_sites);
    if (psi.size() != dim) {
        throw std::invalid_argument("state_correlation: amplitude length does not match n_sites");
    }
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(dim, n_sites);
    for (int j = 0; j < n_sites; ++j) {
        const std::uint64_t bit = std::uint64_t(1) << j;
        for (std::uint64_t b = 0; b < std::uint64_t(dim); ++b) {
            if ((b & bit) == 0) {
                continue;
            }
            const double sign = (std::popcount(b & (bit - 1)) % 2 == 0) ? 1.0 : -1.0;
            phi(Eigen::Index(b ^ bit), j) = sign * psi(Eigen::Index(b));
        }
    }
    return phi.adjoint() * phi;
}

// Reduced density matrix of the contiguous segment [j_first, j_last] of a
// pure state, via the qubit-basis partial trace. For states of definite
// fermion parity this equals the fermionic mode reduction exactly (the string
// signs cancel within a parity sector), so mixed-parity input is rejected.
inline Eigen::MatrixXcd fock_segment_density(const Eigen::VectorXcd& psi, int n_sites, int j_first,
                                             int j_last) {
    const Eigen::Index dim = fock_dimension(n_sites);
    if (psi.size() != dim) {
        throw std::invalid_argument("fock_segment_density: amplitude length does not match n_sites");
    }
    if (j_first < 1 || j_last > n_sites || j_first > j_last) {
        throw std::out_of_range("fock_segment_density: bad segment [" + std::to_string(j_first) +
                                ", " + std::to_string(j_last) + "]");
    }
    if (detail::parity_mixing(psi) > fock_parity_tol) {
        throw std::invalid_argument(
            "fock_segment_density: state has no definite fermion parity, the qubit partial trace "
            "does not represent the fermionic reduction");
    }
    const int len = j_last - j_first + 1;
    const int low_bits = j_first - 1;
    const Eigen::Index dim_a = Eigen::Index(1) << len;
    const Eigen::Index dim_low = Eigen::Index(1) << low_bits;
    const Eigen::Index dim_high = Eigen::Index(1) << (n_sites - j_last);

    Eigen::MatrixXcd rdm = Eigen::MatrixXcd::Zero(dim_a, dim_a);
    for (Eigen::Index hi = 0; hi < dim_high; ++hi) {
        for (Eigen::Index lo = 0; lo < dim_low; ++lo) {
            const Eigen::Index base = (hi << (low_bits + len)) | lo;
            for (Eigen::Index x = 0; x < dim_a; ++x) {
                const std::complex<double> ax = psi(base | (x << low_bits));
                if (ax == std::complex<double>(0.0)) {
                    continue;
                }
                for (Eigen::Index y = 0; y < dim_a; ++y) {
                    rdm(x, y) += ax * std::conj(psi(base | (y << low_bits)));
                }
            }
        }
    }
    return rdm;
}

// Von Neumann entropy of a density matrix in bits. Tiny negative eigenvalues
// from roundoff are dropped; anything clearly negative is a caller bug.
inline double fock_entropy_bits(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (rho + rho.adjoint()),
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("fock_entropy_bits: eigensolver failed");
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double p = solver.eigenvalues()(i);
        if (p < -1e-9) {
            throw std::invalid_argument("fock_entropy_bits: eigenvalue " + std::to_string(p) +
                                        " is not a probability");
        }
        if (p > 0.0) {
            s -= p * std::log2(p);
        }
    }
    return s;
}

} // namespace infolat

#endif
