#ifndef INFOLAT_CHAIN_MODEL_HPP
#define INFOLAT_CHAIN_MODEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

// Single-particle chain Hamiltonian and reservoir rate vectors.
// Sites are numbered 1..N at the API surface; Eigen indices are 0-based
// internally, and the conversion never leaks past this boundary or the I/O
// layer.

namespace infolat {

struct ChainSpec {
    int n_sites = 0;
    Eigen::VectorXd hopping; // J_{j,j+1}, length N-1
    Eigen::VectorXd onsite;  // eps_j, length N

    static ChainSpec uniform(int n, double j_hop, double eps = 0.0) {
        if (n < 2) {
            throw std::invalid_argument("ChainSpec: n_sites must be >= 2, got " + std::to_string(n));
        }
        ChainSpec spec;
        spec.n_sites = n;
        spec.hopping = Eigen::VectorXd::Constant(n - 1, j_hop);
        spec.onsite = Eigen::VectorXd::Constant(n, eps);
        return spec;
    }

    // Site defect eps_{j0}; j0 is 1-based.
    void set_onsite(int j0, double eps) {
        require_site(j0);
        onsite(j0 - 1) = eps;
    }

    // Bond defect J_{j0,j0+1}; j0 is the 1-based left site of the bond.
    void set_hopping(int j0, double j_hop) {
        if (j0 < 1 || j0 > n_sites - 1) {
            throw std::out_of_range("ChainSpec: bond index " + std::to_string(j0) + " outside 1.." +
                                    std::to_string(n_sites - 1));
        }
        hopping(j0 - 1) = j_hop;
    }

    double hopping_at(int j0) const { // bond j0 -> j0+1, 1-based
        if (j0 < 1 || j0 > n_sites - 1) {
            throw std::out_of_range("ChainSpec: bond index " + std::to_string(j0) + " outside 1.." +
                                    std::to_string(n_sites - 1));
        }
        return hopping(j0 - 1);
    }

    void require_site(int j) const {
        if (j < 1 || j > n_sites) {
            throw std::out_of_range("ChainSpec: site index " + std::to_string(j) + " outside 1.." +
                                    std::to_string(n_sites));
        }
    }

    void validate() const {
        if (n_sites < 2) {
            throw std::invalid_argument("ChainSpec: n_sites must be >= 2");
        }
        if (hopping.size() != n_sites - 1 || onsite.size() != n_sites) {
            throw std::invalid_argument("ChainSpec: vector lengths do not match n_sites");
        }
    }
};

struct ReservoirSpec {
    Eigen::VectorXd inject; // Gamma_j, length N
    Eigen::VectorXd remove; // gamma_j, length N

    static ReservoirSpec empty(int n) {
        ReservoirSpec res;
        res.inject = Eigen::VectorXd::Zero(n);
        res.remove = Eigen::VectorXd::Zero(n);
        return res;
    }

    void validate() const {
        if (inject.size() != remove.size()) {
            throw std::invalid_argument("ReservoirSpec: inject/remove lengths differ");
        }
        if (inject.minCoeff() < 0.0 || remove.minCoeff() < 0.0) {
            throw std::invalid_argument("ReservoirSpec: rates must be nonnegative");
        }
    }

    double total_rate(int j) const { return inject(j - 1) + remove(j - 1); } // 1-based
};

// Real symmetric tridiagonal Hamiltonian, returned in the complex Hermitian
// representation used by all downstream code.
inline Eigen::MatrixXcd build_hamiltonian(const ChainSpec& spec) {
    spec.validate();
    const int n = spec.n_sites;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        h(j, j) = spec.onsite(j);
    }
    for (int j = 0; j < n - 1; ++j) {
        h(j, j + 1) = spec.hopping(j);
        h(j + 1, j) = spec.hopping(j);
    }
    return h;
}

// Large-bias regime: the left lead only injects, the right lead only removes.
// delta measures the particle-hole asymmetry of the two rates.
inline ReservoirSpec rates_large_bias(int n_sites, double g, double delta) {
    if (g <= 0.0) {
        throw std::domain_error("rates_large_bias: g must be positive");
    }
    if (std::abs(delta) >= 1.0) {
        throw std::domain_error("rates_large_bias: |delta| must be < 1 (rates would be negative)");
    }
    ReservoirSpec res = ReservoirSpec::empty(n_sites);
    res.inject(0) = g * (1.0 + delta);
    res.remove(n_sites - 1) = g * (1.0 - delta);
    return res;
}

// Linear-response regime: both leads inject and remove, with a small drive
// amplitude phi on top of the common asymmetry delta.
inline ReservoirSpec rates_linear_response(int n_sites, double g, double delta, double phi) {
    if (g <= 0.0) {
        throw std::domain_error("rates_linear_response: g must be positive");
    }
    ReservoirSpec res = ReservoirSpec::empty(n_sites);
    res.inject(0) = 0.5 * g * (1.0 + delta + phi);
    res.remove(0) = 0.5 * g * (1.0 - delta - phi);
    res.inject(n_sites - 1) = 0.5 * g * (1.0 + delta - phi);
    res.remove(n_sites - 1) = 0.5 * g * (1.0 - delta + phi);
    if (res.inject(0) < 0.0 || res.remove(0) < 0.0 || res.inject(n_sites - 1) < 0.0 ||
        res.remove(n_sites - 1) < 0.0) {
        throw std::domain_error("rates_linear_response: delta/phi combination gives a negative rate");
    }
    return res;
}

// Microscopic lead construction: rates from Fermi factors of two leads at
// chemical potentials mu_{L/R} and temperatures T_{L/R}, evaluated at the end
// site energies. Bias eV = mu_L - mu_R around the mean potential.
inline ReservoirSpec rates_from_fermi(int n_sites, double g_left, double g_right, double mu_left,
                                      double mu_right, double t_left, double t_right, double eps_1,
                                      double eps_n) {
    if (t_left <= 0.0 || t_right <= 0.0) {
        throw std::domain_error("rates_from_fermi: temperatures must be positive");
    }
    if (g_left <= 0.0 || g_right <= 0.0) {
        throw std::domain_error("rates_from_fermi: lead couplings must be positive");
    }
    const double mu_bar = 0.5 * (mu_left + mu_right);
    const double bias = mu_left - mu_right;
    const auto fermi = [](double x) { return 1.0 / (std::exp(x) + 1.0); };
    const double f_left = fermi((eps_1 - mu_bar - 0.5 * bias) / t_left);
    const double f_right = fermi((eps_n - mu_bar + 0.5 * bias) / t_right);

    ReservoirSpec res = ReservoirSpec::empty(n_sites);
    res.inject(0) = g_left * f_left;
    res.remove(0) = g_left * (1.0 - f_left);
    res.inject(n_sites - 1) = g_right * f_right;
    res.remove(n_sites - 1) = g_right * (1.0 - f_right);
    return res;
}

} // namespace infolat

#endif
