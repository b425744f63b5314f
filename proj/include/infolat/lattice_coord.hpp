#ifndef INFOLAT_LATTICE_COORD_HPP
#define INFOLAT_LATTICE_COORD_HPP

#include <stdexcept>
#include <string>
#include <vector>

// Coordinates on the triangular lattice of connected chain segments. A cell
// (ell, n) is the segment of ell+1 sites centered at midpoint n; midpoints on
// odd layers are half-integers, so cells carry n2 = 2n to keep keys exact.

namespace infolat {

struct LatticeCoord {
    int ell; // layer = segment length - 1
    int n2;  // twice the midpoint position

    int j_left() const { return (n2 - ell) / 2; }  // 1-based first site
    int j_right() const { return (n2 + ell) / 2; } // 1-based last site
    int n_sites() const { return ell + 1; }

    static LatticeCoord from_sites(int j_left, int j_right) {
        if (j_left > j_right) {
            throw std::invalid_argument("LatticeCoord: j_left > j_right");
        }
        return {j_right - j_left, j_left + j_right};
    }

    bool valid(int chain_sites) const {
        return ell >= 0 && (n2 - ell) % 2 == 0 && j_left() >= 1 && j_right() <= chain_sites;
    }

    // Sub-segments entering the inclusion-exclusion stencils. Only valid for
    // ell >= 1 (ell >= 2 for center()).
    LatticeCoord left_sub() const { return {ell - 1, n2 - 1}; }
    LatticeCoord right_sub() const { return {ell - 1, n2 + 1}; }
    LatticeCoord center_sub() const { return {ell - 2, n2}; }

    bool operator==(const LatticeCoord& other) const {
        return ell == other.ell && n2 == other.n2;
    }
};

// Dense per-cell storage for one real value per lattice cell; layer ell holds
// N-ell cells with n2 = ell+2, ell+4, ..., 2N-ell.
class TriangularArray {
public:
    TriangularArray() = default;

    explicit TriangularArray(int n_sites) : n_sites_(n_sites) {
        if (n_sites < 1) {
            throw std::invalid_argument("TriangularArray: n_sites must be >= 1");
        }
        rows_.resize(n_sites);
        for (int ell = 0; ell < n_sites; ++ell) {
            rows_[ell].assign(n_sites - ell, 0.0);
        }
    }

    int n_sites() const { return n_sites_; }

    static int index_in_layer(const LatticeCoord& c) { return (c.n2 - c.ell - 2) / 2; }

    double& at(const LatticeCoord& c) {
        check(c);
        return rows_[c.ell][index_in_layer(c)];
    }

    double at(const LatticeCoord& c) const {
        check(c);
        return rows_[c.ell][index_in_layer(c)];
    }

    // Value with out-of-lattice cells reading as zero; used by the stencils
    // that reference layers ell-1, ell-2 below the bottom.
    double at_or_zero(const LatticeCoord& c) const {
        if (c.ell < 0 || !c.valid(n_sites_)) {
            return 0.0;
        }
        return rows_[c.ell][index_in_layer(c)];
    }

    template <typename Fn> // fn(LatticeCoord, double)
    void for_each(Fn&& fn) const {
        for (int ell = 0; ell < n_sites_; ++ell) {
            for (int k = 0; k < n_sites_ - ell; ++k) {
                fn(LatticeCoord{ell, ell + 2 + 2 * k}, rows_[ell][k]);
            }
        }
    }

private:
    void check(const LatticeCoord& c) const {
        if (!c.valid(n_sites_)) {
            throw std::out_of_range("TriangularArray: invalid cell (ell=" + std::to_string(c.ell) +
                                    ", n2=" + std::to_string(c.n2) + ") for N=" +
                                    std::to_string(n_sites_));
        }
    }

    int n_sites_ = 0;
    std::vector<std::vector<double>> rows_;
};

inline std::vector<LatticeCoord> all_coords(int n_sites) {
    std::vector<LatticeCoord> coords;
    coords.reserve(n_sites * (n_sites + 1) / 2);
    for (int ell = 0; ell < n_sites; ++ell) {
        for (int k = 0; k < n_sites - ell; ++k) {
            coords.push_back({ell, ell + 2 + 2 * k});
        }
    }
    return coords;
}

} // namespace infolat

#endif
