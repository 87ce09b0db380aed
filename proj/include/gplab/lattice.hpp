#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace gplab {

using Index = Eigen::Index;
using RealField = Eigen::VectorXd;
using ComplexField = Eigen::VectorXcd;

inline constexpr int kMaxDim = 3;

/// Lattice coordinate; axes beyond the geometry dimension are zero.
using Coord = std::array<int, kMaxDim>;

/// Periodic cube [-L, L]^d of side 2L+1 with a precomputed neighbor table.
///
/// Sites are numbered lexicographically with axis 0 varying fastest, so site
/// s has coordinates x_j = (s / (2L+1)^j mod (2L+1)) - L. The same numbering
/// is used for frequencies gamma in the Fourier representation.
class LatticeGeometry {
public:
    LatticeGeometry(int dim, int half_side);

    int dim() const { return dim_; }
    int half_side() const { return half_side_; }
    int side() const { return side_; }
    Index n_sites() const { return n_sites_; }
    int degree() const { return 2 * dim_; }

    Coord coords(Index site) const;

    /// Site index of a coordinate; coordinates are reduced modulo the side.
    Index site(const Coord& x) const;

    /// The 2d periodic neighbors, ordered (axis 0: -1, +1), (axis 1: -1, +1), ...
    std::span<const Index> neighbors(Index site) const
    {
        return {neighbors_.data() + site * degree(), static_cast<std::size_t>(degree())};
    }

    /// l1 distance on the torus: sum_j min(|x_j - y_j|, side - |x_j - y_j|).
    int torus_distance(Index a, Index b) const;

    /// Position of the site in the 0-based periodic (FFT) ordering.
    Index fft_index(Index site) const { return fft_index_[site]; }

    bool operator==(const LatticeGeometry& other) const
    {
        return dim_ == other.dim_ && half_side_ == other.half_side_;
    }

private:
    int dim_;
    int half_side_;
    int side_;
    Index n_sites_;
    std::vector<Index> neighbors_;
    std::vector<Index> fft_index_;
};

LatticeGeometry build_lattice(int dim, int half_side);

/// h(gamma) = 2d - 2 sum_j cos(2 pi gamma_j / (2L+1)).
double laplacian_symbol(const LatticeGeometry& geom, const Coord& gamma);

/// All symbol values, indexed like the frequency coefficients.
RealField laplacian_symbol_table(const LatticeGeometry& geom);

/// (-Delta u)_x = 2d u_x - sum over neighbors y of u_y.
RealField apply_neg_laplacian(const LatticeGeometry& geom, const RealField& u);
ComplexField apply_neg_laplacian(const LatticeGeometry& geom, const ComplexField& u);

/// Unitary DFT: u_hat_gamma = (2L+1)^{-d/2} sum_beta u_beta exp(-2 pi i gamma.beta / (2L+1)).
ComplexField dft(const LatticeGeometry& geom, const ComplexField& u);
ComplexField dft(const LatticeGeometry& geom, const RealField& u);
ComplexField idft(const LatticeGeometry& geom, const ComplexField& coeffs);

/// Normalized plane wave beta -> (2L+1)^{-d/2} exp(2 pi i gamma.beta / (2L+1)).
ComplexField plane_wave(const LatticeGeometry& geom, const Coord& gamma);

/// <-Delta u, u>, the squared discrete gradient norm.
double dirichlet_energy(const LatticeGeometry& geom, const RealField& u);

/// Throws std::invalid_argument when the field length differs from n_sites.
void check_field_size(const LatticeGeometry& geom, Index size, const char* what);

}  // namespace gplab
