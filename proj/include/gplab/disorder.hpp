#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gplab/hamiltonian.hpp"
#include "gplab/lattice.hpp"

namespace gplab {

enum class DistributionKind { Uniform, Bernoulli, DiscreteUniform };

std::string to_string(DistributionKind kind);
DistributionKind parse_distribution(const std::string& name);

/// Law of the iid on-site potential.
struct DisorderSpec {
    DistributionKind kind = DistributionKind::Uniform;
    double v_max = 1.0;
    /// Probability of the value v_max (Bernoulli only).
    double bernoulli_p = 0.5;
    /// Levels for DiscreteUniform; each must lie in [0, v_max].
    std::vector<double> levels;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on an inconsistent specification.
    void validate() const;

    /// Map one uniform [0,1) draw to a potential value.
    double draw(double uniform01) const;
};

struct Provenance {
    std::uint64_t master_seed = 0;
    std::uint32_t l_index = 0;
    std::uint32_t sample_index = 0;

    bool operator==(const Provenance&) const = default;
};

/// One sampled potential on a shared geometry.
struct DisorderRealization {
    std::shared_ptr<const LatticeGeometry> geometry;
    RealField potential;
    Provenance provenance;
};

/// Iid potential; site x uses draw x of the (seed, L index, sample index) stream.
DisorderRealization sample_potential(const DisorderSpec& spec,
                                     std::shared_ptr<const LatticeGeometry> geom,
                                     std::uint32_t l_index, std::uint32_t sample_index);

/// Realization with V = 0 (free Laplacian).
DisorderRealization zero_potential(std::shared_ptr<const LatticeGeometry> geom);

/// Axis-aligned box I_1 x ... x I_d. `lower` holds the first coordinate of
/// each I_j in [-L, L]; `extent` the number of sites along each axis.
struct Region {
    Coord lower{0, 0, 0};
    Coord extent{1, 1, 1};
    BoundaryCondition boundary = BoundaryCondition::Dirichlet;

    Index n_sites(int dim) const;
    bool operator==(const Region&) const = default;
};

/// The whole torus with periodic boundary conditions.
Region whole_torus(const LatticeGeometry& geom);

/// Disjoint boxes covering the lattice, every side in [ell/2, 2 ell].
/// Each axis is cut into max(1, floor(2L / ell)) near-equal intervals, the
/// longer ones first. The boundary tag of the returned regions is `boundary`.
std::vector<Region> partition_into_boxes(const LatticeGeometry& geom, int ell,
                                         BoundaryCondition boundary = BoundaryCondition::Dirichlet);

/// -Delta + V restricted to a region.
///
/// Periodic: only the whole torus. Dirichlet: couplings leaving the region
/// are dropped and the diagonal stays 2d + V. Neumann: couplings leaving the
/// region are dropped and the diagonal becomes (in-region degree) + V.
HamiltonianOperator restrict_hamiltonian(const DisorderRealization& realization, const Region& region);

/// Shorthand for the periodic operator on the whole torus.
HamiltonianOperator periodic_hamiltonian(const DisorderRealization& realization);

}  // namespace gplab
