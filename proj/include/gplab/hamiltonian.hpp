#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gplab/lattice.hpp"

namespace gplab {

enum class BoundaryCondition { Periodic, Neumann, Dirichlet };

std::string to_string(BoundaryCondition bc);

/// Matrix-free symmetric operator diag(d) - A where A is a 0/1 adjacency.
///
/// Rows are numbered by region-local index; `sites()` maps them back to
/// lattice sites. Built by restrict_hamiltonian; immutable afterwards.
class HamiltonianOperator {
public:
    HamiltonianOperator(BoundaryCondition boundary, std::vector<Index> sites, RealField diagonal,
                        std::vector<Index> row_offsets, std::vector<Index> columns,
                        std::uint64_t start_seed = 0);

    Index size() const { return diagonal_.size(); }
    BoundaryCondition boundary() const { return boundary_; }
    const std::vector<Index>& sites() const { return sites_; }
    const RealField& diagonal() const { return diagonal_; }

    /// Seed for deterministic solver start vectors.
    std::uint64_t start_seed() const { return start_seed_; }
    void set_start_seed(std::uint64_t seed) { start_seed_ = seed; }

    /// Upper bound on the spectrum (Gershgorin).
    double spectral_upper_bound() const { return upper_bound_; }

    void apply(const RealField& in, RealField& out) const;
    RealField apply(const RealField& in) const
    {
        RealField out(in.size());
        apply(in, out);
        return out;
    }

    /// Applies to each column of a block.
    void apply_block(const Eigen::MatrixXd& in, Eigen::MatrixXd& out) const;

    double quadratic_form(const RealField& u) const { return apply(u).dot(u); }

    /// Assembled matrix; only for small-instance oracles.
    Eigen::MatrixXd dense() const;

    std::span<const Index> row(Index i) const
    {
        return {columns_.data() + offsets_[i], static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
    }

private:
    BoundaryCondition boundary_;
    std::vector<Index> sites_;
    RealField diagonal_;
    std::vector<Index> offsets_;
    std::vector<Index> columns_;
    std::uint64_t start_seed_;
    double upper_bound_ = 0.0;
};

}  // namespace gplab
