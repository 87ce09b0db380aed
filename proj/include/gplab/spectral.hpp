#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "gplab/hamiltonian.hpp"

namespace gplab {

/// Lowest eigenpairs in ascending order; eigenvectors are the columns.
struct EigenSolution {
    RealField eigenvalues;
    Eigen::MatrixXd eigenvectors;
    RealField residuals;
    /// Block operator applications (Lanczos) or 0 for the dense oracle.
    Index iterations = 0;

    Index count() const { return eigenvalues.size(); }
    RealField vector(Index i) const { return eigenvectors.col(i); }
};

struct LanczosOptions {
    /// Absolute residual bound ||H phi - E phi||_2 for every returned pair.
    double tol = 1e-10;
    /// Block steps allowed; 0 selects 50 k sqrt(n).
    Index max_iterations = 0;
    /// Block size; 0 selects max(k, max row degree + 1).
    Index block_size = 0;
    /// Krylov basis size before a thick restart; 0 selects an automatic size.
    Index basis_size = 0;
};

/// Raised when the iterative solver exhausts its budget.
class NotConvergedError : public std::runtime_error {
public:
    NotConvergedError(const std::string& what, RealField best_residuals)
        : std::runtime_error(what), residuals_(std::move(best_residuals))
    {
    }
    const RealField& best_residuals() const { return residuals_; }

private:
    RealField residuals_;
};

/// Lowest k eigenpairs by block Lanczos with full reorthogonalization and
/// thick restarts. Convergence is declared on residuals only. Every
/// eigenvector is signed so that its entries sum to a positive number.
EigenSolution lowest_eigenpairs(const HamiltonianOperator& h, Index k, const LanczosOptions& opts = {});

inline constexpr Index kDenseOracleLimit = 4096;

/// Full eigendecomposition of the assembled matrix (at most 4096 rows).
EigenSolution dense_oracle(const HamiltonianOperator& h);

/// All eigenvalues, ascending (at most 4096 rows).
RealField dense_spectrum(const HamiltonianOperator& h);

/// Number of eigenvalues in the closed interval [lo, hi]. Small operators use
/// the dense spectrum; larger ones count negative pivots of sparse LDL^T
/// factorizations of H - lo and H - hi.
Index count_eigenvalues_in(const HamiltonianOperator& h, double lo, double hi);

/// Same count against a precomputed ascending spectrum.
Index count_eigenvalues_in(const RealField& spectrum, double lo, double hi);

/// Number of eigenvalues strictly below `shift`, by Sylvester's law of inertia.
Index count_eigenvalues_below(const HamiltonianOperator& h, double shift);

/// Sign convention shared by all solvers: sum of entries positive, or the
/// first non-negligible entry positive when the sum vanishes.
void fix_sign(Eigen::Ref<RealField> v);

}  // namespace gplab
