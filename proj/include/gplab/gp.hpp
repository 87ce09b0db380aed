#pragma once

#include <optional>
#include <vector>

#include "gplab/hamiltonian.hpp"
#include "gplab/spectral.hpp"

namespace gplab {

/// E[phi] = <H phi, phi> + U sum_x phi(x)^4 on the unit sphere.
struct GPProblem {
    const HamiltonianOperator* hamiltonian = nullptr;
    double coupling = 0.0;

    GPProblem(const HamiltonianOperator& h, double u);
    const HamiltonianOperator& h() const { return *hamiltonian; }
};

struct GPOptions {
    /// Bound on the sphere-projected gradient norm.
    double gradient_tol = 1e-9;
    /// Bound on |Delta E| / |E| of the last accepted step.
    double energy_tol = 1e-12;
    Index max_iterations = 2'000'000;
    /// Armijo sufficient-decrease constant.
    double armijo = 1e-4;
    /// Upper bound on the potential, used in the initial step size.
    double v_max = 1.0;
    /// Lattice dimension, used in the initial step size.
    int dim = 1;
    /// Keep the per-iteration energy trace.
    bool record_trace = true;
};

struct GPResult {
    RealField minimizer;
    double energy = 0.0;
    std::vector<double> trace;
    double gradient_norm = 0.0;
    Index iterations = 0;
    bool converged = false;
};

double gp_energy(const GPProblem& p, const RealField& phi);

/// Ambient gradient 2 H phi + 4 U phi^3.
RealField gp_gradient(const GPProblem& p, const RealField& phi);

/// Projected gradient descent on the sphere with Armijo backtracking. Each
/// iterate is replaced by its entrywise modulus and renormalized. Without an
/// initial field the uniform positive field is used.
GPResult minimize_gp(const GPProblem& p, const std::optional<RealField>& init, const GPOptions& opts = {});

/// Random strictly positive unit field from the initial-field stream.
RealField random_positive_field(Index size, std::uint64_t seed, std::uint32_t sample_index);

struct CondensationCertificate {
    double e0 = 0.0;
    double e1 = 0.0;
    double e_gp = 0.0;
    /// ||pi_0 phi_GP|| = |<phi_0, phi_GP>|.
    double ground_component = 0.0;
    /// ||(1 - pi_0) phi_GP||.
    double excited_component = 0.0;
    double overlap = 0.0;
    /// E_1 > E_GP and the gap E_1 - E_0 is resolvable.
    bool valid = false;
    /// (E_GP - E_0) ||pi_0 phi|| - (E_1 - E_GP) ||(1 - pi_0) phi||; >= 0 when the bound holds.
    double margin = 0.0;
    bool holds = true;
    /// (E_GP - E_0) ||pi_0 phi||^2 - (E_1 - E_GP) ||(1 - pi_0) phi||^2, the form
    /// implied by E_GP >= <H phi, phi> >= E_0 ||pi_0 phi||^2 + E_1 ||(1 - pi_0) phi||^2.
    double squared_margin = 0.0;
    bool squared_holds = true;
};

inline constexpr double kCertificateSlack = 1e-9;
inline constexpr double kResolvableGap = 1e-12;

/// Projection bound (E_1 - E_GP)||(1-pi_0)phi|| <= (E_GP - E_0)||pi_0 phi||,
/// evaluated only when E_1 > E_GP; `holds` reports it within 1e-9.
CondensationCertificate certificate(const GPProblem& p, const EigenSolution& eig, const GPResult& gp);

}  // namespace gplab
