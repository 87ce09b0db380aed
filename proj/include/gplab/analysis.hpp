#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gplab/gp.hpp"
#include "gplab/lattice.hpp"
#include "gplab/spectral.hpp"

namespace gplab {

enum class Norm { L2, L4, LInf };

double lp_norm(const RealField& u, Norm p);

/// Parses "2", "4" or "inf"; throws std::invalid_argument otherwise.
Norm parse_norm(const std::string& p);

/// Interaction-scale function f_d(xi):
///   xi^{-1/4} (d <= 3), xi^{-1/d} log xi (d = 4), xi^{-1/d} (d >= 5).
double scale_f(double xi, int dim);

/// Four-norm scale function g_d(eps):
///   eps^{d/4} (d <= 3), eps |log eps| (d = 4), eps (d >= 5).
double scale_g(double eps, int dim);

/// Frequency-shell decomposition u = sum_k u_k with |gamma| the max-norm of
/// the frequency:
///   shell 0:            |gamma| < eps L
///   shell k (1..K-1):   e^{k-1} eps L <= |gamma| < e^k eps L
///   shell K = k_eps:    |gamma| >= e^{K-1} eps L
/// with k_eps = ceil(-log eps), so the shells partition frequency space.
struct ShellDecomposition {
    double eps = 0.0;
    int k_eps = 0;
    std::vector<RealField> shells;
    std::vector<double> shell_norm2;
    std::vector<double> shell_sup;
    /// ||u_k||_2 (e^k eps)^{d/2}.
    std::vector<double> shell_sup_bound;
    /// sum_k e^{2k} ||u_k||_2^2.
    double weighted_mass = 0.0;
    /// sum_{k >= 1} e^{2k-2} eps^2 ||u_k||_2^2.
    double shell_energy = 0.0;
    /// <-Delta u, u>.
    double kinetic = 0.0;

    /// True when ||u_k||_inf <= ||u_k||_2 (e^k eps)^{d/2} (1 + slack) for all k >= 1.
    bool sup_bounds_hold(double slack = 1e-9) const;
};

/// Constant c with sum_{k >= 1} e^{2k-2} eps^2 ||u_k||^2 <= c <-Delta u, u>,
/// from h(gamma) >= 16 |gamma|_inf^2 / (2L+1)^2.
double shell_energy_constant(const LatticeGeometry& geom);

/// Requires ||u||_2 = 1 (within 1e-10) and eps L >= 1.
ShellDecomposition shell_decompose(const LatticeGeometry& geom, const RealField& u, double eps);

struct FourNormReport {
    double four_norm = 0.0;
    double g = 0.0;
    double ratio = 0.0;
    double kinetic = 0.0;
    bool preconditions_hold = true;
    std::vector<std::string> violations;
};

/// ratio = ||u||_4 / g_d(eps); preconditions ||u||_2 = 1, <-Delta u,u> <= eps^2,
/// eps L >= 1 are checked and reported, not enforced.
FourNormReport four_norm_bound_check(const LatticeGeometry& geom, const RealField& u, double eps);

/// Smallest eps admissible for a field: sqrt(<-Delta u, u>) clipped below at 1/L.
double field_scale(const LatticeGeometry& geom, const RealField& u);

struct LocalizationReport {
    Index center = 0;
    Coord center_coords{0, 0, 0};
    /// Fitted exponential decay rate; +inf when no tail points are available.
    double decay_rate = std::numeric_limits<double>::infinity();
    /// RMS residual of the log-linear fit.
    double fit_residual = 0.0;
    /// Smallest q with |u(x)| <= L^q exp(-rate |x - center|) for every site.
    double prefactor_exponent = 0.0;
    Index fit_points = 0;
};

/// Radius of the excluded near field in the decay fit.
inline constexpr int kDecayFitCore = 2;

/// Center = argmax |u| (lexicographically smallest coordinates on ties);
/// decay from a least-squares fit of log|u(x)| against -|x - center| on the
/// torus l1 metric, over sites with |u| > 1e-12 outside the radius-2 ball.
LocalizationReport localization_center(const LatticeGeometry& geom, const RealField& u);

struct GapOverlap {
    double gap = 0.0;
    double overlap = 0.0;
    double flatness = 0.0;
    double ground_l4_4 = 0.0;
};

/// E_1 - E_0, |<phi_0, phi_GP>|, ||grad phi_0||^2 and ||phi_0||_4^4.
GapOverlap gap_and_overlap(const LatticeGeometry& geom, const EigenSolution& eig, const GPResult& gp);

/// Trial fields showing the four-norm bound is attained.
/// Delta-perturbed: eps at the origin, (2L+1)^{-d/2} elsewhere (unnormalized).
RealField delta_trial_field(const LatticeGeometry& geom, double eps);
/// Flat Fourier: u_hat = (2 eps L + 1)^{-d/2} on |gamma| <= eps L, zero elsewhere.
RealField flat_fourier_trial_field(const LatticeGeometry& geom, double eps);

/// Random unit field with <-Delta u, u> <= eps^2, drawn from the probe stream
/// (seed, 0, index). Fourier coefficients live on |gamma| <= s eps L for a
/// random s in [0.1, 1]; their phases interpolate between coherent (peaked
/// at a random site) and fully random. When the kinetic energy exceeds eps^2
/// the field is mixed with the constant mode down to a random fraction of
/// eps^2 in [1/4, 1].
RealField random_low_energy_field(const LatticeGeometry& geom, double eps, std::uint64_t seed, std::uint32_t index);

}  // namespace gplab
