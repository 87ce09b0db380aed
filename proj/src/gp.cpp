#include "gplab/gp.hpp"

#include <cmath>
#include <stdexcept>

#include "gplab/rng.hpp"

namespace gplab {

namespace {

void check_size(const GPProblem& p, const RealField& phi, const char* what)
{
    if (phi.size() != p.h().size())
        throw std::invalid_argument(std::string(what) + ": field size " + std::to_string(phi.size()) +
                                    " does not match operator size " + std::to_string(p.h().size()));
}

double quartic(const RealField& phi) { return phi.array().square().square().sum(); }

}  // namespace

GPProblem::GPProblem(const HamiltonianOperator& h, double u) : hamiltonian(&h), coupling(u)
{
    if (!(u >= 0.0) || !std::isfinite(u)) throw std::invalid_argument("GPProblem: coupling must be >= 0");
}

double gp_energy(const GPProblem& p, const RealField& phi)
{
    check_size(p, phi, "gp_energy");
    return p.h().apply(phi).dot(phi) + p.coupling * quartic(phi);
}

RealField gp_gradient(const GPProblem& p, const RealField& phi)
{
    check_size(p, phi, "gp_gradient");
    RealField g = 2.0 * p.h().apply(phi);
    g.array() += 4.0 * p.coupling * phi.array().cube();
    return g;
}

RealField random_positive_field(Index size, std::uint64_t seed, std::uint32_t sample_index)
{
    CounterStream stream(seed, 0, sample_index, kInitialFieldStream);
    RealField phi(size);
    for (Index i = 0; i < size; ++i) phi[i] = 0.05 + stream.uniform(static_cast<std::uint64_t>(i));
    return phi / phi.norm();
}

GPResult minimize_gp(const GPProblem& p, const std::optional<RealField>& init, const GPOptions& opts)
{
    const HamiltonianOperator& h = p.h();
    const double u = p.coupling;
    const Index n = h.size();

    RealField phi = init ? *init : RealField::Constant(n, 1.0);
    check_size(p, phi, "minimize_gp");
    phi = phi.cwiseAbs();
    const double norm0 = phi.norm();
    if (!(norm0 > 0.0)) throw std::invalid_argument("minimize_gp: initial field is zero");
    phi /= norm0;

    GPResult result;
    RealField hphi = h.apply(phi);
    double energy = hphi.dot(phi) + u * quartic(phi);
    if (opts.record_trace) result.trace.push_back(energy);

    const double step_base = 2.0 * (4.0 * opts.dim + opts.v_max);
    double last_relative_change = 0.0;
    RealField grad(n), tangent(n), candidate(n), w(n), hw(n);

    Index it = 0;
    for (; it < opts.max_iterations; ++it) {
        grad = 2.0 * hphi;
        grad.array() += 4.0 * u * phi.array().cube();
        tangent = grad - grad.dot(phi) * phi;
        const double gnorm = tangent.norm();
        result.gradient_norm = gnorm;
        if (gnorm <= opts.gradient_tol && last_relative_change <= opts.energy_tol) {
            result.converged = true;
            break;
        }

        // The energy is evaluated as the scale-invariant quotient
        //   F(c) = <Hc,c>/|c|^2 + U sum c^4 / |c|^4,
        // and F(phi + w) - F(phi) is expanded in the small increment w so that
        // no two O(1) quantities are subtracted.
        const double nu2 = phi.squaredNorm();
        const double a = hphi.dot(phi);
        const double q4 = quartic(phi);
        const double sup = phi.cwiseAbs().maxCoeff();
        double step = 1.0 / (step_base + 12.0 * u * sup * sup);
        bool accepted = false;
        double change = 0.0, c2 = 0.0;
        for (int backtrack = 0; backtrack < 60; ++backtrack, step *= 0.5) {
            candidate = (phi - step * tangent).cwiseAbs();
            w = candidate - phi;
            h.apply(w, hw);
            const double m = 2.0 * phi.dot(w) + w.squaredNorm();
            c2 = nu2 + m;
            const double kinetic = (nu2 * (2.0 * hphi.dot(w) + hw.dot(w)) - a * m) / (nu2 * c2);
            const double dq =
                (w.array() * (candidate + phi).array() * (candidate.array().square() + phi.array().square())).sum();
            const double interaction = (dq * nu2 * nu2 - q4 * m * (c2 + nu2)) / (nu2 * nu2 * c2 * c2);
            change = kinetic + u * interaction;
            if (change <= -opts.armijo * step * gnorm * gnorm) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;

        const double scale = 1.0 / std::sqrt(c2);
        phi = scale * candidate;
        hphi = scale * (hphi + hw);
        energy += change;
        last_relative_change = std::abs(change) / std::max(std::abs(energy), 1e-300);
        if (opts.record_trace) result.trace.push_back(energy);
        if ((it + 1) % 4096 == 0) h.apply(phi, hphi);
    }

    result.iterations = it;
    result.minimizer = std::move(phi);
    result.energy = gp_energy(p, result.minimizer);
    if (!result.converged) {
        RealField g = gp_gradient(p, result.minimizer);
        result.gradient_norm = (g - g.dot(result.minimizer) * result.minimizer).norm();
    }
    return result;
}

CondensationCertificate certificate(const GPProblem& p, const EigenSolution& eig, const GPResult& gp)
{
    if (eig.count() < 2) throw std::invalid_argument("certificate: need the two lowest eigenpairs");
    check_size(p, gp.minimizer, "certificate");

    CondensationCertificate c;
    c.e0 = eig.eigenvalues[0];
    c.e1 = eig.eigenvalues[1];
    c.e_gp = gp.energy;

    const RealField phi0 = eig.vector(0);
    const double projection = phi0.dot(gp.minimizer);
    c.ground_component = std::abs(projection);
    c.excited_component = (gp.minimizer - projection * phi0).norm();
    c.overlap = c.ground_component;

    c.valid = c.e1 > c.e_gp && (c.e1 - c.e0) >= kResolvableGap;
    c.margin = (c.e_gp - c.e0) * c.ground_component - (c.e1 - c.e_gp) * c.excited_component;
    c.holds = !c.valid || c.margin >= -kCertificateSlack;
    c.squared_margin = (c.e_gp - c.e0) * c.ground_component * c.ground_component -
                       (c.e1 - c.e_gp) * c.excited_component * c.excited_component;
    c.squared_holds = !c.valid || c.squared_margin >= -kCertificateSlack;
    return c;
}

}  // namespace gplab
