#include "gplab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gplab/rng.hpp"

namespace gplab {

namespace {

int max_norm(const Coord& gamma, int dim)
{
    int r = 0;
    for (int j = 0; j < dim; ++j) r = std::max(r, std::abs(gamma[j]));
    return r;
}

bool lexicographically_less(const Coord& a, const Coord& b, int dim)
{
    for (int j = 0; j < dim; ++j) {
        if (a[j] != b[j]) return a[j] < b[j];
    }
    return false;
}

}  // namespace

double lp_norm(const RealField& u, Norm p)
{
    switch (p) {
    case Norm::L2: return u.norm();
    case Norm::L4: return std::sqrt(std::sqrt(u.array().square().square().sum()));
    case Norm::LInf: return u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
    }
    throw std::invalid_argument("lp_norm: unsupported norm");
}

Norm parse_norm(const std::string& p)
{
    if (p == "2") return Norm::L2;
    if (p == "4") return Norm::L4;
    if (p == "inf") return Norm::LInf;
    throw std::invalid_argument("lp_norm: unsupported exponent '" + p + "', expected 2, 4 or inf");
}

double scale_f(double xi, int dim)
{
    if (!(xi > 0.0)) throw std::invalid_argument("scale_f: argument must be positive");
    if (dim < 1) throw std::invalid_argument("scale_f: dimension must be positive");
    if (dim <= 3) return std::pow(xi, -0.25);
    if (dim == 4) return std::pow(xi, -0.25) * std::log(xi);
    return std::pow(xi, -1.0 / dim);
}

double scale_g(double eps, int dim)
{
    if (!(eps > 0.0)) throw std::invalid_argument("scale_g: argument must be positive");
    if (dim < 1) throw std::invalid_argument("scale_g: dimension must be positive");
    if (dim <= 3) return std::pow(eps, dim / 4.0);
    if (dim == 4) return eps * std::abs(std::log(eps));
    return eps;
}

bool ShellDecomposition::sup_bounds_hold(double slack) const
{
    for (std::size_t k = 1; k < shells.size(); ++k)
        if (shell_sup[k] > shell_sup_bound[k] * (1.0 + slack)) return false;
    return true;
}

double shell_energy_constant(const LatticeGeometry& geom)
{
    const double side = geom.side();
    const double l = geom.half_side();
    return side * side / (16.0 * l * l);
}

ShellDecomposition shell_decompose(const LatticeGeometry& geom, const RealField& u, double eps)
{
    check_field_size(geom, u.size(), "shell_decompose");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("shell_decompose: eps must lie in (0, 1)");
    const double eps_l = eps * geom.half_side();
    if (eps_l < 1.0) throw std::invalid_argument("shell_decompose: needs eps L >= 1");
    if (std::abs(u.norm() - 1.0) > 1e-10) throw std::invalid_argument("shell_decompose: field must be normalized");

    ShellDecomposition out;
    out.eps = eps;
    out.k_eps = static_cast<int>(std::ceil(-std::log(eps)));
    const int top = out.k_eps;

    // Shell boundaries b_k = e^k eps L; shell k >= 1 starts at b_{k-1}.
    std::vector<double> bound(top + 1);
    for (int k = 0; k <= top; ++k) bound[k] = std::exp(static_cast<double>(k)) * eps_l;

    const ComplexField coeffs = dft(geom, u);
    std::vector<ComplexField> masked(top + 1, ComplexField::Zero(geom.n_sites()));
    for (Index s = 0; s < geom.n_sites(); ++s) {
        const double r = max_norm(geom.coords(s), geom.dim());
        int k = 0;
        while (k < top && r >= bound[k]) ++k;
        masked[k][s] = coeffs[s];
    }

    const double d = geom.dim();
    for (int k = 0; k <= top; ++k) {
        RealField shell = idft(geom, masked[k]).real();
        const double n2 = shell.squaredNorm();
        out.shell_norm2.push_back(n2);
        out.shell_sup.push_back(shell.size() ? shell.cwiseAbs().maxCoeff() : 0.0);
        out.shell_sup_bound.push_back(std::sqrt(n2) * std::pow(std::exp(static_cast<double>(k)) * eps, d / 2.0));
        out.weighted_mass += std::exp(2.0 * k) * n2;
        if (k >= 1) out.shell_energy += std::exp(2.0 * k - 2.0) * eps * eps * n2;
        out.shells.push_back(std::move(shell));
    }
    out.kinetic = dirichlet_energy(geom, u);
    return out;
}

FourNormReport four_norm_bound_check(const LatticeGeometry& geom, const RealField& u, double eps)
{
    check_field_size(geom, u.size(), "four_norm_bound_check");
    FourNormReport rep;
    rep.four_norm = lp_norm(u, Norm::L4);
    rep.g = scale_g(eps, geom.dim());
    rep.ratio = rep.four_norm / rep.g;
    rep.kinetic = dirichlet_energy(geom, u);

    const double norm = u.norm();
    if (std::abs(norm - 1.0) > 1e-10) rep.violations.push_back("||u||_2 = " + std::to_string(norm) + " != 1");
    if (rep.kinetic > eps * eps * (1.0 + 1e-12))
        rep.violations.push_back("<-Delta u, u> = " + std::to_string(rep.kinetic) + " exceeds eps^2 = " +
                                 std::to_string(eps * eps));
    if (eps * geom.half_side() < 1.0)
        rep.violations.push_back("eps L = " + std::to_string(eps * geom.half_side()) + " < 1");
    if (!(eps < 1.0)) rep.violations.push_back("eps must be < 1");
    rep.preconditions_hold = rep.violations.empty();
    return rep;
}

double field_scale(const LatticeGeometry& geom, const RealField& u)
{
    return std::max(std::sqrt(std::max(dirichlet_energy(geom, u), 0.0)), 1.0 / geom.half_side());
}

LocalizationReport localization_center(const LatticeGeometry& geom, const RealField& u)
{
    check_field_size(geom, u.size(), "localization_center");
    LocalizationReport rep;

    double best = -1.0;
    for (Index s = 0; s < u.size(); ++s) {
        const double a = std::abs(u[s]);
        if (a > best || (a == best && lexicographically_less(geom.coords(s), geom.coords(rep.center), geom.dim()))) {
            best = a;
            rep.center = s;
        }
    }
    if (!(best > 0.0)) throw std::invalid_argument("localization_center: zero field");
    rep.center_coords = geom.coords(rep.center);

    // Least squares for log|u| = a - rate * r.
    double sr = 0, sy = 0, srr = 0, sry = 0;
    Index count = 0;
    std::vector<std::pair<double, double>> points;
    for (Index s = 0; s < u.size(); ++s) {
        const double a = std::abs(u[s]);
        const int r = geom.torus_distance(s, rep.center);
        if (r <= kDecayFitCore || a <= 1e-12) continue;
        const double y = std::log(a);
        points.emplace_back(r, y);
        sr += r;
        sy += y;
        srr += static_cast<double>(r) * r;
        sry += r * y;
        ++count;
    }
    rep.fit_points = count;
    const double denom = count * srr - sr * sr;
    if (count >= 2 && denom > 1e-12 * std::max(1.0, count * srr)) {
        const double slope = (count * sry - sr * sy) / denom;
        const double intercept = (sy - slope * sr) / count;
        rep.decay_rate = -slope;
        double ss = 0.0;
        for (auto [r, y] : points) {
            const double e = y - (intercept + slope * r);
            ss += e * e;
        }
        rep.fit_residual = std::sqrt(ss / count);
    }

    const double log_l = std::log(static_cast<double>(std::max(geom.half_side(), 2)));
    const double rate = std::isfinite(rep.decay_rate) ? rep.decay_rate : 0.0;
    double q = -std::numeric_limits<double>::infinity();
    for (Index s = 0; s < u.size(); ++s) {
        const double a = std::abs(u[s]);
        if (a <= 0.0) continue;
        if (!std::isfinite(rep.decay_rate) && s != rep.center) continue;
        q = std::max(q, (std::log(a) + rate * geom.torus_distance(s, rep.center)) / log_l);
    }
    rep.prefactor_exponent = q;
    return rep;
}

GapOverlap gap_and_overlap(const LatticeGeometry& geom, const EigenSolution& eig, const GPResult& gp)
{
    if (eig.count() < 2) throw std::invalid_argument("gap_and_overlap: need two eigenpairs");
    const RealField phi0 = eig.vector(0);
    GapOverlap g;
    g.gap = eig.eigenvalues[1] - eig.eigenvalues[0];
    g.overlap = std::abs(phi0.dot(gp.minimizer));
    g.flatness = dirichlet_energy(geom, phi0);
    g.ground_l4_4 = phi0.array().square().square().sum();
    return g;
}

RealField delta_trial_field(const LatticeGeometry& geom, double eps)
{
    RealField u = RealField::Constant(geom.n_sites(), 1.0 / std::sqrt(static_cast<double>(geom.n_sites())));
    u[geom.site({0, 0, 0})] = eps;
    return u;
}

RealField flat_fourier_trial_field(const LatticeGeometry& geom, double eps)
{
    const double radius = eps * geom.half_side();
    ComplexField coeffs = ComplexField::Zero(geom.n_sites());
    Index count = 0;
    for (Index s = 0; s < geom.n_sites(); ++s)
        if (max_norm(geom.coords(s), geom.dim()) <= radius) ++count;
    const double value = 1.0 / std::sqrt(static_cast<double>(count));
    for (Index s = 0; s < geom.n_sites(); ++s)
        if (max_norm(geom.coords(s), geom.dim()) <= radius) coeffs[s] = value;
    return idft(geom, coeffs).real();
}

RealField random_low_energy_field(const LatticeGeometry& geom, double eps, std::uint64_t seed, std::uint32_t index)
{
    if (!(eps > 0.0)) throw std::invalid_argument("random_low_energy_field: eps must be positive");
    CounterStream stream(seed, 0, index, kProbeStream);
    std::uint64_t draw = 0;
    auto uniform = [&] { return stream.uniform(draw++); };
    auto normal = [&] {
        const double r = std::sqrt(-2.0 * std::log1p(-uniform()));
        return r * std::cos(2.0 * std::numbers::pi * uniform());
    };

    const Index n = geom.n_sites();
    const double radius = (0.1 + 0.9 * uniform()) * eps * geom.half_side();
    const double disorder = uniform();
    const Coord peak = geom.coords(std::min<Index>(static_cast<Index>(uniform() * n), n - 1));

    ComplexField coeffs = ComplexField::Zero(n);
    for (Index s = 0; s < n; ++s) {
        const Coord gamma = geom.coords(s);
        if (max_norm(gamma, geom.dim()) > radius) continue;
        double phase = 0.0;
        for (int j = 0; j < geom.dim(); ++j) phase -= static_cast<double>(gamma[j]) * peak[j];
        phase = 2.0 * std::numbers::pi * (phase / geom.side() + disorder * uniform());
        coeffs[s] = std::polar(std::abs(normal()), phase);
    }
    RealField u = idft(geom, coeffs).real();
    if (!(u.norm() > 0.0)) u = RealField::Constant(n, 1.0);
    u /= u.norm();

    const double kinetic = dirichlet_energy(geom, u);
    const double target = eps * eps * (0.25 + 0.75 * uniform());
    if (kinetic > eps * eps) {
        const RealField flat = RealField::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
        RealField rest = u - u.dot(flat) * flat;
        rest /= rest.norm();
        // The constant mode carries no kinetic energy.
        const double alpha = std::sqrt(target / dirichlet_energy(geom, rest));
        u = alpha * rest + std::sqrt(1.0 - alpha * alpha) * flat;
    }
    return u;
}

}  // namespace gplab
