#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "gplab/disorder.hpp"
#include "gplab/gp.hpp"
#include "gplab/spectral.hpp"
#include "oracles.hpp"

using namespace gplab;

namespace {

std::shared_ptr<const LatticeGeometry> lattice(int d, int L)
{
    return std::make_shared<const LatticeGeometry>(d, L);
}

GPOptions options_for(int d, double v_max = 1.0)
{
    GPOptions o;
    o.dim = d;
    o.v_max = v_max;
    return o;
}

double quartic(const RealField& u) { return u.array().square().square().sum(); }

}  // namespace

TEST_CASE("gp_energy examples")
{
    auto g = lattice(2, 4);
    auto h0 = periodic_hamiltonian(zero_potential(g));
    const double n = static_cast<double>(g->n_sites());
    RealField flat = RealField::Constant(g->n_sites(), 1.0 / std::sqrt(n));
    for (double u : {0.0, 0.5, 3.0})
        CHECK(gp_energy(GPProblem(h0, u), flat) == doctest::Approx(u / n).epsilon(1e-13));

    std::mt19937_64 rng(1);
    auto r = sample_potential(DisorderSpec{.seed = 4}, g, 0, 0);
    auto h = periodic_hamiltonian(r);
    for (int trial = 0; trial < 10; ++trial) {
        RealField phi = oracle::random_unit_field(h.size(), rng);
        CHECK(gp_energy(GPProblem(h, 0.0), phi) == h.apply(phi).dot(phi));

        // Kinetic part from the Fourier side, potential and interaction site-wise.
        ComplexField hat = oracle::naive_dft(*g, phi.cast<std::complex<double>>());
        double kinetic = 0.0;
        for (Index s = 0; s < g->n_sites(); ++s) kinetic += laplacian_symbol(*g, g->coords(s)) * std::norm(hat[s]);
        double expected = kinetic + (r.potential.array() * phi.array().square()).sum() + quartic(phi);
        CHECK(std::abs(gp_energy(GPProblem(h, 1.0), phi) - expected) <= 1e-10);
    }

    CHECK_THROWS_AS(gp_energy(GPProblem(h, 1.0), RealField(RealField::Zero(3))), std::invalid_argument);
    CHECK_THROWS_AS(GPProblem(h, -1.0), std::invalid_argument);
}

TEST_CASE("gp_gradient: eigenvectors, small fields and finite differences")
{
    auto g = lattice(1, 20);
    auto h = periodic_hamiltonian(sample_potential(DisorderSpec{.seed = 6}, g, 0, 0));
    auto eig = dense_oracle(h);
    for (Index i = 0; i < 3; ++i) {
        RealField v = eig.vector(i);
        CHECK((gp_gradient(GPProblem(h, 0.0), v) - 2.0 * eig.eigenvalues[i] * v).norm() <= 1e-10);
    }

    std::mt19937_64 rng(2);
    RealField tiny = 1e-4 * oracle::random_unit_field(h.size(), rng);
    RealField linear = 2.0 * h.apply(tiny);
    CHECK((gp_gradient(GPProblem(h, 1.0), tiny) - linear).norm() <= 1e-6 * linear.norm());

    GPProblem p(h, 1.3);
    auto energy = [&](const RealField& phi) { return gp_energy(p, phi); };
    double worst = 0.0;
    for (int probe = 0; probe < 50; ++probe) {
        RealField x = oracle::random_unit_field(h.size(), rng);
        RealField v = oracle::random_unit_field(h.size(), rng);
        const double analytic = gp_gradient(p, x).dot(v);
        const double numeric = oracle::central_difference(energy, x, v, 1e-5);
        worst = std::max(worst, std::abs(analytic - numeric) / std::max(std::abs(analytic), 1e-3));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("U = 0 reduces to the linear ground state")
{
    DisorderSpec spec{.seed = 12};
    for (auto [d, L] : {std::pair{1, 64}, {2, 8}}) {
        auto g = lattice(d, L);
        for (std::uint32_t s = 0; s < 5; ++s) {
            auto h = periodic_hamiltonian(sample_potential(spec, g, 0, s));
            auto eig = lowest_eigenpairs(h, 2);
            GPProblem p(h, 0.0);
            auto gp = minimize_gp(p, eig.vector(0), options_for(d));
            CHECK(gp.converged);
            CHECK(std::abs(gp.energy - eig.eigenvalues[0]) <= 1e-10);
            CHECK(std::abs(eig.vector(0).dot(gp.minimizer)) >= 1.0 - 1e-8);

            auto cold = minimize_gp(p, std::nullopt, options_for(d));
            CHECK(cold.converged);
            CHECK(std::abs(eig.vector(0).dot(cold.minimizer)) >= 1.0 - 1e-8);

            auto c = certificate(p, eig, gp);
            CHECK(c.excited_component <= 1e-8);
            CHECK(c.overlap >= 1.0 - 1e-8);
        }
    }
}

TEST_CASE("free chain at U = 1 matches a brute-force sphere search")
{
    auto g = lattice(1, 8);
    auto h = periodic_hamiltonian(zero_potential(g));
    GPProblem p(h, 1.0);
    auto gp = minimize_gp(p, std::nullopt, options_for(1, 0.0));
    CHECK(gp.converged);
    const double brute = oracle::brute_force_gp_minimum(h.dense(), 1.0, 100, 3);
    CHECK(std::abs(gp.energy - brute) <= 1e-6);
    CHECK(gp.energy <= 1.0 / 17.0 + 1e-12);
}

TEST_CASE("disordered instances match the brute-force oracle")
{
    DisorderSpec spec{.seed = 44};
    auto g = lattice(1, 6);
    for (std::uint32_t s = 0; s < 4; ++s) {
        auto h = periodic_hamiltonian(sample_potential(spec, g, 0, s));
        for (double u : {0.3, 2.0}) {
            GPProblem p(h, u);
            auto gp = minimize_gp(p, std::nullopt, options_for(1));
            CHECK(gp.converged);
            CHECK(std::abs(gp.energy - oracle::brute_force_gp_minimum(h.dense(), u, 30, s)) <= 1e-6);
        }
    }
}

TEST_CASE("minimizer invariants: sandwich, monotone trace, positivity")
{
    DisorderSpec spec{.seed = 5};
    for (auto [d, L] : {std::pair{1, 40}, {2, 7}, {3, 3}}) {
        auto g = lattice(d, L);
        for (std::uint32_t s = 0; s < 4; ++s) {
            auto h = periodic_hamiltonian(sample_potential(spec, g, 2, s));
            auto eig = lowest_eigenpairs(h, 2);
            const double l4 = quartic(eig.vector(0));
            for (double u : {0.01, 0.5, 5.0}) {
                GPProblem p(h, u);
                auto gp = minimize_gp(p, eig.vector(0), options_for(d));
                CHECK(gp.converged);
                CHECK(gp.energy >= eig.eigenvalues[0] - 1e-9);
                CHECK(gp.energy <= eig.eigenvalues[0] + u * l4 + 1e-9);
                CHECK(std::abs(gp.minimizer.norm() - 1.0) <= 1e-12);
                CHECK(gp.minimizer.minCoeff() >= 0.0);
                CHECK(gp.gradient_norm <= 1e-9);
                for (std::size_t i = 1; i < gp.trace.size(); ++i) CHECK(gp.trace[i] <= gp.trace[i - 1]);
                CHECK(std::abs(gp.trace.back() - gp.energy) <= 1e-10);
            }
        }
    }
}

TEST_CASE("GP energy is monotone in the coupling")
{
    DisorderSpec spec{.seed = 71};
    auto g = lattice(1, 30);
    for (std::uint32_t s = 0; s < 10; ++s) {
        auto h = periodic_hamiltonian(sample_potential(spec, g, 0, s));
        auto eig = lowest_eigenpairs(h, 2);
        double previous = -1.0;
        for (double u : {0.05, 0.5, 2.0}) {
            auto gp = minimize_gp(GPProblem(h, u), eig.vector(0), options_for(1));
            CHECK(gp.energy >= previous - 1e-10);
            previous = gp.energy;
        }
    }
}

TEST_CASE("independent random starts reach the same minimizer")
{
    DisorderSpec spec{.seed = 90};
    for (auto [d, L] : {std::pair{1, 32}, {2, 6}}) {
        auto g = lattice(d, L);
        for (std::uint32_t s = 0; s < 5; ++s) {
            auto h = periodic_hamiltonian(sample_potential(spec, g, 0, s));
            GPProblem p(h, 1.0);
            auto a = minimize_gp(p, random_positive_field(h.size(), 1, s), options_for(d));
            auto b = minimize_gp(p, random_positive_field(h.size(), 2, s), options_for(d));
            CHECK(a.converged);
            CHECK(b.converged);
            CHECK((a.minimizer.cwiseAbs() - b.minimizer.cwiseAbs()).norm() <= 1e-6);
        }
    }
}

TEST_CASE("random_positive_field")
{
    RealField a = random_positive_field(50, 7, 3);
    CHECK(a.minCoeff() > 0.0);
    CHECK(std::abs(a.norm() - 1.0) <= 1e-14);
    CHECK(a == random_positive_field(50, 7, 3));
    CHECK(a != random_positive_field(50, 7, 4));
}

TEST_CASE("an exhausted budget is reported, not hidden")
{
    auto h = periodic_hamiltonian(sample_potential(DisorderSpec{.seed = 1}, lattice(1, 50), 0, 0));
    GPOptions o = options_for(1);
    o.max_iterations = 3;
    auto gp = minimize_gp(GPProblem(h, 1.0), std::nullopt, o);
    CHECK_FALSE(gp.converged);
    CHECK(gp.iterations == 3);
    CHECK(gp.trace.size() == 4);
    CHECK(gp.gradient_norm > o.gradient_tol);
}

TEST_CASE("certificate: Pythagoras, validity and the projection bound")
{
    std::mt19937_64 rng(3);
    auto g = lattice(1, 24);
    auto h = periodic_hamiltonian(sample_potential(DisorderSpec{.seed = 23}, g, 0, 0));
    auto eig = lowest_eigenpairs(h, 2);
    GPProblem p(h, 0.7);
    for (int trial = 0; trial < 20; ++trial) {
        GPResult fake;
        fake.minimizer = oracle::random_unit_field(h.size(), rng);
        fake.energy = gp_energy(p, fake.minimizer);
        auto c = certificate(p, eig, fake);
        CHECK(std::abs(c.ground_component * c.ground_component + c.excited_component * c.excited_component - 1.0) <=
              1e-10);
        CHECK(c.valid == (eig.eigenvalues[1] > fake.energy));
    }

    // The squared form follows from E_GP >= <H phi, phi> >= E_0 a^2 + E_1 b^2.
    auto gp = minimize_gp(p, eig.vector(0), options_for(1));
    auto c = certificate(p, eig, gp);
    CHECK(c.squared_holds);
    CHECK(c.squared_margin >= -kCertificateSlack);

    EigenSolution degenerate = eig;
    degenerate.eigenvalues[1] = degenerate.eigenvalues[0];
    auto tie = certificate(p, degenerate, gp);
    CHECK_FALSE(tie.valid);
    CHECK(tie.holds);
}
