#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gplab/analysis.hpp"
#include "gplab/disorder.hpp"
#include "oracles.hpp"

using namespace gplab;

namespace {

std::shared_ptr<const LatticeGeometry> lattice(int d, int L)
{
    return std::make_shared<const LatticeGeometry>(d, L);
}

RealField flat_field(Index n) { return RealField::Constant(n, 1.0 / std::sqrt(static_cast<double>(n))); }

}  // namespace

TEST_CASE("lp norms")
{
    for (auto [d, L] : {std::pair{1, 5}, {2, 3}}) {
        auto g = build_lattice(d, L);
        RealField flat = flat_field(g.n_sites());
        CHECK(std::pow(lp_norm(flat, Norm::L4), 4) == doctest::Approx(1.0 / g.n_sites()).epsilon(1e-13));
        RealField delta = RealField::Zero(g.n_sites());
        delta[3] = -1.0;
        for (Norm p : {Norm::L2, Norm::L4, Norm::LInf}) CHECK(lp_norm(delta, p) == 1.0);
    }
    RealField v(3);
    v << 3.0, -4.0, 0.0;
    CHECK(lp_norm(v, parse_norm("2")) == doctest::Approx(5.0));
    CHECK(lp_norm(v, parse_norm("inf")) == 4.0);
    CHECK(lp_norm(v, parse_norm("4")) == doctest::Approx(std::pow(81.0 + 256.0, 0.25)));
    CHECK_THROWS_AS(parse_norm("3"), std::invalid_argument);
}

TEST_CASE("scale functions")
{
    CHECK(scale_f(16.0, 3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(scale_g(0.25, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(scale_g(0.1, 5) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(scale_f(std::exp(2.0), 4) == doctest::Approx(std::exp(-0.5) * 2.0));
    CHECK(scale_g(0.1, 4) == doctest::Approx(0.1 * std::log(10.0)));
    CHECK(scale_f(32.0, 5) == doctest::Approx(0.5));
    CHECK(scale_g(0.0625, 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(scale_f(0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(scale_g(-0.1, 2), std::invalid_argument);
}

TEST_CASE("delta-perturbed trial field")
{
    for (double eps : {0.5, 0.2, 0.1}) {
        auto g = build_lattice(1, 256);
        RealField u = delta_trial_field(g, eps);
        CHECK(u.norm() >= 1.0 - 1e-12);
        CHECK(u.norm() <= 1.0 + eps);
        CHECK(lp_norm(u, Norm::L4) >= eps);
    }
}

TEST_CASE("shell decomposition: examples and exact partition")
{
    auto g = build_lattice(1, 64);
    auto flat = shell_decompose(g, flat_field(g.n_sites()), 0.1);
    CHECK(flat.k_eps == 3);
    CHECK(flat.shell_norm2[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 1; k < flat.shells.size(); ++k) CHECK(flat.shell_norm2[k] <= 1e-24);

    std::mt19937_64 rng(4);
    for (auto [d, L] : {std::pair{1, 64}, {2, 12}, {3, 5}}) {
        auto geom = build_lattice(d, L);
        for (double eps : {0.9, 0.4, 0.21}) {
            if (eps * L < 1.0) continue;
            RealField u = oracle::random_unit_field(geom.n_sites(), rng);
            auto sd = shell_decompose(geom, u, eps);
            CHECK(sd.k_eps >= -std::log(eps));
            CHECK(sd.k_eps < -std::log(eps) + 1.0);
            REQUIRE(sd.shells.size() == static_cast<std::size_t>(sd.k_eps + 1));
            RealField sum = RealField::Zero(u.size());
            double mass = 0.0;
            for (std::size_t k = 0; k < sd.shells.size(); ++k) {
                sum += sd.shells[k];
                mass += sd.shell_norm2[k];
                for (std::size_t j = k + 1; j < sd.shells.size(); ++j)
                    CHECK(std::abs(sd.shells[k].dot(sd.shells[j])) <= 1e-12);
            }
            CHECK((sum - u).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(sd.shell_energy <= shell_energy_constant(geom) * sd.kinetic * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("shell decomposition: frequency supports match the shell boundaries")
{
    auto g = build_lattice(1, 100);
    const double eps = 0.05;  // eps L = 5, shell edges 5, 13.6, 36.9
    auto band = [&](int gamma) {
        ComplexField c = ComplexField::Zero(g.n_sites());
        c[g.site({gamma, 0, 0})] = std::sqrt(0.5);
        c[g.site({-gamma, 0, 0})] = std::sqrt(0.5);
        return RealField(idft(g, c).real());
    };
    auto shell_of = [&](int gamma) {
        auto sd = shell_decompose(g, band(gamma), eps);
        for (std::size_t k = 0; k < sd.shells.size(); ++k)
            if (sd.shell_norm2[k] > 0.5) return static_cast<int>(k);
        return -1;
    };
    CHECK(shell_of(4) == 0);
    CHECK(shell_of(5) == 1);
    CHECK(shell_of(13) == 1);
    CHECK(shell_of(14) == 2);
    CHECK(shell_of(36) == 2);
    CHECK(shell_of(37) == 3);
    CHECK(shell_of(100) == 3);
}

TEST_CASE("shell decomposition: preconditions")
{
    auto g = build_lattice(1, 10);
    RealField u = flat_field(g.n_sites());
    CHECK_THROWS_AS(shell_decompose(g, u, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(shell_decompose(g, 2.0 * u, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(shell_decompose(g, u, 1.0), std::invalid_argument);
}

TEST_CASE("random low-energy fields satisfy the sup bounds per shell")
{
    for (auto [d, L] : {std::pair{1, 512}, {2, 30}, {3, 8}}) {
        auto g = build_lattice(d, L);
        for (double eps : {0.5, 0.2}) {
            for (std::uint32_t i = 0; i < 20; ++i) {
                RealField u = random_low_energy_field(g, eps, 9, i);
                CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
                auto sd = shell_decompose(g, u, eps);
                CHECK(sd.kinetic <= eps * eps * (1.0 + 1e-12));
                CHECK(sd.sup_bounds_hold(1e-9));
                CHECK(four_norm_bound_check(g, u, eps).preconditions_hold);
            }
        }
    }
    auto g = build_lattice(1, 40);
    CHECK(random_low_energy_field(g, 0.3, 5, 2) == random_low_energy_field(g, 0.3, 5, 2));
    CHECK(random_low_energy_field(g, 0.3, 5, 2) != random_low_energy_field(g, 0.3, 5, 3));
}

TEST_CASE("four-norm bound: trial families and the constant field")
{
    auto g = build_lattice(1, 256);
    for (double eps : {0.5, 0.2, 0.1}) {
        RealField u = flat_fourier_trial_field(g, eps);
        CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
        auto rep = four_norm_bound_check(g, u, eps);
        CHECK(rep.ratio >= 0.1);
        CHECK(rep.ratio <= 10.0);

        auto flat = four_norm_bound_check(g, flat_field(g.n_sites()), eps);
        CHECK(flat.preconditions_hold);
        CHECK(flat.ratio == doctest::Approx(std::pow(513.0, -0.25) / std::pow(eps, 0.25)).epsilon(1e-12));
    }
    auto bad = four_norm_bound_check(g, 2.0 * flat_field(g.n_sites()), 0.001);
    CHECK_FALSE(bad.preconditions_hold);
    CHECK(bad.violations.size() == 2);
}

TEST_CASE("localization center and decay fit")
{
    auto g = build_lattice(1, 30);
    RealField delta = RealField::Zero(g.n_sites());
    delta[g.site({7, 0, 0})] = 1.0;
    auto rep = localization_center(g, delta);
    CHECK(rep.center_coords[0] == 7);
    CHECK(std::isinf(rep.decay_rate));
    CHECK(rep.fit_points == 0);

    RealField profile(g.n_sites());
    for (Index s = 0; s < g.n_sites(); ++s) profile[s] = 0.3 * std::exp(-0.5 * std::abs(g.coords(s)[0]));
    auto exp_rep = localization_center(g, profile);
    CHECK(exp_rep.center_coords[0] == 0);
    CHECK(std::abs(exp_rep.decay_rate - 0.5) <= 1e-3);
    CHECK(exp_rep.fit_residual <= 1e-10);

    // Same profile centered near the seam of the torus.
    RealField shifted(g.n_sites());
    for (Index s = 0; s < g.n_sites(); ++s) shifted[s] = std::exp(-0.5 * g.torus_distance(s, g.site({29, 0, 0})));
    auto seam = localization_center(g, shifted);
    CHECK(seam.center_coords[0] == 29);
    CHECK(std::abs(seam.decay_rate - 0.5) <= 1e-3);

    RealField tie = RealField::Constant(g.n_sites(), 0.1);
    tie[g.site({4, 0, 0})] = 1.0;
    tie[g.site({-3, 0, 0})] = -1.0;
    CHECK(localization_center(g, tie).center_coords[0] == -3);

    auto g2 = build_lattice(2, 5);
    RealField tie2 = RealField::Zero(g2.n_sites());
    tie2[g2.site({1, -2, 0})] = 1.0;
    tie2[g2.site({1, -4, 0})] = 1.0;
    tie2[g2.site({2, -5, 0})] = 1.0;
    CHECK(localization_center(g2, tie2).center == g2.site({1, -4, 0}));

    CHECK_THROWS_AS(localization_center(g, RealField(RealField::Zero(g.n_sites()))), std::invalid_argument);
}

TEST_CASE("gap and overlap")
{
    for (auto [d, L] : {std::pair{1, 20}, {2, 6}}) {
        auto g = lattice(d, L);
        auto h = periodic_hamiltonian(zero_potential(g));
        auto eig = lowest_eigenpairs(h, 2);
        auto gp = minimize_gp(GPProblem(h, 0.0), eig.vector(0));
        auto go = gap_and_overlap(*g, eig, gp);
        CHECK(go.gap == doctest::Approx(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi / (2 * L + 1))).epsilon(1e-8));
        CHECK(go.flatness <= 1e-12);
        CHECK(go.ground_l4_4 == doctest::Approx(1.0 / g->n_sites()).epsilon(1e-8));
        CHECK(go.overlap >= 1.0 - 1e-8);
    }

    auto g = lattice(1, 8);
    auto h = periodic_hamiltonian(sample_potential(DisorderSpec{.seed = 2718}, g, 0, 0));
    auto eig = lowest_eigenpairs(h, 2);
    auto gp = minimize_gp(GPProblem(h, 0.4), eig.vector(0));
    auto go = gap_and_overlap(*g, eig, gp);

    auto dense = dense_oracle(h);
    RealField phi0 = dense.vector(0);
    CHECK(std::abs(go.gap - (dense.eigenvalues[1] - dense.eigenvalues[0])) <= 1e-8);
    CHECK(std::abs(go.overlap - std::abs(phi0.dot(gp.minimizer))) <= 1e-8);
    CHECK(std::abs(go.flatness - phi0.dot(oracle::dense_neg_laplacian(*g) * phi0)) <= 1e-8);
    CHECK(std::abs(go.ground_l4_4 - phi0.array().pow(4).sum()) <= 1e-8);

    GPResult flipped = gp;
    flipped.minimizer = -gp.minimizer;
    CHECK(gap_and_overlap(*g, eig, flipped).overlap == go.overlap);
    CHECK(go.overlap <= 1.0 + 1e-10);
}

TEST_CASE("flatness never exceeds the ground energy")
{
    DisorderSpec spec{.kind = DistributionKind::Bernoulli, .v_max = 3.0, .seed = 6};
    for (auto [d, L] : {std::pair{1, 100}, {2, 10}, {3, 4}}) {
        auto g = lattice(d, L);
        for (std::uint32_t s = 0; s < 10; ++s) {
            auto h = periodic_hamiltonian(sample_potential(spec, g, 0, s));
            auto eig = lowest_eigenpairs(h, 2);
            GPResult gp;
            gp.minimizer = eig.vector(0);
            CHECK(gap_and_overlap(*g, eig, gp).flatness <= eig.eigenvalues[0] + 1e-9);
        }
    }
}
