#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gplab/disorder.hpp"
#include "gplab/spectral.hpp"
#include "oracles.hpp"

using namespace gplab;

namespace {

std::shared_ptr<const LatticeGeometry> lattice(int d, int L)
{
    return std::make_shared<const LatticeGeometry>(d, L);
}

double first_excited_free(int L) { return 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi / (2 * L + 1)); }

void check_pairs(const HamiltonianOperator& h, const EigenSolution& sol, double tol)
{
    for (Index i = 0; i < sol.count(); ++i) {
        RealField v = sol.vector(i);
        CHECK(std::abs(v.norm() - 1.0) <= 1e-10);
        CHECK((h.apply(v) - sol.eigenvalues[i] * v).norm() <= tol);
        CHECK(v.sum() >= -1e-10);
        if (i > 0) CHECK(sol.eigenvalues[i] >= sol.eigenvalues[i - 1]);
    }
    Eigen::MatrixXd gram = sol.eigenvectors.transpose() * sol.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(sol.count(), sol.count())).cwiseAbs().maxCoeff() <= 1e-9);
}

}  // namespace

TEST_CASE("free Laplacian: ground state, first gap and its multiplicity")
{
    for (auto [d, L] : {std::pair{1, 8}, {1, 100}, {2, 6}, {2, 20}, {3, 4}}) {
        auto h = periodic_hamiltonian(zero_potential(lattice(d, L)));
        auto sol = lowest_eigenpairs(h, 2 * d + 1);
        CHECK(std::abs(sol.eigenvalues[0]) <= 1e-9);
        const double flat = 1.0 / std::sqrt(static_cast<double>(h.size()));
        CHECK((sol.vector(0) - RealField::Constant(h.size(), flat)).cwiseAbs().maxCoeff() <= 1e-8);
        for (int i = 1; i <= 2 * d; ++i)
            CHECK(std::abs(sol.eigenvalues[i] - first_excited_free(L)) <= 1e-8);
        check_pairs(h, sol, 1e-9);
    }
}

TEST_CASE("Dirichlet two-site chain has spectrum {1, 3}")
{
    auto chain = zero_potential(lattice(1, 2));
    Region two{.lower = {-2, 0, 0}, .extent = {2, 1, 1}};
    auto h = restrict_hamiltonian(chain, two);
    auto sol = lowest_eigenpairs(h, 2);
    CHECK(sol.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("iterative and dense solvers agree on disordered chains")
{
    DisorderSpec spec{.seed = 99};
    auto g = lattice(1, 8);
    for (std::uint32_t s = 0; s < 10; ++s) {
        auto h = periodic_hamiltonian(sample_potential(spec, g, 0, s));
        auto it = lowest_eigenpairs(h, 4);
        auto dense = dense_oracle(h);
        for (Index i = 0; i < 4; ++i) CHECK(std::abs(it.eigenvalues[i] - dense.eigenvalues[i]) <= 1e-8);
        check_pairs(h, it, 1e-9);
    }
}

TEST_CASE("iterative eigenvalues are contained in the dense spectrum")
{
    DisorderSpec spec{.kind = DistributionKind::Bernoulli, .v_max = 2.0, .seed = 5};
    for (auto [d, L] : {std::pair{1, 60}, {2, 10}, {3, 4}}) {
        auto h = periodic_hamiltonian(sample_potential(spec, lattice(d, L), 1, 0));
        auto it = lowest_eigenpairs(h, 6);
        RealField spectrum = dense_spectrum(h);
        for (Index i = 0; i < it.count(); ++i)
            CHECK((spectrum.array() - it.eigenvalues[i]).abs().minCoeff() <= 1e-8);
        CHECK(std::abs(it.eigenvalues[0] - spectrum[0]) <= 1e-8);
        check_pairs(h, it, 1e-9);
    }
}

TEST_CASE("dense oracle: symbol multiset and trace identity")
{
    for (auto [d, L] : {std::pair{1, 7}, {2, 4}, {3, 2}}) {
        auto g = lattice(d, L);
        RealField spectrum = dense_spectrum(periodic_hamiltonian(zero_potential(g)));
        RealField symbols = laplacian_symbol_table(*g);
        std::sort(symbols.begin(), symbols.end());
        CHECK((spectrum - symbols).cwiseAbs().maxCoeff() <= 1e-10);

        auto r = sample_potential(DisorderSpec{.seed = 3}, g, 0, 0);
        RealField disordered = dense_spectrum(periodic_hamiltonian(r));
        CHECK(std::abs(disordered.sum() - (2.0 * d * g->n_sites() + r.potential.sum())) <= 1e-9);
    }
    auto big = periodic_hamiltonian(zero_potential(lattice(1, 2049)));
    CHECK_THROWS_AS(dense_oracle(big), std::invalid_argument);
}

TEST_CASE("eigenvalue counts")
{
    auto g = lattice(1, 8);
    auto h0 = periodic_hamiltonian(zero_potential(g));
    CHECK(count_eigenvalues_in(h0, -0.1, 0.1) == 1);
    CHECK(count_eigenvalues_in(h0, -1.0, 5.0) == g->n_sites());
    CHECK(count_eigenvalues_in(h0, 0.0, first_excited_free(8) + 1e-9) == 3);
    CHECK(count_eigenvalues_in(h0, 0.5, 0.4) == 0);

    DisorderSpec spec{.seed = 17};
    auto h = periodic_hamiltonian(sample_potential(spec, lattice(2, 12), 0, 0));
    RealField spectrum = dense_spectrum(h);
    for (double shift : {0.1, 0.3, 1.0, 2.5, 4.0})
        CHECK(count_eigenvalues_below(h, shift) == (spectrum.array() < shift).count());

    // Beyond the dense limit the count comes from sparse inertia.
    auto large = periodic_hamiltonian(sample_potential(spec, lattice(2, 33), 0, 1));
    REQUIRE(large.size() > kDenseOracleLimit);
    auto low = lowest_eigenpairs(large, 6);
    for (Index m = 1; m < 6; ++m) {
        const double mid = 0.5 * (low.eigenvalues[m - 1] + low.eigenvalues[m]);
        if (low.eigenvalues[m] - low.eigenvalues[m - 1] < 1e-6) continue;
        CHECK(count_eigenvalues_in(large, -1.0, mid) == m);
    }
}

TEST_CASE("the iterative solver is deterministic")
{
    auto h = periodic_hamiltonian(sample_potential(DisorderSpec{.seed = 8}, lattice(2, 15), 0, 0));
    auto a = lowest_eigenpairs(h, 3);
    auto b = lowest_eigenpairs(h, 3);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenvectors == b.eigenvectors);
}

TEST_CASE("large one-dimensional chains")
{
    auto h = periodic_hamiltonian(sample_potential(DisorderSpec{.seed = 21}, lattice(1, 1024), 0, 0));
    auto sol = lowest_eigenpairs(h, 2);
    check_pairs(h, sol, 1e-9);
    CHECK(count_eigenvalues_below(h, sol.eigenvalues[0] - 1e-9) == 0);
}

TEST_CASE("an exhausted budget raises NotConvergedError")
{
    auto h = periodic_hamiltonian(sample_potential(DisorderSpec{.seed = 2}, lattice(1, 300), 0, 0));
    LanczosOptions opts;
    opts.max_iterations = 2;
    opts.basis_size = 12;
    try {
        lowest_eigenpairs(h, 2, opts);
        FAIL("expected NotConvergedError");
    } catch (const NotConvergedError& e) {
        CHECK(e.best_residuals().size() == 2);
        CHECK(e.best_residuals().maxCoeff() > opts.tol);
    }
    CHECK_THROWS_AS(lowest_eigenpairs(h, 0), std::invalid_argument);
}

TEST_CASE("fix_sign")
{
    RealField v(3);
    v << -1.0, 0.5, -0.2;
    fix_sign(v);
    CHECK(v.sum() > 0.0);
    RealField w(2);
    w << -1.0, 1.0;
    fix_sign(w);
    CHECK(w[0] > 0.0);
}
