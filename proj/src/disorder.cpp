#include "gplab/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gplab/rng.hpp"

namespace gplab {

std::string to_string(DistributionKind kind)
{
    switch (kind) {
    case DistributionKind::Uniform: return "uniform";
    case DistributionKind::Bernoulli: return "bernoulli";
    case DistributionKind::DiscreteUniform: return "discrete";
    }
    return "unknown";
}

DistributionKind parse_distribution(const std::string& name)
{
    if (name == "uniform") return DistributionKind::Uniform;
    if (name == "bernoulli") return DistributionKind::Bernoulli;
    if (name == "discrete") return DistributionKind::DiscreteUniform;
    throw std::invalid_argument("unknown distribution '" + name + "'");
}

void DisorderSpec::validate() const
{
    if (!(v_max > 0.0) || !std::isfinite(v_max))
        throw std::invalid_argument("disorder: v_max must be positive and finite");
    switch (kind) {
    case DistributionKind::Uniform: break;
    case DistributionKind::Bernoulli:
        if (!(bernoulli_p >= 0.0 && bernoulli_p <= 1.0))
            throw std::invalid_argument("disorder: Bernoulli probability must lie in [0, 1]");
        break;
    case DistributionKind::DiscreteUniform:
        if (levels.empty()) throw std::invalid_argument("disorder: discrete distribution needs levels");
        for (double level : levels)
            if (!(level >= 0.0 && level <= v_max))
                throw std::invalid_argument("disorder: discrete levels must lie in [0, v_max]");
        break;
    }
}

double DisorderSpec::draw(double u) const
{
    switch (kind) {
    case DistributionKind::Uniform: return u * v_max;
    case DistributionKind::Bernoulli: return u < bernoulli_p ? v_max : 0.0;
    case DistributionKind::DiscreteUniform: {
        auto k = static_cast<std::size_t>(u * static_cast<double>(levels.size()));
        return levels[std::min(k, levels.size() - 1)];
    }
    }
    return 0.0;
}

DisorderRealization sample_potential(const DisorderSpec& spec,
                                     std::shared_ptr<const LatticeGeometry> geom,
                                     std::uint32_t l_index, std::uint32_t sample_index)
{
    spec.validate();
    CounterStream stream(spec.seed, l_index, sample_index, kPotentialStream);
    RealField v(geom->n_sites());
    for (Index s = 0; s < v.size(); ++s) v[s] = spec.draw(stream.uniform(static_cast<std::uint64_t>(s)));
    return {std::move(geom), std::move(v), Provenance{spec.seed, l_index, sample_index}};
}

DisorderRealization zero_potential(std::shared_ptr<const LatticeGeometry> geom)
{
    RealField v = RealField::Zero(geom->n_sites());
    return {std::move(geom), std::move(v), Provenance{}};
}

Index Region::n_sites(int dim) const
{
    Index n = 1;
    for (int j = 0; j < dim; ++j) n *= extent[j];
    return n;
}

Region whole_torus(const LatticeGeometry& geom)
{
    Region r;
    for (int j = 0; j < geom.dim(); ++j) {
        r.lower[j] = -geom.half_side();
        r.extent[j] = geom.side();
    }
    r.boundary = BoundaryCondition::Periodic;
    return r;
}

std::vector<Region> partition_into_boxes(const LatticeGeometry& geom, int ell, BoundaryCondition boundary)
{
    const int L = geom.half_side();
    const int side = geom.side();
    if (ell < 1 || ell > side)
        throw std::invalid_argument("partition_into_boxes: ell must lie in [1, 2L+1]");
    if (boundary == BoundaryCondition::Periodic)
        throw std::invalid_argument("partition_into_boxes: boxes carry Neumann or Dirichlet conditions");

    // Cutting into floor(2L/ell) pieces keeps every length in [ell, 2 ell].
    const int count = std::max(1, (2 * L) / ell);
    std::vector<int> starts, lengths;
    int base = side / count, extra = side % count, pos = -L;
    for (int i = 0; i < count; ++i) {
        int len = base + (i < extra ? 1 : 0);
        starts.push_back(pos);
        lengths.push_back(len);
        pos += len;
    }

    std::vector<Region> regions;
    Index total = 1;
    for (int j = 0; j < geom.dim(); ++j) total *= count;
    regions.reserve(total);
    for (Index idx = 0; idx < total; ++idx) {
        Region r;
        r.boundary = boundary;
        Index rem = idx;
        for (int j = 0; j < geom.dim(); ++j) {
            int piece = static_cast<int>(rem % count);
            rem /= count;
            r.lower[j] = starts[piece];
            r.extent[j] = lengths[piece];
        }
        regions.push_back(r);
    }
    return regions;
}

HamiltonianOperator restrict_hamiltonian(const DisorderRealization& realization, const Region& region)
{
    const LatticeGeometry& geom = *realization.geometry;
    const int d = geom.dim();
    const std::uint64_t seed = realization.provenance.master_seed ^
                               (static_cast<std::uint64_t>(realization.provenance.l_index) << 32) ^
                               realization.provenance.sample_index;

    if (region.boundary == BoundaryCondition::Periodic) {
        if (!(region == whole_torus(geom)))
            throw std::invalid_argument("restrict_hamiltonian: periodic conditions need the whole torus");
        const Index n = geom.n_sites();
        std::vector<Index> sites(n), offsets(n + 1), columns;
        columns.reserve(n * geom.degree());
        RealField diag(n);
        for (Index s = 0; s < n; ++s) {
            sites[s] = s;
            offsets[s] = static_cast<Index>(columns.size());
            diag[s] = geom.degree() + realization.potential[s];
            for (Index y : geom.neighbors(s)) columns.push_back(y);
        }
        offsets[n] = static_cast<Index>(columns.size());
        return HamiltonianOperator(BoundaryCondition::Periodic, std::move(sites), std::move(diag),
                                   std::move(offsets), std::move(columns), seed);
    }

    for (int j = 0; j < d; ++j) {
        if (region.extent[j] < 1) throw std::invalid_argument("restrict_hamiltonian: empty region");
        if (region.lower[j] < -geom.half_side() ||
            region.lower[j] + region.extent[j] - 1 > geom.half_side())
            throw std::invalid_argument("restrict_hamiltonian: region leaves the lattice or wraps");
    }

    const Index n = region.n_sites(d);
    auto local_index = [&](const Coord& x) -> Index {
        Index idx = 0;
        for (int j = d - 1; j >= 0; --j) {
            int off = x[j] - region.lower[j];
            if (off < 0 || off >= region.extent[j]) return -1;
            idx = idx * region.extent[j] + off;
        }
        return idx;
    };

    std::vector<Index> sites(n), offsets(n + 1), columns;
    RealField diag(n);
    for (Index i = 0; i < n; ++i) {
        Coord x{0, 0, 0};
        Index rem = i;
        for (int j = 0; j < d; ++j) {
            x[j] = region.lower[j] + static_cast<int>(rem % region.extent[j]);
            rem /= region.extent[j];
        }
        sites[i] = geom.site(x);
        offsets[i] = static_cast<Index>(columns.size());
        int local_degree = 0;
        for (int j = 0; j < d; ++j) {
            for (int step : {-1, 1}) {
                Coord y = x;
                y[j] += step;
                Index k = local_index(y);
                if (k >= 0) {
                    columns.push_back(k);
                    ++local_degree;
                }
            }
        }
        const double kinetic = region.boundary == BoundaryCondition::Neumann ? local_degree : geom.degree();
        diag[i] = kinetic + realization.potential[sites[i]];
    }
    offsets[n] = static_cast<Index>(columns.size());
    return HamiltonianOperator(region.boundary, std::move(sites), std::move(diag), std::move(offsets),
                               std::move(columns), seed);
}

HamiltonianOperator periodic_hamiltonian(const DisorderRealization& realization)
{
    return restrict_hamiltonian(realization, whole_torus(*realization.geometry));
}

}  // namespace gplab
