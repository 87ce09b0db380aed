#include "gplab/lattice.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

#include <fftw3.h>

namespace gplab {

namespace {

Index ipow(Index base, int exp)
{
    Index r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

// The FFTW planner is not re-entrant; execution with fftw_execute_dft is.
class PlanCache {
public:
    static PlanCache& instance()
    {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int dim, int side, int sign)
    {
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(dim, side, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        int n[kMaxDim] = {side, side, side};
        auto total = ipow(side, dim);
        auto* in = fftw_alloc_complex(total);
        auto* out = fftw_alloc_complex(total);
        fftw_plan plan = fftw_plan_dft(dim, n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache()
    {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

ComplexField transform(const LatticeGeometry& geom, const ComplexField& in, int sign)
{
    const Index n = geom.n_sites();
    std::vector<std::complex<double>> buf_in(n), buf_out(n);
    for (Index s = 0; s < n; ++s) buf_in[geom.fft_index(s)] = in[s];

    fftw_plan plan = PlanCache::instance().get(geom.dim(), geom.side(), sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf_in.data()),
                     reinterpret_cast<fftw_complex*>(buf_out.data()));

    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    ComplexField out(n);
    for (Index s = 0; s < n; ++s) out[s] = buf_out[geom.fft_index(s)] * scale;
    return out;
}

template <typename Field>
Field neg_laplacian_impl(const LatticeGeometry& geom, const Field& u)
{
    check_field_size(geom, u.size(), "apply_neg_laplacian");
    const double diag = geom.degree();
    Field v(u.size());
    for (Index s = 0; s < geom.n_sites(); ++s) {
        auto acc = diag * u[s];
        for (Index y : geom.neighbors(s)) acc -= u[y];
        v[s] = acc;
    }
    return v;
}

}  // namespace

LatticeGeometry::LatticeGeometry(int dim, int half_side)
    : dim_(dim), half_side_(half_side), side_(2 * half_side + 1)
{
    if (dim < 1 || dim > kMaxDim)
        throw std::invalid_argument("lattice dimension must be 1, 2 or 3, got " + std::to_string(dim));
    if (half_side < 1)
        throw std::invalid_argument("lattice half-side must be >= 1, got " + std::to_string(half_side));

    n_sites_ = ipow(side_, dim_);
    neighbors_.resize(n_sites_ * degree());
    fft_index_.resize(n_sites_);

    for (Index s = 0; s < n_sites_; ++s) {
        Coord x = coords(s);
        Index fft = 0;
        for (int j = dim_ - 1; j >= 0; --j) {
            int wrapped = ((x[j] % side_) + side_) % side_;
            fft = fft * side_ + wrapped;
        }
        fft_index_[s] = fft;

        for (int j = 0; j < dim_; ++j) {
            Coord lo = x, hi = x;
            lo[j] -= 1;
            hi[j] += 1;
            neighbors_[s * degree() + 2 * j] = site(lo);
            neighbors_[s * degree() + 2 * j + 1] = site(hi);
        }
    }
}

Coord LatticeGeometry::coords(Index s) const
{
    Coord x{0, 0, 0};
    for (int j = 0; j < dim_; ++j) {
        x[j] = static_cast<int>(s % side_) - half_side_;
        s /= side_;
    }
    return x;
}

Index LatticeGeometry::site(const Coord& x) const
{
    Index s = 0;
    for (int j = dim_ - 1; j >= 0; --j) {
        int shifted = ((x[j] + half_side_) % side_ + side_) % side_;
        s = s * side_ + shifted;
    }
    return s;
}

int LatticeGeometry::torus_distance(Index a, Index b) const
{
    Coord xa = coords(a), xb = coords(b);
    int dist = 0;
    for (int j = 0; j < dim_; ++j) {
        int diff = std::abs(xa[j] - xb[j]);
        dist += std::min(diff, side_ - diff);
    }
    return dist;
}

LatticeGeometry build_lattice(int dim, int half_side) { return LatticeGeometry(dim, half_side); }

void check_field_size(const LatticeGeometry& geom, Index size, const char* what)
{
    if (size != geom.n_sites())
        throw std::invalid_argument(std::string(what) + ": field has " + std::to_string(size) +
                                    " entries, geometry has " + std::to_string(geom.n_sites()) +
                                    " sites");
}

double laplacian_symbol(const LatticeGeometry& geom, const Coord& gamma)
{
    double h = 2.0 * geom.dim();
    for (int j = 0; j < geom.dim(); ++j)
        h -= 2.0 * std::cos(2.0 * std::numbers::pi * gamma[j] / geom.side());
    return h;
}

RealField laplacian_symbol_table(const LatticeGeometry& geom)
{
    RealField h(geom.n_sites());
    for (Index s = 0; s < geom.n_sites(); ++s) h[s] = laplacian_symbol(geom, geom.coords(s));
    return h;
}

RealField apply_neg_laplacian(const LatticeGeometry& geom, const RealField& u)
{
    return neg_laplacian_impl(geom, u);
}

ComplexField apply_neg_laplacian(const LatticeGeometry& geom, const ComplexField& u)
{
    return neg_laplacian_impl(geom, u);
}

ComplexField dft(const LatticeGeometry& geom, const ComplexField& u)
{
    check_field_size(geom, u.size(), "dft");
    return transform(geom, u, FFTW_FORWARD);
}

ComplexField dft(const LatticeGeometry& geom, const RealField& u)
{
    check_field_size(geom, u.size(), "dft");
    return transform(geom, u.cast<std::complex<double>>(), FFTW_FORWARD);
}

ComplexField idft(const LatticeGeometry& geom, const ComplexField& coeffs)
{
    check_field_size(geom, coeffs.size(), "idft");
    return transform(geom, coeffs, FFTW_BACKWARD);
}

ComplexField plane_wave(const LatticeGeometry& geom, const Coord& gamma)
{
    const double norm = 1.0 / std::sqrt(static_cast<double>(geom.n_sites()));
    ComplexField w(geom.n_sites());
    for (Index s = 0; s < geom.n_sites(); ++s) {
        Coord beta = geom.coords(s);
        double phase = 0.0;
        for (int j = 0; j < geom.dim(); ++j) phase += static_cast<double>(gamma[j]) * beta[j];
        w[s] = std::polar(norm, 2.0 * std::numbers::pi * phase / geom.side());
    }
    return w;
}

double dirichlet_energy(const LatticeGeometry& geom, const RealField& u)
{
    check_field_size(geom, u.size(), "dirichlet_energy");
    // Sum over undirected edges (each counted once via the +1 neighbor).
    double e = 0.0;
    for (Index s = 0; s < geom.n_sites(); ++s) {
        auto nb = geom.neighbors(s);
        for (int j = 0; j < geom.dim(); ++j) {
            double diff = u[s] - u[nb[2 * j + 1]];
            e += diff * diff;
        }
    }
    return e;
}

}  // namespace gplab
