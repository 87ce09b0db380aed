#include "gplab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "gplab/rng.hpp"

namespace gplab {

namespace {

// Krylov basis with the operator image of every column kept alongside, so
// Rayleigh-Ritz and residuals never need extra applications.
class KrylovBasis {
public:
    KrylovBasis(const HamiltonianOperator& h, Index capacity, std::uint64_t seed)
        : h_(h), q_(h.size(), capacity), hq_(h.size(), capacity),
          random_(seed, 0, 0, kStartVectorStream)
    {
    }

    Index size() const { return size_; }
    Index capacity() const { return q_.cols(); }
    Index last_block_start() const { return last_start_; }
    Index last_block_size() const { return size_ - last_start_; }
    Index applications() const { return applications_; }

    auto basis() const { return q_.leftCols(size_); }
    auto image() const { return hq_.leftCols(size_); }

    Eigen::MatrixXd random_block(Index cols)
    {
        Eigen::MatrixXd x(h_.size(), cols);
        for (Index c = 0; c < cols; ++c)
            for (Index i = 0; i < h_.size(); ++i) x(i, c) = 2.0 * random_.uniform(draw_++) - 1.0;
        return x;
    }

    // Orthonormalizes `block` against the basis and itself, appends the
    // surviving columns and their images. Deficient columns are replaced by
    // random directions while room remains in the space.
    void append(Eigen::MatrixXd block)
    {
        const Index n = h_.size();
        Index room = std::min(capacity(), n) - size_;
        if (block.cols() > room) block.conservativeResize(Eigen::NoChange, room);
        last_start_ = size_;
        for (Index c = 0; c < block.cols(); ++c) {
            RealField v = block.col(c);
            for (int attempt = 0; attempt < 8; ++attempt) {
                double before = v.norm();
                if (before > 0.0) {
                    for (int pass = 0; pass < 2; ++pass) {
                        if (size_ > 0) v -= q_.leftCols(size_) * (q_.leftCols(size_).transpose() * v);
                    }
                }
                double after = v.norm();
                if (before > 0.0 && after > 1e-10 * before && after > 1e-300) {
                    v /= after;
                    q_.col(size_) = v;
                    RealField hv(n);
                    h_.apply(v, hv);
                    ++applications_;
                    hq_.col(size_) = hv;
                    ++size_;
                    break;
                }
                v = random_block(1).col(0);
            }
            if (size_ >= std::min(capacity(), n)) break;
        }
    }

    // Replace the basis by Q * S (and images by HQ * S) for orthonormal S.
    void compress(const Eigen::MatrixXd& s)
    {
        const Index p = s.cols();
        Eigen::MatrixXd q = q_.leftCols(size_) * s;
        Eigen::MatrixXd hq = hq_.leftCols(size_) * s;
        q_.leftCols(p) = q;
        hq_.leftCols(p) = hq;
        size_ = p;
        last_start_ = p;
    }

    // Recompute images exactly after many restarts.
    void refresh_images()
    {
        for (Index c = 0; c < size_; ++c) {
            RealField hv(h_.size());
            h_.apply(q_.col(c), hv);
            hq_.col(c) = hv;
        }
    }

private:
    const HamiltonianOperator& h_;
    Eigen::MatrixXd q_, hq_;
    Index size_ = 0;
    Index last_start_ = 0;
    Index applications_ = 0;
    CounterStream random_;
    std::uint64_t draw_ = 0;
};

Index max_row_degree(const HamiltonianOperator& h)
{
    Index deg = 0;
    for (Index i = 0; i < h.size(); ++i) deg = std::max<Index>(deg, static_cast<Index>(h.row(i).size()));
    return deg;
}

RealField true_residuals(const HamiltonianOperator& h, const RealField& values, const Eigen::MatrixXd& vectors)
{
    RealField r(values.size());
    RealField hv(h.size());
    for (Index i = 0; i < values.size(); ++i) {
        h.apply(vectors.col(i), hv);
        r[i] = (hv - values[i] * vectors.col(i)).norm();
    }
    return r;
}

}  // namespace

void fix_sign(Eigen::Ref<RealField> v)
{
    const double sum = v.sum();
    const double scale = v.cwiseAbs().sum();
    if (std::abs(sum) > 1e-10 * scale) {
        if (sum < 0.0) v = -v;
        return;
    }
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-8 * scale) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

EigenSolution lowest_eigenpairs(const HamiltonianOperator& h, Index k, const LanczosOptions& opts)
{
    const Index n = h.size();
    if (k < 1 || k > n) throw std::invalid_argument("lowest_eigenpairs: need 1 <= k <= n");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("lowest_eigenpairs: tol must be positive");

    const Index block = std::min(n, opts.block_size > 0 ? opts.block_size : std::max(k, max_row_degree(h) + 1));
    const Index capacity =
        std::min(n, opts.basis_size > 0 ? std::max(opts.basis_size, k + 2 * block)
                                        : std::max<Index>(8 * block + 4 * k, 180));
    const Index keep = std::min(capacity - block, k + 2 * block);
    const Index max_steps = opts.max_iterations > 0
                                ? opts.max_iterations
                                : static_cast<Index>(std::ceil(50.0 * k * std::sqrt(static_cast<double>(n))));

    KrylovBasis basis(h, capacity, h.start_seed());
    basis.append(basis.random_block(block));

    RealField best = RealField::Constant(k, std::numeric_limits<double>::infinity());
    Index restarts = 0;
    bool refreshed = false;

    while (true) {
        while (basis.size() < capacity) {
            Eigen::MatrixXd next = basis.image().middleCols(basis.last_block_start(), basis.last_block_size());
            Index before = basis.size();
            basis.append(std::move(next));
            if (basis.size() == before) break;
        }

        Eigen::MatrixXd t = basis.basis().transpose() * basis.image();
        t = 0.5 * (t + t.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t);
        const RealField& theta = ritz.eigenvalues();
        const Eigen::MatrixXd& s = ritz.eigenvectors();

        Eigen::MatrixXd y = basis.basis() * s.leftCols(k);
        Eigen::MatrixXd r = basis.image() * s.leftCols(k) - y * theta.head(k).asDiagonal();
        RealField res = r.colwise().norm().transpose();
        for (Index i = 0; i < k; ++i) best[i] = std::min(best[i], res[i]);

        Index steps = basis.applications() / std::max<Index>(block, 1);
        if ((res.array() <= opts.tol).all()) {
            RealField values = theta.head(k);
            for (Index i = 0; i < k; ++i) y.col(i).normalize();
            RealField check = true_residuals(h, values, y);
            if ((check.array() <= opts.tol).all()) {
                for (Index i = 0; i < k; ++i) fix_sign(y.col(i));
                return {values, y, check, steps};
            }
            if (refreshed)
                throw NotConvergedError("lowest_eigenpairs: residuals drift above tolerance", check);
            basis.refresh_images();
            refreshed = true;
            continue;
        }

        if (steps > max_steps) {
            throw NotConvergedError("lowest_eigenpairs: no convergence after " + std::to_string(steps) +
                                        " block steps (" + std::to_string(restarts) +
                                        " restarts), best residual " + std::to_string(best.maxCoeff()),
                                    best);
        }

        if (basis.size() == n) {
            // Full space: only rounding in the stored images can be left.
            if (refreshed) throw NotConvergedError("lowest_eigenpairs: full-space residuals above tolerance", res);
            basis.refresh_images();
            refreshed = true;
            continue;
        }

        // Thick restart: keep the lowest Ritz vectors, continue from the
        // residual block of the wanted pairs.
        const Index p = std::min(keep, basis.size());
        Eigen::MatrixXd residual_block = r.leftCols(std::min(block, k));
        if (residual_block.cols() < block) {
            Eigen::MatrixXd extra = basis.image() * s.middleCols(k, std::min(block - k, p - k)) -
                                    basis.basis() * s.middleCols(k, std::min(block - k, p - k)) *
                                        theta.segment(k, std::min(block - k, p - k)).asDiagonal();
            Eigen::MatrixXd joined(n, residual_block.cols() + extra.cols());
            joined << residual_block, extra;
            residual_block = std::move(joined);
        }
        basis.compress(s.leftCols(p));
        basis.append(std::move(residual_block));
        ++restarts;
        if (restarts % 50 == 0) basis.refresh_images();
    }
}

EigenSolution dense_oracle(const HamiltonianOperator& h)
{
    if (h.size() > kDenseOracleLimit)
        throw std::invalid_argument("dense_oracle: " + std::to_string(h.size()) + " sites exceeds the limit of " +
                                    std::to_string(kDenseOracleLimit));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.dense());
    if (solver.info() != Eigen::Success) throw std::runtime_error("dense_oracle: eigensolver failed");
    EigenSolution sol;
    sol.eigenvalues = solver.eigenvalues();
    sol.eigenvectors = solver.eigenvectors();
    for (Index i = 0; i < sol.eigenvectors.cols(); ++i) fix_sign(sol.eigenvectors.col(i));
    sol.residuals = true_residuals(h, sol.eigenvalues, sol.eigenvectors);
    return sol;
}

RealField dense_spectrum(const HamiltonianOperator& h)
{
    if (h.size() > kDenseOracleLimit)
        throw std::invalid_argument("dense_spectrum: " + std::to_string(h.size()) + " sites exceeds the limit of " +
                                    std::to_string(kDenseOracleLimit));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("dense_spectrum: eigensolver failed");
    return solver.eigenvalues();
}

Index count_eigenvalues_in(const RealField& spectrum, double lo, double hi)
{
    auto begin = spectrum.data();
    auto end = begin + spectrum.size();
    return std::upper_bound(begin, end, hi) - std::lower_bound(begin, end, lo);
}

Index count_eigenvalues_below(const HamiltonianOperator& h, double shift)
{
    const Index n = h.size();
    std::vector<Eigen::Triplet<double>> entries;
    for (Index i = 0; i < n; ++i) {
        entries.emplace_back(i, i, h.diagonal()[i] - shift);
        for (Index j : h.row(i)) entries.emplace_back(i, j, -1.0);
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(entries.begin(), entries.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(m);
    if (ldlt.info() != Eigen::Success) throw std::runtime_error("count_eigenvalues_below: factorization failed");
    const RealField& pivots = ldlt.vectorD();
    Index negative = 0;
    for (Index i = 0; i < pivots.size(); ++i) {
        if (pivots[i] == 0.0 || !std::isfinite(pivots[i]))
            throw std::runtime_error("count_eigenvalues_below: singular pivot, shift hits the spectrum");
        if (pivots[i] < 0.0) ++negative;
    }
    return negative;
}

Index count_eigenvalues_in(const HamiltonianOperator& h, double lo, double hi)
{
    if (hi < lo) return 0;
    if (h.size() <= kDenseOracleLimit) return count_eigenvalues_in(dense_spectrum(h), lo, hi);
    const double above = std::nextafter(hi, std::numeric_limits<double>::infinity());
    return count_eigenvalues_below(h, above) - count_eigenvalues_below(h, lo);
}

}  // namespace gplab
