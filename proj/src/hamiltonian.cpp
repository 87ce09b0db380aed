#include "gplab/hamiltonian.hpp"

#include <algorithm>
#include <stdexcept>

namespace gplab {

std::string to_string(BoundaryCondition bc)
{
    switch (bc) {
    case BoundaryCondition::Periodic: return "periodic";
    case BoundaryCondition::Neumann: return "neumann";
    case BoundaryCondition::Dirichlet: return "dirichlet";
    }
    return "unknown";
}

HamiltonianOperator::HamiltonianOperator(BoundaryCondition boundary, std::vector<Index> sites,
                                         RealField diagonal, std::vector<Index> row_offsets,
                                         std::vector<Index> columns, std::uint64_t start_seed)
    : boundary_(boundary), sites_(std::move(sites)), diagonal_(std::move(diagonal)),
      offsets_(std::move(row_offsets)), columns_(std::move(columns)), start_seed_(start_seed)
{
    if (diagonal_.size() == 0) throw std::invalid_argument("HamiltonianOperator: empty region");
    if (static_cast<Index>(offsets_.size()) != diagonal_.size() + 1)
        throw std::invalid_argument("HamiltonianOperator: row offsets do not match diagonal");
    for (Index i = 0; i < size(); ++i) {
        double radius = static_cast<double>(offsets_[i + 1] - offsets_[i]);
        upper_bound_ = std::max(upper_bound_, diagonal_[i] + radius);
    }
}

void HamiltonianOperator::apply(const RealField& in, RealField& out) const
{
    if (in.size() != size())
        throw std::invalid_argument("HamiltonianOperator::apply: size mismatch");
    out.resize(size());
    for (Index i = 0; i < size(); ++i) {
        double acc = diagonal_[i] * in[i];
        for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) acc -= in[columns_[k]];
        out[i] = acc;
    }
}

void HamiltonianOperator::apply_block(const Eigen::MatrixXd& in, Eigen::MatrixXd& out) const
{
    if (in.rows() != size())
        throw std::invalid_argument("HamiltonianOperator::apply_block: size mismatch");
    out.resize(in.rows(), in.cols());
    for (Index c = 0; c < in.cols(); ++c) {
        for (Index i = 0; i < size(); ++i) {
            double acc = diagonal_[i] * in(i, c);
            for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) acc -= in(columns_[k], c);
            out(i, c) = acc;
        }
    }
}

Eigen::MatrixXd HamiltonianOperator::dense() const
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), size());
    for (Index i = 0; i < size(); ++i) {
        m(i, i) += diagonal_[i];
        for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) m(i, columns_[k]) -= 1.0;
    }
    return m;
}

}  // namespace gplab
