#pragma once

#include <vector>

#include "gfsc/types.hpp"

namespace gfsc {

/// Floor on ||Z^v - S||_F inside the inverse-distance weight.
inline constexpr double weight_distance_floor = 1e-8;

namespace detail {

template <typename Scalar>
void check_graphs(const std::vector<ViewGraph<Scalar>>& graphs, Index n)
{
    if (graphs.empty()) throw InputError("at least one view graph is required");
    for (const auto& z : graphs) {
        if (z.matrix.rows() != n || z.matrix.cols() != n)
            throw_dimension("view graph size", n, z.matrix.rows());
    }
}

} // namespace detail

/// w_v = 1 / (2 max(||Z^v - S||_F, eps)).
template <typename Scalar>
ViewWeights<Scalar> compute_weights(const std::vector<ViewGraph<Scalar>>& graphs,
                                    const ConsensusGraph<Scalar>& s,
                                    Scalar eps = Scalar(weight_distance_floor))
{
    detail::check_graphs(graphs, s.n());
    Vector<Scalar> w(static_cast<Index>(graphs.size()));
    for (std::size_t v = 0; v < graphs.size(); ++v) {
        const Scalar distance = (graphs[v].matrix - s.raw()).norm();
        w[static_cast<Index>(v)] = Scalar(1) / (Scalar(2) * std::max(distance, eps));
    }
    return ViewWeights<Scalar>(std::move(w));
}

/// sum_v w_v Z^v / sum_v w_v.
template <typename Scalar>
Matrix<Scalar> weighted_mean_graph(const std::vector<ViewGraph<Scalar>>& graphs,
                                   const ViewWeights<Scalar>& w)
{
    if (static_cast<Index>(graphs.size()) != w.size())
        detail::throw_dimension("view weight count", static_cast<long>(graphs.size()), w.size());
    detail::check_graphs(graphs, graphs.front().matrix.rows());
    Matrix<Scalar> acc = w[0] * graphs[0].matrix;
    for (std::size_t v = 1; v < graphs.size(); ++v)
        acc.noalias() += w[static_cast<Index>(v)] * graphs[v].matrix;
    return acc / w.sum();
}

/// Column-wise minimizer of
///     sum_v beta w_v ||Z^v - S||_F^2 + (gamma / 2) sum_i p_i^T S(:, i),
/// i.e. S(:, i) = (sum_v w_v Z^v(:, i) - gamma p_i / (4 beta)) / sum_v w_v.
template <typename Scalar>
ConsensusGraph<Scalar> update_consensus(const std::vector<ViewGraph<Scalar>>& graphs,
                                        const ViewWeights<Scalar>& w,
                                        const Matrix<Scalar>& p, Scalar beta, Scalar gamma)
{
    Matrix<Scalar> s = weighted_mean_graph(graphs, w);
    if (gamma != Scalar(0)) {
        const Index n = s.rows();
        if (p.rows() != n || p.cols() != n) detail::throw_dimension("distance matrix size", n, p.rows());
        s.noalias() -= (gamma / (Scalar(4) * beta * w.sum())) * p;
    }
    return ConsensusGraph<Scalar>(std::move(s));
}

/// Subproblem value minimized by update_consensus.
template <typename Scalar>
Scalar consensus_objective(const std::vector<ViewGraph<Scalar>>& graphs,
                           const ViewWeights<Scalar>& w, const Matrix<Scalar>& p,
                           const Matrix<Scalar>& s, Scalar beta, Scalar gamma)
{
    Scalar value = 0;
    for (std::size_t v = 0; v < graphs.size(); ++v)
        value += beta * w[static_cast<Index>(v)] * (graphs[v].matrix - s).squaredNorm();
    if (gamma != Scalar(0)) value += gamma / Scalar(2) * p.cwiseProduct(s).sum();
    return value;
}

/// Plain mean of the view graphs.
template <typename Scalar>
ConsensusGraph<Scalar> average_graph(const std::vector<ViewGraph<Scalar>>& graphs)
{
    if (graphs.empty()) throw InputError("at least one view graph is required");
    return ConsensusGraph<Scalar>(
        weighted_mean_graph(graphs, ViewWeights<Scalar>::uniform(static_cast<Index>(graphs.size()))));
}

} // namespace gfsc
