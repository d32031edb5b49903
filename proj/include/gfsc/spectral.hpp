#pragma once

#include <deque>
#include <limits>
#include <type_traits>

#include "gfsc/kmeans.hpp"
#include "gfsc/types.hpp"

#ifdef GFSC_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace gfsc {

/// Unnormalized Laplacian L = D - W of a nonnegative symmetric affinity W.
template <typename Scalar>
struct SpectralQuantities
{
    Matrix<Scalar> L;
    Vector<Scalar> degree;

    Index n() const { return L.rows(); }
    auto D() const { return degree.asDiagonal(); }

    /// All eigenvalues of L, nondecreasing.
    Vector<Scalar> spectrum() const
    {
        if (n() == 0) return {};
        Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(L, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw NumericsError("Laplacian eigensolve failed");
        return solver.eigenvalues();
    }
};

template <typename Derived>
SpectralQuantities<typename Derived::Scalar> laplacian(const Eigen::MatrixBase<Derived>& w)
{
    using Scalar = typename Derived::Scalar;
    if (w.rows() != w.cols()) detail::throw_dimension("affinity columns", w.rows(), w.cols());
    SpectralQuantities<Scalar> q;
    q.degree = w.rowwise().sum();
    q.L = -w;
    q.L.diagonal() += q.degree;
    return q;
}

template <typename Scalar>
SpectralQuantities<Scalar> build_laplacian(const ConsensusGraph<Scalar>& s)
{
    return laplacian(s.symmetrized());
}

namespace detail {

template <typename Scalar>
std::pair<Vector<Scalar>, Matrix<Scalar>> dense_smallest_eigenpairs(const Matrix<Scalar>& a, Index k)
{
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(a);
    if (solver.info() != Eigen::Success) throw NumericsError("symmetric eigensolve failed");
    return {solver.eigenvalues().head(k), solver.eigenvectors().leftCols(k)};
}

/// The k smallest eigenpairs of a symmetric matrix, eigenvalues ascending.
///
/// With LAPACKE available this is ?syevx (bisection plus inverse iteration with
/// reorthogonalization inside eigenvalue clusters), which only builds k vectors.
/// Results that lose orthonormality fall back to the full dense solver.
template <typename Scalar>
std::pair<Vector<Scalar>, Matrix<Scalar>> smallest_eigenpairs(const Matrix<Scalar>& a, Index k)
{
#ifdef GFSC_HAVE_LAPACKE
    if constexpr (std::is_same_v<Scalar, double> || std::is_same_v<Scalar, float>) {
        const Index n = a.rows();
        Matrix<Scalar> work = a;
        Vector<Scalar> values(n);
        Matrix<Scalar> vectors(n, k);
        std::vector<lapack_int> failed(static_cast<std::size_t>(n));
        lapack_int found = 0;
        lapack_int info;
        const auto ln = static_cast<lapack_int>(n);
        const auto lk = static_cast<lapack_int>(k);
        if constexpr (std::is_same_v<Scalar, double>) {
            info = LAPACKE_dsyevx(LAPACK_COL_MAJOR, 'V', 'I', 'L', ln, work.data(), ln, 0.0, 0.0, 1,
                                  lk, 0.0, &found, values.data(), vectors.data(), ln,
                                  failed.data());
        } else {
            info = LAPACKE_ssyevx(LAPACK_COL_MAJOR, 'V', 'I', 'L', ln, work.data(), ln, 0.0f, 0.0f,
                                  1, lk, 0.0f, &found, values.data(), vectors.data(), ln,
                                  failed.data());
        }
        const Scalar orth_tol = Scalar(1e3) * std::numeric_limits<Scalar>::epsilon() *
                                std::sqrt(static_cast<Scalar>(n));
        if (info == 0 && found == lk &&
            (vectors.transpose() * vectors - Matrix<Scalar>::Identity(k, k)).norm() < orth_tol)
            return {values.head(k), std::move(vectors)};
        return dense_smallest_eigenpairs(a, k);
    }
#endif
    return dense_smallest_eigenpairs(a, k);
}

} // namespace detail

/// Eigenvectors of the k smallest eigenvalues of L; minimizes Tr(F^T L F) over F^T F = I.
template <typename Scalar>
SpectralEmbedding<Scalar> update_embedding(const Matrix<Scalar>& L, Index k)
{
    if (L.rows() != L.cols()) detail::throw_dimension("Laplacian columns", L.rows(), L.cols());
    if (k < 1 || k > L.rows())
        throw InputError("embedding dimension " + std::to_string(k) + " outside [1, n]");
    if (!all_finite(L)) throw NumericsError("Laplacian contains non-finite entries");
    auto [values, vectors] = detail::smallest_eigenpairs(L, k);
    return {std::move(vectors), std::move(values)};
}

template <typename Scalar>
SpectralEmbedding<Scalar> update_embedding(const SpectralQuantities<Scalar>& q, Index k)
{
    return update_embedding(q.L, k);
}

/// p_ij = ||F(i, :) - F(j, :)||^2. Exactly symmetric with zero diagonal.
template <typename Derived>
Matrix<typename Derived::Scalar> embedding_distances(const Eigen::MatrixBase<Derived>& f)
{
    using Scalar = typename Derived::Scalar;
    const Vector<Scalar> sq = f.rowwise().squaredNorm();
    Matrix<Scalar> gram = f * f.transpose();
    Matrix<Scalar> p = (-Scalar(2) * gram).colwise() + sq;
    p.rowwise() += sq.transpose();
    p = (Scalar(0.5) * (p + p.transpose())).cwiseMax(Scalar(0));
    p.diagonal().setZero();
    return p;
}

/// Rows scaled to unit length; rows shorter than 1e-12 become zero.
template <typename Derived>
Matrix<typename Derived::Scalar> normalize_rows(const Eigen::MatrixBase<Derived>& f)
{
    using Scalar = typename Derived::Scalar;
    Matrix<Scalar> out = f;
    for (Index i = 0; i < out.rows(); ++i) {
        const Scalar norm = out.row(i).norm();
        if (norm < Scalar(1e-12))
            out.row(i).setZero();
        else
            out.row(i) /= norm;
    }
    return out;
}

struct ComponentCount
{
    /// Eigenvalues of L at or below eig_tol * lambda_max.
    int spectral = 0;
    /// Connected components over edges heavier than edge_tol.
    int traversal = 0;

    int count() const { return spectral; }
    bool agree() const { return spectral == traversal; }
};

inline constexpr double default_eig_tol = 1e-6;
inline constexpr double default_edge_tol = 1e-8;

template <typename Derived>
int count_components_by_traversal(const Eigen::MatrixBase<Derived>& w,
                                  double edge_tol = default_edge_tol)
{
    const Index n = w.rows();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    int components = 0;
    std::deque<Index> queue;
    for (Index start = 0; start < n; ++start) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        ++components;
        seen[static_cast<std::size_t>(start)] = 1;
        queue.push_back(start);
        while (!queue.empty()) {
            const Index i = queue.front();
            queue.pop_front();
            for (Index j = 0; j < n; ++j) {
                if (seen[static_cast<std::size_t>(j)]) continue;
                if (static_cast<double>(w(i, j)) > edge_tol || static_cast<double>(w(j, i)) > edge_tol) {
                    seen[static_cast<std::size_t>(j)] = 1;
                    queue.push_back(j);
                }
            }
        }
    }
    return components;
}

template <typename Scalar>
ComponentCount count_components(const ConsensusGraph<Scalar>& s,
                                double eig_tol = default_eig_tol,
                                double edge_tol = default_edge_tol)
{
    ComponentCount out;
    if (s.n() == 0) return out;
    const Vector<Scalar> sigma = build_laplacian(s).spectrum();
    const double threshold = eig_tol * std::max(0.0, static_cast<double>(sigma[sigma.size() - 1]));
    for (Index i = 0; i < sigma.size(); ++i)
        out.spectral += static_cast<double>(sigma[i]) <= threshold ? 1 : 0;
    out.traversal = count_components_by_traversal(s.symmetrized(), edge_tol);
    return out;
}

struct SpectralClusteringOptions
{
    bool normalize_rows = true;
    KMeansOptions kmeans;
};

/// Laplacian embedding of S followed by k-means on its rows.
template <typename Scalar>
Labels spectral_clustering(const ConsensusGraph<Scalar>& s, int k, std::uint64_t seed,
                           const SpectralClusteringOptions& options = {})
{
    if (k < 2) throw InputError("spectral clustering needs k >= 2");
    const auto embedding = update_embedding(build_laplacian(s), k);
    const Matrix<Scalar> points =
        options.normalize_rows ? normalize_rows(embedding.F) : embedding.F;
    return kmeans(points, k, seed, options.kmeans).labels;
}

} // namespace gfsc
