#pragma once

#include "gfsc/types.hpp"

namespace gfsc {

/// Which symmetric positive-definite system the view update factorizes.
///
/// SampleGram factorizes the n x n matrix X^T X + cI directly. FeatureGram
/// factorizes the m x m matrix X X^T + cI and maps back through the identity
/// (X^T X + cI)^{-1} X^T = X^T (X X^T + cI)^{-1}; both give the same Z.
/// Automatic picks the smaller of the two.
enum class SolveRoute
{
    Automatic,
    SampleGram,
    FeatureGram,
};

/// One view's self-expressive subproblem
///
///     min_Z ||X - XZ||_F^2 + alpha ||Z||_F^2 + beta_w ||Z - S||_F^2
///
/// whose unconstrained minimizer is (X^T X + (alpha + beta_w) I)^{-1}(beta_w S + X^T X).
/// The Gram matrices are formed once; each solve refactors only the shifted system.
template <typename Scalar>
class ViewSystem
{
public:
    using matrix_t = Matrix<Scalar>;

    explicit ViewSystem(matrix_t x, SolveRoute route = SolveRoute::Automatic)
        : _x(std::move(x))
    {
        if (!all_finite(_x)) throw NumericsError("view data contains non-finite entries");
        _route = route;
        if (_route == SolveRoute::Automatic)
            _route = _x.rows() < _x.cols() ? SolveRoute::FeatureGram : SolveRoute::SampleGram;
        _sample_gram.noalias() = _x.transpose() * _x;
        if (_route == SolveRoute::FeatureGram) _feature_gram.noalias() = _x * _x.transpose();
    }

    Index n() const { return _x.cols(); }
    SolveRoute route() const { return _route; }
    const matrix_t& data() const { return _x; }
    /// X^T X.
    const matrix_t& gram() const { return _sample_gram; }

    /// Unconstrained minimizer. `beta_w` is the product beta * w_v; pass 0 and
    /// any `s` for the stand-alone graph.
    matrix_t solve(const matrix_t& s, Scalar alpha, Scalar beta_w) const
    {
        const Index n = this->n();
        if (beta_w != Scalar(0) && (s.rows() != n || s.cols() != n))
            detail::throw_dimension("consensus graph size", n, s.rows() != n ? s.rows() : s.cols());
        const Scalar shift = alpha + beta_w;

        if (_route == SolveRoute::SampleGram) {
            matrix_t a = _sample_gram;
            a.diagonal().array() += shift;
            Eigen::LLT<matrix_t> llt(a);
            if (llt.info() != Eigen::Success)
                throw NumericsError("Cholesky factorization of X^T X + cI failed");
            matrix_t rhs = _sample_gram;
            if (beta_w != Scalar(0)) rhs.noalias() += beta_w * s;
            return llt.solve(rhs);
        }

        // Z = X^T H + (beta_w / shift) (S - X^T (H S)),  H = (X X^T + shift I)^{-1} X.
        matrix_t a = _feature_gram;
        a.diagonal().array() += shift;
        Eigen::LLT<matrix_t> llt(a);
        if (llt.info() != Eigen::Success)
            throw NumericsError("Cholesky factorization of X X^T + cI failed");
        const matrix_t h = llt.solve(_x);
        matrix_t z(n, n);
        z.noalias() = _x.transpose() * h;
        if (beta_w != Scalar(0)) {
            const matrix_t hs = h * s;
            matrix_t coupled = s;
            coupled.noalias() -= _x.transpose() * hs;
            z.noalias() += (beta_w / shift) * coupled;
        }
        return z;
    }

    /// ||X - XZ||^2 + alpha ||Z||^2 + beta_w ||Z - S||^2.
    Scalar objective(const matrix_t& z, const matrix_t& s, Scalar alpha, Scalar beta_w) const
    {
        Scalar value = (_x - _x * z).squaredNorm() + alpha * z.squaredNorm();
        if (beta_w != Scalar(0)) value += beta_w * (z - s).squaredNorm();
        return value;
    }

    /// -2X^T(X - XZ) + 2 alpha Z + 2 beta_w (Z - S).
    matrix_t gradient(const matrix_t& z, const matrix_t& s, Scalar alpha, Scalar beta_w) const
    {
        matrix_t g = Scalar(2) * (_sample_gram * z - _sample_gram + alpha * z);
        if (beta_w != Scalar(0)) g += Scalar(2) * beta_w * (z - s);
        return g;
    }

private:
    matrix_t _x;
    SolveRoute _route = SolveRoute::Automatic;
    matrix_t _sample_gram;
    matrix_t _feature_gram;
};

/// Stand-alone self-expressive graph: clip((X^T X + alpha I)^{-1} X^T X).
template <typename Scalar>
ViewGraph<Scalar> learn_single_view_graph(const Matrix<Scalar>& x, Scalar alpha,
                                          Index view_index = 0,
                                          SolveRoute route = SolveRoute::Automatic)
{
    if (!(alpha > Scalar(0))) throw InputError("alpha must be positive");
    const ViewSystem<Scalar> system(x, route);
    return {clip_nonnegative(system.solve(Matrix<Scalar>(), alpha, Scalar(0))), view_index};
}

/// Fusion-coupled view update followed by projection onto Z >= 0.
template <typename Scalar>
ViewGraph<Scalar> update_view_graph(const ViewSystem<Scalar>& system,
                                    const ConsensusGraph<Scalar>& s, Scalar alpha, Scalar beta,
                                    Scalar weight, Index view_index = 0)
{
    if (s.n() != system.n()) detail::throw_dimension("consensus graph size", system.n(), s.n());
    return {clip_nonnegative(system.solve(s.raw(), alpha, beta * weight)), view_index};
}

template <typename Scalar>
ViewGraph<Scalar> update_view_graph(const Matrix<Scalar>& x, const ConsensusGraph<Scalar>& s,
                                    Scalar alpha, Scalar beta, Scalar weight,
                                    Index view_index = 0)
{
    if (s.n() != x.cols()) detail::throw_dimension("consensus graph size", x.cols(), s.n());
    return update_view_graph(ViewSystem<Scalar>(x), s, alpha, beta, weight, view_index);
}

} // namespace gfsc
