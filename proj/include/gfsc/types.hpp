#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gfsc/errors.hpp"

namespace gfsc {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Cluster or class ids, one per sample.
using Labels = std::vector<int>;

/// Maps arbitrary ids to 0..c-1 in order of increasing original value.
inline Labels reencode_labels(const Labels& raw)
{
    std::map<int, int> ids;
    for (int l : raw) ids.emplace(l, 0);
    int next = 0;
    for (auto& [_, id] : ids) id = next++;
    Labels out(raw.size());
    std::transform(raw.begin(), raw.end(), out.begin(), [&](int l) { return ids.at(l); });
    return out;
}

inline int count_distinct(const Labels& labels)
{
    if (labels.empty()) return 0;
    return *std::max_element(labels.begin(), labels.end()) + 1;
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m)
{
    return m.derived().array().isFinite().all();
}

/// t views over the same n samples. View v is stored features x samples (m_v x n).
template <typename Scalar>
class MultiViewDataset
{
public:
    using matrix_t = Matrix<Scalar>;

    MultiViewDataset() = default;

    explicit MultiViewDataset(std::vector<matrix_t> views,
                              std::optional<Labels> labels = std::nullopt,
                              std::vector<std::string> view_names = {})
        : _views(std::move(views)), _view_names(std::move(view_names))
    {
        if (_views.empty()) throw DatasetError("dataset needs at least one view");
        const Index n = _views.front().cols();
        for (std::size_t v = 0; v < _views.size(); ++v) {
            if (_views[v].cols() != n) {
                throw DatasetError("view " + std::to_string(v) + " has " +
                                   std::to_string(_views[v].cols()) + " samples, view 0 has " +
                                   std::to_string(n));
            }
            if (_views[v].rows() == 0) {
                throw DatasetError("view " + std::to_string(v) + " has no features");
            }
        }
        if (labels) {
            if (static_cast<Index>(labels->size()) != n) {
                throw DatasetError("label count " + std::to_string(labels->size()) +
                                   " does not match sample count " + std::to_string(n));
            }
            _labels = reencode_labels(*labels);
        }
        if (_view_names.empty()) {
            for (std::size_t v = 0; v < _views.size(); ++v)
                _view_names.push_back("view" + std::to_string(v + 1));
        }
        if (_view_names.size() != _views.size())
            throw DatasetError("view name count does not match view count");
    }

    Index n() const { return _views.empty() ? 0 : _views.front().cols(); }
    Index t() const { return static_cast<Index>(_views.size()); }

    const std::vector<matrix_t>& views() const { return _views; }
    const matrix_t& view(Index v) const { return _views.at(static_cast<std::size_t>(v)); }
    const std::vector<std::string>& view_names() const { return _view_names; }

    bool has_labels() const { return _labels.has_value(); }
    const std::optional<Labels>& labels() const { return _labels; }
    int num_classes() const { return _labels ? count_distinct(*_labels) : 0; }

private:
    std::vector<matrix_t> _views;
    std::optional<Labels> _labels;
    std::vector<std::string> _view_names;
};

/// Nonnegative n x n affinity learned for one view.
template <typename Scalar>
struct ViewGraph
{
    Matrix<Scalar> matrix;
    Index view_index = 0;
};

template <typename Derived>
auto clip_nonnegative(const Eigen::MatrixBase<Derived>& m)
{
    using Scalar = typename Derived::Scalar;
    return m.cwiseMax(Scalar(0));
}

/// Consensus graph S. The raw matrix is what the closed-form update produces
/// and may be asymmetric or hold negative entries; the symmetrized copy
/// clip((S + S^T) / 2) is what spectral code consumes.
template <typename Scalar>
class ConsensusGraph
{
public:
    ConsensusGraph() = default;

    explicit ConsensusGraph(Matrix<Scalar> raw) : _raw(std::move(raw))
    {
        if (_raw.rows() != _raw.cols())
            detail::throw_dimension("consensus graph columns", _raw.rows(), _raw.cols());
        _symmetrized = clip_nonnegative((_raw + _raw.transpose()) * Scalar(0.5));
    }

    Index n() const { return _raw.rows(); }
    const Matrix<Scalar>& raw() const { return _raw; }
    const Matrix<Scalar>& symmetrized() const { return _symmetrized; }

private:
    Matrix<Scalar> _raw;
    Matrix<Scalar> _symmetrized;
};

template <typename Scalar>
class ViewWeights
{
public:
    ViewWeights() = default;

    explicit ViewWeights(Vector<Scalar> w) : _w(std::move(w))
    {
        if (_w.size() == 0) throw InputError("view weights must be nonempty");
        for (Index v = 0; v < _w.size(); ++v) {
            if (!std::isfinite(static_cast<double>(_w[v])) || !(_w[v] > Scalar(0)))
                throw NumericsError("view weight " + std::to_string(v) +
                                    " is not finite and positive");
        }
    }

    static ViewWeights uniform(Index t)
    {
        return ViewWeights(Vector<Scalar>::Constant(t, Scalar(1) / Scalar(t)));
    }

    Index size() const { return _w.size(); }
    Scalar operator[](Index v) const { return _w[v]; }
    Scalar sum() const { return _w.sum(); }
    const Vector<Scalar>& values() const { return _w; }

private:
    Vector<Scalar> _w;
};

/// n x k relaxed cluster indicator with orthonormal columns.
template <typename Scalar>
struct SpectralEmbedding
{
    Matrix<Scalar> F;
    /// Eigenvalues belonging to the columns of F, nondecreasing (empty for random starts).
    Vector<Scalar> eigenvalues;

    Index k() const { return F.cols(); }

    Scalar orthonormality_error() const
    {
        return (F.transpose() * F - Matrix<Scalar>::Identity(F.cols(), F.cols())).norm();
    }
};

struct Hyperparams
{
    double alpha = 10.0;
    double beta = 1.0;
    double gamma = 0.1;
    int k = 2;
    int max_iter = 200;
    double tol = 1e-3;
    std::uint64_t seed = 0;

    void validate() const
    {
        auto positive = [](double x) { return std::isfinite(x) && x > 0; };
        if (!positive(alpha)) throw InputError("alpha must be positive");
        if (!positive(beta)) throw InputError("beta must be positive");
        if (!positive(gamma)) throw InputError("gamma must be positive");
        if (k < 2) throw InputError("k must be at least 2");
        if (max_iter < 1) throw InputError("max_iter must be at least 1");
        if (!positive(tol)) throw InputError("tol must be positive");
    }
};

struct IterationRecord
{
    int iteration = 0;
    double objective = 0;
    double relative_change = 0;
    std::vector<double> weights;
    double seconds = 0;
};

struct SolverTrace
{
    std::vector<IterationRecord> iterations;
    bool converged = false;
    /// Block updates that raised their own subproblem objective (checked mode only).
    int monotonicity_violations = 0;
    std::vector<std::string> warnings;

    int iteration_count() const { return static_cast<int>(iterations.size()); }
};

struct ClusteringResult
{
    Labels labels;
    std::optional<double> acc;
    std::optional<double> nmi;
    std::optional<double> purity;
    SolverTrace trace;
};

} // namespace gfsc
