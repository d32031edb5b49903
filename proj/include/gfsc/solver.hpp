#pragma once

#include <chrono>
#include <random>
#include <sstream>

#include "gfsc/fusion.hpp"
#include "gfsc/graph_learning.hpp"
#include "gfsc/metrics.hpp"
#include "gfsc/spectral.hpp"
#include "gfsc/types.hpp"

namespace gfsc {

enum class InitMode
{
    /// Uniform [0, 1] consensus graph and a Gaussian orthonormalized embedding.
    Random,
    /// Mean of the stand-alone view graphs and its Laplacian embedding.
    WarmStart,
};

struct SolverOptions
{
    InitMode init = InitMode::Random;
    /// Scale rows of F to unit length before the final k-means (GFSC only).
    bool normalize_embedding_rows = false;
    /// Check that every block update lowers its own subproblem; violations are
    /// counted in the trace.
    bool check_monotone = false;
    /// Evaluate the full objective each iteration (costs one X Z product per view).
    bool record_objective = true;
    KMeansOptions kmeans;
    SolveRoute route = SolveRoute::Automatic;
};

template <typename Scalar>
struct SolverState
{
    std::vector<ViewGraph<Scalar>> graphs;
    ConsensusGraph<Scalar> consensus;
    SpectralEmbedding<Scalar> embedding;
    ViewWeights<Scalar> weights;
};

template <typename Scalar>
struct SolverOutput
{
    ClusteringResult result;
    SolverState<Scalar> state;
    ComponentCount components;
};

/// How Tr(F^T L F) treats the consensus graph.
enum class StructureTerm
{
    /// L built from clip((S + S^T) / 2), the graph handed to the eigensolver.
    Symmetrized,
    /// (1/2) sum_ij p_ij s_ij on the raw S, the form the S update minimizes.
    Raw,
};

template <typename Scalar>
std::vector<ViewSystem<Scalar>> make_view_systems(const MultiViewDataset<Scalar>& data,
                                                  SolveRoute route = SolveRoute::Automatic)
{
    std::vector<ViewSystem<Scalar>> systems;
    systems.reserve(data.views().size());
    for (const auto& x : data.views()) systems.emplace_back(x, route);
    return systems;
}

template <typename Scalar>
Scalar structure_term(const ConsensusGraph<Scalar>& s, const Matrix<Scalar>& f,
                      StructureTerm term = StructureTerm::Symmetrized)
{
    if (term == StructureTerm::Raw)
        return Scalar(0.5) * embedding_distances(f).cwiseProduct(s.raw()).sum();
    const auto q = build_laplacian(s);
    return (f.transpose() * q.L * f).trace();
}

/// sum_v { ||X^v - X^v Z^v||^2 + alpha ||Z^v||^2 + beta w_v ||Z^v - S||^2 } + gamma Tr(F^T L F).
/// An empty F drops the structure term.
template <typename Scalar>
Scalar objective(const std::vector<ViewGraph<Scalar>>& graphs, const ConsensusGraph<Scalar>& s,
                 const Matrix<Scalar>& f, const std::vector<Matrix<Scalar>>& xs,
                 const Hyperparams& params, const ViewWeights<Scalar>& w,
                 StructureTerm term = StructureTerm::Symmetrized)
{
    if (graphs.size() != xs.size() || static_cast<Index>(xs.size()) != w.size())
        throw DimensionError("objective: view counts of graphs, data and weights differ");
    const auto alpha = static_cast<Scalar>(params.alpha);
    const auto beta = static_cast<Scalar>(params.beta);
    Scalar value = 0;
    for (std::size_t v = 0; v < xs.size(); ++v) {
        const auto& z = graphs[v].matrix;
        value += (xs[v] - xs[v] * z).squaredNorm() + alpha * z.squaredNorm() +
                 beta * w[static_cast<Index>(v)] * (z - s.raw()).squaredNorm();
    }
    if (f.size() > 0) value += static_cast<Scalar>(params.gamma) * structure_term(s, f, term);
    return value;
}

namespace detail {

inline std::mt19937_64 init_engine(std::uint64_t seed, std::uint32_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      stream, 0x67667363u};
    return std::mt19937_64(seq);
}

template <typename Scalar>
Matrix<Scalar> random_orthonormal(Index n, Index k, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix<Scalar> g(n, k);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < n; ++i) g(i, j) = static_cast<Scalar>(normal(rng));
    Eigen::HouseholderQR<Matrix<Scalar>> qr(g);
    return qr.householderQ() * Matrix<Scalar>::Identity(n, k);
}

inline bool raised(double before, double after)
{
    return after > before + 1e-9 * std::max(1.0, std::abs(before));
}

inline void check_decrease(SolverTrace& trace, int iter, const std::string& block, double before,
                           double after)
{
    if (!raised(before, after)) return;
    ++trace.monotonicity_violations;
    std::ostringstream msg;
    msg.precision(17);
    msg << "iteration " << iter << ": " << block << " update raised its subproblem from " << before
        << " to " << after;
    trace.warnings.push_back(msg.str());
}

template <typename Scalar>
double relative_change(const Matrix<Scalar>& current, const Matrix<Scalar>& previous)
{
    const double diff = static_cast<double>((current - previous).norm());
    const double base = static_cast<double>(previous.norm());
    return base > 0 ? diff / base : diff;
}

template <typename Scalar>
void attach_scores(ClusteringResult& result, const MultiViewDataset<Scalar>& data)
{
    if (!data.has_labels()) return;
    const auto s = score(result.labels, *data.labels());
    result.acc = s.acc;
    result.nmi = s.nmi;
    result.purity = s.purity;
}

template <typename Scalar>
void check_inputs(const MultiViewDataset<Scalar>& data, const Hyperparams& params)
{
    params.validate();
    if (data.t() < 1) throw DatasetError("dataset has no views");
    if (params.k > data.n())
        throw InputError("k = " + std::to_string(params.k) + " exceeds sample count " +
                         std::to_string(data.n()));
}

} // namespace detail

template <typename Scalar>
SolverState<Scalar> initialize(const std::vector<ViewSystem<Scalar>>& systems,
                               const Hyperparams& params, const SolverOptions& options = {})
{
    params.validate();
    if (systems.empty()) throw DatasetError("dataset has no views");
    const Index n = systems.front().n();
    const Index t = static_cast<Index>(systems.size());
    const auto alpha = static_cast<Scalar>(params.alpha);
    const auto beta = static_cast<Scalar>(params.beta);

    SolverState<Scalar> state;
    state.weights = ViewWeights<Scalar>::uniform(t);

    if (options.init == InitMode::Random) {
        auto rng = detail::init_engine(params.seed, 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Matrix<Scalar> s(n, n);
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) s(i, j) = static_cast<Scalar>(unit(rng));
        state.consensus = ConsensusGraph<Scalar>(std::move(s));
        auto frng = detail::init_engine(params.seed, 2);
        state.embedding.F = detail::random_orthonormal<Scalar>(n, params.k, frng);
    } else {
        std::vector<ViewGraph<Scalar>> single;
        for (Index v = 0; v < t; ++v)
            single.push_back({clip_nonnegative(systems[static_cast<std::size_t>(v)].solve(
                                  Matrix<Scalar>(), alpha, Scalar(0))),
                              v});
        state.consensus = average_graph(single);
        state.embedding = update_embedding(build_laplacian(state.consensus), params.k);
    }

    for (Index v = 0; v < t; ++v)
        state.graphs.push_back(update_view_graph(systems[static_cast<std::size_t>(v)],
                                                 state.consensus, alpha, beta, state.weights[v], v));
    return state;
}

template <typename Scalar>
SolverState<Scalar> initialize(const MultiViewDataset<Scalar>& data, const Hyperparams& params,
                               const SolverOptions& options = {})
{
    return initialize(make_view_systems(data, options.route), params, options);
}

namespace detail {

/// Steps 1-2 of an outer iteration: exact view updates, then projection onto Z >= 0.
template <typename Scalar>
void update_all_views(const std::vector<ViewSystem<Scalar>>& systems, SolverState<Scalar>& state,
                      Scalar alpha, Scalar beta, bool check, SolverTrace& trace, int iter)
{
    for (std::size_t v = 0; v < systems.size(); ++v) {
        const Scalar bw = beta * state.weights[static_cast<Index>(v)];
        Matrix<Scalar> z = systems[v].solve(state.consensus.raw(), alpha, bw);
        if (!all_finite(z)) throw NumericsError("view graph update produced non-finite values");
        if (check) {
            const auto& s = state.consensus.raw();
            const double before = systems[v].objective(state.graphs[v].matrix, s, alpha, bw);
            const double after = systems[v].objective(z, s, alpha, bw);
            check_decrease(trace, iter, "view " + std::to_string(v), before, after);
        }
        state.graphs[v].matrix = clip_nonnegative(z);
    }
}

} // namespace detail

/// Joint graph learning, weighted fusion and structured spectral embedding,
/// followed by k-means on the final embedding.
template <typename Scalar>
SolverOutput<Scalar> gfsc(const MultiViewDataset<Scalar>& data, const Hyperparams& params,
                          const SolverOptions& options = {})
{
    using clock = std::chrono::steady_clock;
    detail::check_inputs(data, params);
    const auto systems = make_view_systems(data, options.route);
    const auto alpha = static_cast<Scalar>(params.alpha);
    const auto beta = static_cast<Scalar>(params.beta);
    const auto gamma = static_cast<Scalar>(params.gamma);

    SolverOutput<Scalar> out;
    auto& state = out.state;
    auto& trace = out.result.trace;
    state = initialize(systems, params, options);

    for (int iter = 1; iter <= params.max_iter; ++iter) {
        const auto start = clock::now();
        const ViewWeights<Scalar> w = state.weights;

        detail::update_all_views(systems, state, alpha, beta, options.check_monotone, trace, iter);

        const Matrix<Scalar> p = embedding_distances(state.embedding.F);
        ConsensusGraph<Scalar> s = update_consensus(state.graphs, w, p, beta, gamma);
        if (!all_finite(s.raw()))
            throw NumericsError("consensus graph diverged at iteration " + std::to_string(iter));
        if (options.check_monotone) {
            const double before =
                consensus_objective(state.graphs, w, p, state.consensus.raw(), beta, gamma);
            const double after = consensus_objective(state.graphs, w, p, s.raw(), beta, gamma);
            detail::check_decrease(trace, iter, "consensus", before, after);
        }

        const auto q = build_laplacian(s);
        auto embedding = update_embedding(q, params.k);
        if (options.check_monotone) {
            const Matrix<Scalar>& f = state.embedding.F;
            const double before = (f.transpose() * q.L * f).trace();
            const double after = (embedding.F.transpose() * q.L * embedding.F).trace();
            detail::check_decrease(trace, iter, "embedding", before, after);
        }
        state.embedding = std::move(embedding);

        const double change = detail::relative_change(s.raw(), state.consensus.raw());
        state.consensus = std::move(s);
        state.weights = compute_weights(state.graphs, state.consensus);

        IterationRecord record;
        record.iteration = iter;
        record.relative_change = change;
        if (options.record_objective)
            record.objective = objective(state.graphs, state.consensus, state.embedding.F,
                                         data.views(), params, w);
        record.weights.assign(state.weights.values().data(),
                              state.weights.values().data() + state.weights.size());
        record.seconds = std::chrono::duration<double>(clock::now() - start).count();
        trace.iterations.push_back(std::move(record));

        if (change < params.tol) {
            trace.converged = true;
            break;
        }
    }

    const Matrix<Scalar> points = options.normalize_embedding_rows
                                      ? normalize_rows(state.embedding.F)
                                      : state.embedding.F;
    out.result.labels = kmeans(points, params.k, params.seed, options.kmeans).labels;
    out.components = count_components(state.consensus);
    if (!out.components.agree())
        trace.warnings.push_back("component count mismatch: spectral " +
                                 std::to_string(out.components.spectral) + ", traversal " +
                                 std::to_string(out.components.traversal));
    detail::attach_scores(out.result, data);
    return out;
}

/// Graph learning and weighted fusion without the structure term; spectral
/// clustering runs on the converged consensus graph.
template <typename Scalar>
SolverOutput<Scalar> gf(const MultiViewDataset<Scalar>& data, const Hyperparams& params,
                        const SolverOptions& options = {})
{
    using clock = std::chrono::steady_clock;
    detail::check_inputs(data, params);
    const auto systems = make_view_systems(data, options.route);
    const auto alpha = static_cast<Scalar>(params.alpha);
    const auto beta = static_cast<Scalar>(params.beta);

    SolverOutput<Scalar> out;
    auto& state = out.state;
    auto& trace = out.result.trace;
    state = initialize(systems, params, options);
    const Matrix<Scalar> no_embedding;

    for (int iter = 1; iter <= params.max_iter; ++iter) {
        const auto start = clock::now();
        const ViewWeights<Scalar> w = state.weights;

        detail::update_all_views(systems, state, alpha, beta, options.check_monotone, trace, iter);

        ConsensusGraph<Scalar> s(weighted_mean_graph(state.graphs, w));
        if (options.check_monotone) {
            const double before =
                consensus_objective(state.graphs, w, no_embedding, state.consensus.raw(), beta, Scalar(0));
            const double after = consensus_objective(state.graphs, w, no_embedding, s.raw(), beta, Scalar(0));
            detail::check_decrease(trace, iter, "consensus", before, after);
        }

        const double change = detail::relative_change(s.raw(), state.consensus.raw());
        state.consensus = std::move(s);
        state.weights = compute_weights(state.graphs, state.consensus);

        IterationRecord record;
        record.iteration = iter;
        record.relative_change = change;
        if (options.record_objective)
            record.objective =
                objective(state.graphs, state.consensus, no_embedding, data.views(), params, w);
        record.weights.assign(state.weights.values().data(),
                              state.weights.values().data() + state.weights.size());
        record.seconds = std::chrono::duration<double>(clock::now() - start).count();
        trace.iterations.push_back(std::move(record));

        if (change < params.tol) {
            trace.converged = true;
            break;
        }
    }

    state.embedding = update_embedding(build_laplacian(state.consensus), params.k);
    out.result.labels = kmeans(normalize_rows(state.embedding.F), params.k, params.seed,
                               options.kmeans).labels;
    out.components = count_components(state.consensus);
    detail::attach_scores(out.result, data);
    return out;
}

} // namespace gfsc
