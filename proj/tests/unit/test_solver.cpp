#include <doctest.h>

#include "gfsc/graph_learning.hpp"
#include "gfsc/io.hpp"
#include "gfsc/metrics.hpp"
#include "gfsc/normalize.hpp"
#include "gfsc/solver.hpp"
#include "oracles.hpp"

using namespace gfsc;

namespace {

MultiViewDataset<double> planted(std::uint64_t seed, double noise = 0.0, long n = 150)
{
    return normalize_dataset(generate_synthetic(n, 2, 3, noise, seed));
}

Hyperparams planted_params(std::uint64_t seed)
{
    Hyperparams p;
    p.k = 3;
    p.seed = seed;
    return p;
}

} // namespace

TEST_CASE("objective of all-zero inputs is zero")
{
    const Matrix<double> zero = Matrix<double>::Zero(4, 4);
    const std::vector<ViewGraph<double>> graphs{{zero, 0}, {zero, 1}};
    const std::vector<Matrix<double>> xs{Matrix<double>::Zero(3, 4), Matrix<double>::Zero(2, 4)};
    CHECK(objective(graphs, ConsensusGraph<double>(zero), Matrix<double>(Matrix<double>::Zero(4, 2)), xs,
                    Hyperparams{}, ViewWeights<double>::uniform(2)) == 0.0);
}

TEST_CASE("fusion term vanishes when every view equals S")
{
    std::mt19937_64 rng(51);
    const Matrix<double> s = oracle::uniform(5, 5, rng);
    const std::vector<ViewGraph<double>> graphs{{s, 0}, {s, 1}};
    const std::vector<Matrix<double>> xs{oracle::gaussian(3, 5, rng), oracle::gaussian(4, 5, rng)};
    Vector<double> w1(2), w2(2);
    w1 << 0.1, 9.0;
    w2 << 3.0, 0.5;
    const Matrix<double> empty;
    const double a = objective(graphs, ConsensusGraph<double>(s), empty, xs, Hyperparams{}, ViewWeights<double>(w1));
    const double b = objective(graphs, ConsensusGraph<double>(s), empty, xs, Hyperparams{}, ViewWeights<double>(w2));
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
}

TEST_CASE("objective matches a scalar-loop recomputation")
{
    std::mt19937_64 rng(52);
    const Index n = 5;
    const std::vector<Matrix<double>> xs{oracle::gaussian(3, n, rng), oracle::gaussian(4, n, rng)};
    const std::vector<Matrix<double>> zs{oracle::uniform(n, n, rng), oracle::uniform(n, n, rng)};
    const ConsensusGraph<double> s(oracle::uniform(n, n, rng, -0.2, 1.0));
    const Matrix<double> f = oracle::gaussian(n, 2, rng);
    Vector<double> wv(2);
    wv << 0.4, 1.7;
    Hyperparams p;
    p.alpha = 0.3;
    p.beta = 2.0;
    p.gamma = 0.8;

    double expected = 0;
    for (std::size_t v = 0; v < 2; ++v)
        expected += oracle::view_objective(xs[v], zs[v], s.raw(), p.alpha, p.beta * wv[static_cast<Index>(v)]);
    // Tr(F^T L F) of the symmetrized graph through the pairwise identity.
    const oracle::Mat pd = oracle::pairwise(f);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const double sym = std::max(0.0, 0.5 * (s.raw()(i, j) + s.raw()(j, i)));
            expected += p.gamma * 0.5 * pd(i, j) * sym;
        }
    const std::vector<ViewGraph<double>> graphs{{zs[0], 0}, {zs[1], 1}};
    CHECK(objective(graphs, s, f, xs, p, ViewWeights<double>(wv)) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("initialization")
{
    std::mt19937_64 rng(53);
    std::vector<Matrix<double>> views;
    for (int v = 0; v < 4; ++v) views.push_back(oracle::gaussian(3, 20, rng));
    const MultiViewDataset<double> data(views);
    Hyperparams p;
    p.k = 3;
    p.seed = 17;
    const auto a = initialize(data, p);
    for (Index v = 0; v < 4; ++v) CHECK(a.weights[v] == 0.25);
    CHECK(a.embedding.orthonormality_error() < 1e-10);
    CHECK(a.consensus.raw().minCoeff() >= 0.0);
    CHECK(a.consensus.raw().maxCoeff() <= 1.0);
    CHECK(a.graphs.size() == 4);
    const auto b = initialize(data, p);
    CHECK(a.consensus.raw() == b.consensus.raw());
    CHECK(a.embedding.F == b.embedding.F);
    p.seed = 18;
    CHECK(initialize(data, p).consensus.raw() != a.consensus.raw());
}

TEST_CASE("planted partition at default parameters")
{
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto out = gfsc::gfsc(planted(seed), planted_params(seed));
        CHECK(*out.result.acc == 1.0);
        CHECK(out.components.count() == 3);
        CHECK(out.result.trace.converged);
    }
}

TEST_CASE("block updates never raise their own subproblem")
{
    SolverOptions o;
    o.check_monotone = true;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto p = planted_params(seed);
        p.max_iter = 30;
        const auto out = gfsc::gfsc(planted(seed, 0.2, 90), p, o);
        CHECK(out.result.trace.monotonicity_violations == 0);
        for (const auto& w : out.result.trace.warnings) MESSAGE(w);
    }
}

TEST_CASE("trace follows the stopping rule")
{
    auto p = planted_params(4);
    const auto out = gfsc::gfsc(planted(4, 0.1, 90), p);
    const auto& it = out.result.trace.iterations;
    REQUIRE(!it.empty());
    CHECK(it.size() <= static_cast<std::size_t>(p.max_iter));
    for (std::size_t i = 0; i + 1 < it.size(); ++i) CHECK(it[i].relative_change >= p.tol);
    CHECK((it.back().relative_change < p.tol || static_cast<int>(it.size()) == p.max_iter));
    CHECK(out.result.trace.converged == (it.back().relative_change < p.tol));

    p.max_iter = 2;
    CHECK(gfsc::gfsc(planted(4, 0.1, 90), p).result.trace.iteration_count() <= 2);
}

TEST_CASE("embedding after the last F step attains the Ky Fan bound")
{
    auto p = planted_params(5);
    p.max_iter = 5;
    const auto out = gfsc::gfsc(planted(5, 0.2, 60), p);
    const auto q = build_laplacian(out.state.consensus);
    const auto& f = out.state.embedding.F;
    Eigen::SelfAdjointEigenSolver<oracle::Mat> full(q.L);
    CHECK(std::abs((f.transpose() * q.L * f).trace() - full.eigenvalues().head(3).sum()) < 1e-8);
}

TEST_CASE("identical runs give identical traces")
{
    const auto data = planted(6, 0.2, 60);
    const auto a = gfsc::gfsc(data, planted_params(6));
    const auto b = gfsc::gfsc(data, planted_params(6));
    CHECK(a.result.labels == b.result.labels);
    REQUIRE(a.result.trace.iteration_count() == b.result.trace.iteration_count());
    for (int i = 0; i < a.result.trace.iteration_count(); ++i) {
        CHECK(a.result.trace.iterations[static_cast<std::size_t>(i)].objective ==
              b.result.trace.iterations[static_cast<std::size_t>(i)].objective);
        CHECK(a.result.trace.iterations[static_cast<std::size_t>(i)].weights ==
              b.result.trace.iterations[static_cast<std::size_t>(i)].weights);
    }
}

TEST_CASE("single view with vanishing beta and gamma collapses to spectral clustering")
{
    const auto full = planted(7, 0.3, 90);
    const MultiViewDataset<double> data({full.view(0)}, full.labels());
    Hyperparams p = planted_params(7);
    p.beta = 1e-9;
    p.gamma = 1e-15;
    p.max_iter = 1;
    SolverOptions o;
    o.normalize_embedding_rows = true;
    const auto out = gfsc::gfsc(data, p, o);
    const auto single = learn_single_view_graph(data.view(0), p.alpha);
    const auto expected = spectral_clustering(ConsensusGraph<double>(single.matrix), 3, p.seed);
    CHECK(accuracy(out.result.labels, expected) == 1.0);
}

TEST_CASE("GF with identical views keeps the stand-alone graph")
{
    std::mt19937_64 rng(54);
    const Matrix<double> q = Eigen::HouseholderQR<Matrix<double>>(oracle::gaussian(12, 8, rng))
                                 .householderQ() * Matrix<double>::Identity(12, 8);
    const MultiViewDataset<double> data({q, q, q});
    Hyperparams p;
    p.alpha = 0.5;
    p.k = 2;
    SolverOptions o;
    o.init = InitMode::WarmStart;
    const auto out = gf(data, p, o);
    const auto single = learn_single_view_graph(q, p.alpha);
    CHECK((out.state.consensus.raw() - single.matrix).norm() < 1e-10);
}

TEST_CASE("GF recovers planted clusters")
{
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto out = gf(planted(seed, 0.1), planted_params(seed));
        CHECK(*out.result.acc >= 0.95);
    }
}

TEST_CASE("warm start")
{
    SolverOptions o;
    o.init = InitMode::WarmStart;
    const auto out = gfsc::gfsc(planted(8), planted_params(8), o);
    CHECK(*out.result.acc == 1.0);
}

TEST_CASE("runaway consensus graph is a numerical failure")
{
    Hyperparams p = planted_params(9);
    p.beta = 1e-6;
    p.gamma = 1e6;
    CHECK_THROWS_AS(gfsc::gfsc(planted(9, 0.0, 30), p), NumericsError);
}

TEST_CASE("solver input errors")
{
    Hyperparams p = planted_params(0);
    p.k = 200;
    CHECK_THROWS_AS(gfsc::gfsc(planted(0, 0.0, 30), p), InputError);
}
