#include <doctest.h>

#include "gfsc/metrics.hpp"
#include "gfsc/spectral.hpp"
#include "oracles.hpp"

using namespace gfsc;

TEST_CASE("two-node Laplacian")
{
    Matrix<double> w(2, 2);
    w << 0, 1, 1, 0;
    const auto q = laplacian(w);
    Matrix<double> expected(2, 2);
    expected << 1, -1, -1, 1;
    CHECK(q.L == expected);
    CHECK(q.degree == Vector<double>::Ones(2));
}

TEST_CASE("empty graph has a zero Laplacian")
{
    const auto q = build_laplacian(ConsensusGraph<double>(Matrix<double>::Zero(4, 4)));
    CHECK(q.L.isZero());
    CHECK(q.spectrum().isZero());
}

TEST_CASE("Laplacian invariants on random graphs")
{
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        const ConsensusGraph<double> s(oracle::uniform(12, 12, rng, -0.5, 1.0));
        const auto q = build_laplacian(s);
        CHECK(q.L.rowwise().sum().cwiseAbs().maxCoeff() < 1e-9);
        CHECK((q.L - q.L.transpose()).norm() == 0.0);
        CHECK(q.spectrum()[0] >= -1e-9);
    }
}

TEST_CASE("block graphs have one zero eigenvalue per block")
{
    std::mt19937_64 rng(32);
    for (int c = 1; c <= 5; ++c) {
        const oracle::Mat w = oracle::block_graph(c, 2, 7, rng);
        const auto sigma = laplacian(w).spectrum();
        int zeros = 0;
        for (Index i = 0; i < sigma.size(); ++i) zeros += std::abs(sigma[i]) < 1e-9;
        CHECK(zeros == c);
        const auto count = count_components(ConsensusGraph<double>(w));
        CHECK(count.count() == c);
        CHECK(count.agree());
    }
}

TEST_CASE("Ky Fan equality against the full spectrum")
{
    std::mt19937_64 rng(33);
    for (int rep = 0; rep < 10; ++rep) {
        const oracle::Mat a = oracle::gaussian(10, 10, rng);
        const Matrix<double> psd = a * a.transpose();
        const auto e = update_embedding(psd, 3);
        Eigen::SelfAdjointEigenSolver<oracle::Mat> full(psd);
        const double expected = full.eigenvalues().head(3).sum();
        CHECK(std::abs((e.F.transpose() * psd * e.F).trace() - expected) < 1e-8);
        CHECK(e.orthonormality_error() < 1e-8);
    }
}

TEST_CASE("embedding of zero Laplacian and of disconnected graphs")
{
    const auto zero = update_embedding(Matrix<double>(Matrix<double>::Zero(6, 6)), 3);
    CHECK(std::abs((zero.F.transpose() * Matrix<double>::Zero(6, 6) * zero.F).trace()) == 0.0);
    CHECK(zero.orthonormality_error() < 1e-8);

    std::mt19937_64 rng(34);
    const oracle::Mat w = oracle::block_graph(3, 3, 8, rng);
    const auto q = laplacian(w);
    const auto e = update_embedding(q, 3);
    CHECK(std::abs((e.F.transpose() * q.L * e.F).trace()) <= 1e-9);
}

TEST_CASE("embedding errors")
{
    CHECK_THROWS_AS(update_embedding(Matrix<double>(Matrix<double>::Zero(3, 3)), 4), InputError);
    CHECK_THROWS_AS(update_embedding(Matrix<double>(2, 3), 1), DimensionError);
}

TEST_CASE("pairwise distance identity")
{
    std::mt19937_64 rng(35);
    for (int rep = 0; rep < 10; ++rep) {
        const oracle::Mat f = oracle::gaussian(9, 3, rng);
        const ConsensusGraph<double> s(oracle::uniform(9, 9, rng));
        const oracle::Mat p = oracle::pairwise(f);
        CHECK((embedding_distances(f) - p).cwiseAbs().maxCoeff() < 1e-12);
        const oracle::Mat& w = s.symmetrized();
        double lhs = 0;
        for (Index i = 0; i < 9; ++i)
            for (Index j = 0; j < 9; ++j) lhs += 0.5 * p(i, j) * w(i, j);
        const auto q = build_laplacian(s);
        CHECK(std::abs(lhs - (f.transpose() * q.L * f).trace()) < 1e-8);
    }
}

TEST_CASE("component counts")
{
    Matrix<double> blocks = Matrix<double>::Zero(8, 8);
    for (int b = 0; b < 4; ++b) blocks.block(2 * b, 2 * b, 2, 2) = Matrix<double>::Identity(2, 2);
    for (int b = 0; b < 4; ++b) blocks(2 * b, 2 * b + 1) = blocks(2 * b + 1, 2 * b) = 1.0;
    CHECK(count_components(ConsensusGraph<double>(blocks)).count() == 4);

    CHECK(count_components(ConsensusGraph<double>(Matrix<double>::Ones(5, 5))).count() == 1);

    Matrix<double> cliques = Matrix<double>::Zero(6, 6);
    cliques.topLeftCorner(3, 3).setOnes();
    cliques.bottomRightCorner(3, 3).setOnes();
    cliques(2, 3) = cliques(3, 2) = 1e-6;
    const ConsensusGraph<double> weak(cliques);
    CHECK(count_components_by_traversal(weak.symmetrized(), 1e-5) == 2);
    const auto sigma = build_laplacian(weak).spectrum();
    CHECK(sigma[0] < 1e-12);
    CHECK(sigma[1] < 1e-5);
    CHECK(sigma[2] > 1.0);
}

TEST_CASE("row normalization")
{
    Matrix<double> f(3, 2);
    f << 3, 4, 0, 0, 1e-13, 0;
    const auto g = normalize_rows(f);
    CHECK(g(0, 0) == doctest::Approx(0.6));
    CHECK(g(0, 1) == doctest::Approx(0.8));
    CHECK(g.row(1).isZero());
    CHECK(g.row(2).isZero());
}

TEST_CASE("spectral clustering recovers separated blocks")
{
    std::mt19937_64 rng(36);
    std::vector<int> truth;
    const oracle::Mat w = oracle::block_graph(4, 4, 9, rng, &truth);
    const auto labels = spectral_clustering(ConsensusGraph<double>(w), 4, 5);
    CHECK(accuracy(labels, truth) == 1.0);
}

TEST_CASE("duplicated samples share a label")
{
    std::mt19937_64 rng(37);
    std::vector<int> truth;
    const oracle::Mat w = oracle::block_graph(3, 3, 5, rng, &truth);
    const Index n = w.rows();
    oracle::Mat dup(2 * n, 2 * n);
    dup << w, w, w, w;
    const auto labels = spectral_clustering(ConsensusGraph<double>(dup), 3, 1);
    for (Index i = 0; i < n; ++i) CHECK(labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(i + n)]);
}

TEST_CASE("spectral clustering of a geometric three-cluster graph")
{
    std::mt19937_64 rng(38);
    std::normal_distribution<double> noise(0.0, 0.35);
    const double centers[3][2] = {{0, 0}, {4, 0}, {2, 3.5}};
    oracle::Mat pts(90, 2);
    std::vector<int> truth;
    for (Index i = 0; i < 90; ++i) {
        const int c = static_cast<int>(i % 3);
        truth.push_back(c);
        pts(i, 0) = centers[c][0] + noise(rng);
        pts(i, 1) = centers[c][1] + noise(rng);
    }
    oracle::Mat w(90, 90);
    for (Index i = 0; i < 90; ++i)
        for (Index j = 0; j < 90; ++j)
            w(i, j) = i == j ? 0.0 : std::exp(-(pts.row(i) - pts.row(j)).squaredNorm() / 0.5);
    const auto labels = spectral_clustering(ConsensusGraph<double>(w), 3, 2);
    CHECK(accuracy(labels, truth) >= 0.95);
}

TEST_CASE("partial and dense eigensolvers agree")
{
    std::mt19937_64 rng(39);
    for (int c = 1; c <= 4; ++c) {
        oracle::Mat w = oracle::block_graph(c, 10, 20, rng);
        // Weak links between consecutive blocks leave a clear spectral gap after c.
        const Index n = w.rows();
        for (Index i = 0; i + 1 < n; ++i)
            if (w(i, i + 1) == 0.0) w(i, i + 1) = w(i + 1, i) = 1e-4;
        const Matrix<double> L = laplacian(w).L;
        const auto [values, vectors] = detail::smallest_eigenpairs(L, c);
        const auto [dense_values, dense_vectors] = detail::dense_smallest_eigenpairs(L, c);
        CHECK((values - dense_values).cwiseAbs().maxCoeff() < 1e-10);
        // Eigenspaces, not eigenvectors, are comparable.
        const Matrix<double> proj = vectors * vectors.transpose();
        const Matrix<double> dense_proj = dense_vectors * dense_vectors.transpose();
        CHECK((proj - dense_proj).norm() < 1e-6);
    }
}
