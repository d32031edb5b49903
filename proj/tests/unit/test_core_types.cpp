#include <doctest.h>

#include "gfsc/normalize.hpp"
#include "gfsc/types.hpp"
#include "oracles.hpp"

using namespace gfsc;

TEST_CASE("dataset validation")
{
    const Matrix<double> a = Matrix<double>::Ones(3, 5);
    const Matrix<double> b = Matrix<double>::Ones(2, 4);
    CHECK_THROWS_AS(MultiViewDataset<double>({a, b}), DatasetError);
    CHECK_THROWS_AS(MultiViewDataset<double>(std::vector<Matrix<double>>{}), DatasetError);
    CHECK_THROWS_AS(MultiViewDataset<double>({a}, Labels{0, 1}), DatasetError);
    CHECK_THROWS_AS(MultiViewDataset<double>({Matrix<double>(0, 5)}), DatasetError);

    MultiViewDataset<double> d({a, Matrix<double>::Zero(2, 5)}, Labels{7, 7, 3, 9, 3});
    CHECK(d.n() == 5);
    CHECK(d.t() == 2);
    CHECK(d.num_classes() == 3);
    CHECK(*d.labels() == Labels{1, 1, 0, 2, 0});
    CHECK(d.view_names() == std::vector<std::string>{"view1", "view2"});
}

TEST_CASE("consensus graph keeps raw and symmetrized copies")
{
    Matrix<double> s(2, 2);
    s << 0.5, -1.0, 2.0, -0.25;
    const ConsensusGraph<double> g(s);
    CHECK(g.raw() == s);
    CHECK(g.symmetrized()(0, 1) == doctest::Approx(0.5));
    CHECK(g.symmetrized()(1, 0) == doctest::Approx(0.5));
    CHECK(g.symmetrized()(1, 1) == 0.0);
    CHECK((g.symmetrized() - g.symmetrized().transpose()).norm() < 1e-12);
    CHECK_THROWS_AS(ConsensusGraph<double>(Matrix<double>(2, 3)), DimensionError);
}

TEST_CASE("view weights must be positive and finite")
{
    CHECK_THROWS_AS(ViewWeights<double>(Vector<double>::Zero(2)), NumericsError);
    Vector<double> bad(2);
    bad << 1.0, std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(ViewWeights<double>{bad}, NumericsError);
    const auto w = ViewWeights<double>::uniform(4);
    for (Index v = 0; v < 4; ++v) CHECK(w[v] == 0.25);
}

TEST_CASE("hyperparameter validation")
{
    Hyperparams p;
    CHECK_NOTHROW(p.validate());
    p.gamma = 0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    p.k = 1;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    p.tol = -1;
    CHECK_THROWS_AS(p.validate(), InputError);
}

TEST_CASE("feature normalization examples")
{
    Matrix<double> x(3, 3);
    x << 0, 5, 10,
         3, 3, 3,
         1, 2, 4;
    const auto y = normalize_features(x);
    CHECK(y(0, 0) == -1.0);
    CHECK(y(0, 1) == doctest::Approx(0.0));
    CHECK(y(0, 2) == 1.0);
    CHECK(y.row(1).isZero());
    CHECK(y(2, 0) == -1.0);
    CHECK(y(2, 1) == doctest::Approx(2.0 * (2 - 1) / (4 - 1) - 1));
    CHECK(y(2, 2) == 1.0);
}

TEST_CASE("normalization range and idempotence")
{
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix<double> x = 50.0 * oracle::gaussian(7, 30, rng);
        const auto y = normalize_features(x);
        CHECK(y.maxCoeff() <= 1.0);
        CHECK(y.minCoeff() >= -1.0);
        CHECK((normalize_features(y) - y).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("normalize_dataset rejects non-finite input")
{
    Matrix<double> x = Matrix<double>::Ones(2, 3);
    x(1, 2) = std::nan("");
    CHECK_THROWS_AS(normalize_dataset(MultiViewDataset<double>({x})), DatasetError);
}

TEST_CASE("float instantiation")
{
    Matrix<float> x(1, 3);
    x << 0.f, 1.f, 2.f;
    const auto y = normalize_features(x);
    CHECK(y(0, 1) == doctest::Approx(0.0f));
}
