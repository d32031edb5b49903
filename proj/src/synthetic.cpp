#include <algorithm>
#include <numeric>
#include <random>

#include "gfsc/io.hpp"

namespace gfsc {

MultiViewDataset<double> generate_synthetic(long n, int t, int k, double noise, std::uint64_t seed)
{
    if (k < 1 || t < 1) throw InputError("synthetic data needs t >= 1 and k >= 1");
    if (n < 2L * k) throw InputError("synthetic data needs n >= 2k");
    if (!(noise >= 0)) throw InputError("noise must be nonnegative");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Labels labels(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % k);
    std::shuffle(labels.begin(), labels.end(), rng);

    std::vector<Matrix<double>> views;
    std::vector<std::string> names;
    for (int v = 0; v < t; ++v) {
        const Index m = k + 2 + v;
        Matrix<double> g(m, m);
        for (Index j = 0; j < m; ++j)
            for (Index i = 0; i < m; ++i) g(i, j) = normal(rng);
        const Matrix<double> rotation = Eigen::HouseholderQR<Matrix<double>>(g).householderQ();
        Matrix<double> x(m, n);
        for (long i = 0; i < n; ++i) {
            x.col(i) = rotation.col(labels[static_cast<std::size_t>(i)]);
            if (noise > 0)
                for (Index r = 0; r < m; ++r) x(r, i) += noise * normal(rng);
        }
        views.push_back(std::move(x));
        names.push_back("synthetic" + std::to_string(v + 1));
    }
    return MultiViewDataset<double>(std::move(views), std::move(labels), std::move(names));
}

} // namespace gfsc
