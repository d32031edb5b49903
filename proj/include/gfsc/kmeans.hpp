#pragma once

#include <limits>
#include <random>

#include "gfsc/types.hpp"

namespace gfsc {

struct KMeansOptions
{
    int restarts = 20;
    int max_iter = 300;
};

struct KMeansResult
{
    Labels labels;
    double inertia = 0;
    int restart = 0;
};

namespace detail {

inline std::mt19937_64 restart_engine(std::uint64_t seed, int restart)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart), 0x6b6d65u};
    return std::mt19937_64(seq);
}

template <typename Scalar>
Matrix<Scalar> kmeanspp_seed(const Matrix<Scalar>& points, int k, std::mt19937_64& rng)
{
    const Index n = points.rows();
    Matrix<Scalar> centers(k, points.cols());
    std::uniform_int_distribution<Index> pick(0, n - 1);
    centers.row(0) = points.row(pick(rng));
    Vector<Scalar> closest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int c = 1; c < k; ++c) {
        const double total = static_cast<double>(closest.sum());
        Index chosen = 0;
        if (total > 0) {
            double target = unit(rng) * total;
            for (chosen = 0; chosen < n - 1; ++chosen) {
                target -= static_cast<double>(closest[chosen]);
                if (target < 0) break;
            }
        } else {
            chosen = pick(rng);
        }
        centers.row(c) = points.row(chosen);
        closest = closest.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

template <typename Scalar>
KMeansResult lloyd(const Matrix<Scalar>& points, Matrix<Scalar> centers, int max_iter)
{
    const Index n = points.rows();
    const int k = static_cast<int>(centers.rows());
    Labels labels(static_cast<std::size_t>(n), -1);
    Vector<Scalar> best_dist(n);

    auto assign = [&]() {
        bool changed = false;
        for (Index i = 0; i < n; ++i) {
            Index c;
            best_dist[i] = (centers.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(&c);
            if (labels[static_cast<std::size_t>(i)] != static_cast<int>(c)) {
                labels[static_cast<std::size_t>(i)] = static_cast<int>(c);
                changed = true;
            }
        }
        return changed;
    };

    assign();
    for (int iter = 0; iter < max_iter; ++iter) {
        Matrix<Scalar> sums = Matrix<Scalar>::Zero(k, points.cols());
        std::vector<Index> counts(static_cast<std::size_t>(k), 0);
        for (Index i = 0; i < n; ++i) {
            const int c = labels[static_cast<std::size_t>(i)];
            sums.row(c) += points.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.row(c) = sums.row(c) / Scalar(counts[static_cast<std::size_t>(c)]);
                continue;
            }
            // Empty cluster: move it onto the point farthest from its own centroid.
            Index far;
            best_dist.maxCoeff(&far);
            centers.row(c) = points.row(far);
            best_dist[far] = 0;
        }
        if (!assign()) break;
    }
    return {labels, static_cast<double>(best_dist.sum()), 0};
}

} // namespace detail

/// Lloyd's algorithm from k-means++ seeds; the restart with the lowest
/// within-cluster sum of squares wins (ties go to the earlier restart).
/// Rows of `points` are observations.
template <typename Scalar>
KMeansResult kmeans(const Matrix<Scalar>& points, int k, std::uint64_t seed,
                    const KMeansOptions& options = {})
{
    if (k < 1) throw InputError("k-means needs k >= 1");
    if (k > points.rows())
        throw InputError("k-means asked for " + std::to_string(k) + " clusters from " +
                         std::to_string(points.rows()) + " points");
    if (!all_finite(points)) throw NumericsError("k-means input contains non-finite values");

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, options.restarts); ++r) {
        auto rng = detail::restart_engine(seed, r);
        auto result = detail::lloyd(points, detail::kmeanspp_seed(points, k, rng), options.max_iter);
        if (result.inertia < best.inertia) {
            best = std::move(result);
            best.restart = r;
        }
    }
    return best;
}

} // namespace gfsc
