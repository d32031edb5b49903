#include "gfsc/metrics.hpp"

#include <cmath>
#include <limits>

namespace gfsc {

namespace {

void check_pair(const Labels& pred, const Labels& truth)
{
    if (pred.size() != truth.size())
        throw MetricError("label length mismatch: " + std::to_string(pred.size()) + " vs " +
                          std::to_string(truth.size()));
    if (pred.empty()) throw MetricError("metrics need at least one sample");
}

double entropy(const std::vector<long>& counts, double n)
{
    double h = 0;
    for (long c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h;
}

} // namespace

std::vector<std::vector<long>> contingency(const Labels& pred, const Labels& truth)
{
    check_pair(pred, truth);
    const Labels a = reencode_labels(pred);
    const Labels b = reencode_labels(truth);
    std::vector<std::vector<long>> counts(static_cast<std::size_t>(count_distinct(a)),
                                          std::vector<long>(static_cast<std::size_t>(count_distinct(b)), 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        ++counts[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])];
    return counts;
}

std::vector<int> hungarian_max(const std::vector<std::vector<long>>& weights)
{
    // Shortest augmenting path formulation on costs max - w, 1-based potentials.
    const std::size_t n = weights.size();
    long top = 0;
    for (const auto& row : weights) {
        if (row.size() != n) throw MetricError("assignment matrix must be square");
        for (long w : row) top = std::max(top, w);
    }
    auto cost = [&](std::size_t i, std::size_t j) { return top - weights[i - 1][j - 1]; };

    constexpr long inf = std::numeric_limits<long>::max() / 4;
    std::vector<long> u(n + 1, 0), v(n + 1, 0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<long> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            long delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const long cur = cost(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(n, -1);
    for (std::size_t j = 1; j <= n; ++j)
        if (match[j] != 0) assignment[match[j] - 1] = static_cast<int>(j - 1);
    return assignment;
}

double accuracy(const Labels& pred, const Labels& truth)
{
    auto counts = contingency(pred, truth);
    const std::size_t size = std::max(counts.size(), counts.front().size());
    counts.resize(size);
    for (auto& row : counts) row.resize(size, 0);
    const auto assignment = hungarian_max(counts);
    long matched = 0;
    for (std::size_t i = 0; i < size; ++i) matched += counts[i][static_cast<std::size_t>(assignment[i])];
    return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(const Labels& pred, const Labels& truth)
{
    const auto counts = contingency(pred, truth);
    const double n = static_cast<double>(pred.size());
    std::vector<long> rows(counts.size(), 0), cols(counts.front().size(), 0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            rows[i] += counts[i][j];
            cols[j] += counts[i][j];
        }
    }
    const double hp = entropy(rows, n);
    const double ht = entropy(cols, n);
    if (rows.size() == 1 && cols.size() == 1) return 1.0;
    if (hp <= 0 || ht <= 0) return 0.0;

    double mi = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const long c = counts[i][j];
            if (c == 0) continue;
            const double pij = static_cast<double>(c) / n;
            mi += pij * std::log(pij * n * n / (static_cast<double>(rows[i]) * static_cast<double>(cols[j])));
        }
    }
    return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

double purity(const Labels& pred, const Labels& truth)
{
    const auto counts = contingency(pred, truth);
    long majority = 0;
    for (const auto& row : counts) majority += *std::max_element(row.begin(), row.end());
    return static_cast<double>(majority) / static_cast<double>(pred.size());
}

ClusterScores score(const Labels& pred, const Labels& truth)
{
    return {accuracy(pred, truth), nmi(pred, truth), purity(pred, truth)};
}

} // namespace gfsc
