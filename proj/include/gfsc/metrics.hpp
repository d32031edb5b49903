#pragma once

#include <vector>

#include "gfsc/kmeans.hpp"
#include "gfsc/types.hpp"

namespace gfsc {

/// counts[i][j] = #samples with pred cluster i and truth class j (labels re-encoded first).
std::vector<std::vector<long>> contingency(const Labels& pred, const Labels& truth);

/// Maximum-weight perfect matching on a square matrix; returns the column
/// assigned to each row.
std::vector<int> hungarian_max(const std::vector<std::vector<long>>& weights);

/// Fraction of samples on the best one-to-one cluster/class matching.
double accuracy(const Labels& pred, const Labels& truth);

/// I(pred; truth) / sqrt(H(pred) H(truth)) with natural logs.
double nmi(const Labels& pred, const Labels& truth);

/// (1/n) sum over clusters of the size of its majority class.
double purity(const Labels& pred, const Labels& truth);

struct ClusterScores
{
    double acc = 0;
    double nmi = 0;
    double purity = 0;
};

ClusterScores score(const Labels& pred, const Labels& truth);

} // namespace gfsc
