#pragma once

#include "gfsc/types.hpp"

namespace gfsc {

/// Maps every row (feature) of `m` affinely onto [-1, 1]. Constant rows become 0.
template <typename Derived>
Matrix<typename Derived::Scalar> normalize_features(const Eigen::MatrixBase<Derived>& m)
{
    using Scalar = typename Derived::Scalar;
    Matrix<Scalar> out(m.rows(), m.cols());
    for (Index r = 0; r < m.rows(); ++r) {
        const Scalar lo = m.row(r).minCoeff();
        const Scalar hi = m.row(r).maxCoeff();
        const Scalar range = hi - lo;
        if (!(range > Scalar(0))) {
            out.row(r).setZero();
            continue;
        }
        out.row(r) = ((m.row(r).array() - lo) / range * Scalar(2) - Scalar(1))
                         .cwiseMax(Scalar(-1))
                         .cwiseMin(Scalar(1))
                         .matrix();
    }
    return out;
}

template <typename Scalar>
MultiViewDataset<Scalar> normalize_dataset(const MultiViewDataset<Scalar>& raw)
{
    std::vector<Matrix<Scalar>> views;
    views.reserve(raw.views().size());
    for (const auto& x : raw.views()) {
        if (!all_finite(x)) throw DatasetError("dataset contains non-finite feature values");
        views.push_back(normalize_features(x));
    }
    return MultiViewDataset<Scalar>(std::move(views), raw.labels(), raw.view_names());
}

} // namespace gfsc
