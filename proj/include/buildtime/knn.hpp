#pragma once

#include <cstddef>

#include "buildtime/types.hpp"

namespace buildtime {

// Stores the training set; prediction averages the k nearest responses under
// Euclidean distance, distance ties going to the lower row index.
struct KnnModel {
    std::size_t k = 5;
    Matrix x;
    Vector y;

    [[nodiscard]] Vector predict(const Matrix& query) const;
};

KnnModel fit_knn(const Matrix& x, const Vector& y, std::size_t k);

} // namespace buildtime
