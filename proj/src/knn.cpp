#include "buildtime/knn.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "buildtime/error.hpp"

namespace buildtime {

KnnModel fit_knn(const Matrix& x, const Vector& y, std::size_t k)
{
    if (y.size() != x.rows()) {
        throw InvalidArgument("response length does not match row count");
    }
    if (k < 1 || k > static_cast<std::size_t>(x.rows())) {
        throw InvalidArgument("k = " + std::to_string(k) + " out of range [1, " + std::to_string(x.rows()) + "]");
    }
    return KnnModel{k, x, y};
}

Vector KnnModel::predict(const Matrix& query) const
{
    if (query.cols() != x.cols()) {
        throw InvalidArgument("KNN query has the wrong column count");
    }
    const Index n = x.rows();
    Vector out(query.rows());
    std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(n));
    Vector d2(n);
    for (Index q = 0; q < query.rows(); ++q) {
        d2.setZero();
        for (Index j = 0; j < x.cols(); ++j) {
            d2.array() += (x.col(j).array() - query(q, j)).square();
        }
        for (Index i = 0; i < n; ++i) {
            dist[static_cast<std::size_t>(i)] = {d2(i), i};
        }
        const auto kth = dist.begin() + static_cast<std::ptrdiff_t>(k);
        std::nth_element(dist.begin(), kth - 1, dist.end());
        std::sort(dist.begin(), kth);
        double sum = 0.0;
        for (auto it = dist.begin(); it != kth; ++it) {
            sum += y(it->second);
        }
        out(q) = sum / static_cast<double>(k);
    }
    return out;
}

} // namespace buildtime
