#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "buildtime/rng.hpp"
#include "buildtime/types.hpp"

namespace buildtime {

struct TreeParams {
    int max_depth = 30;
    std::size_t min_samples_leaf = 5;
    // A split must reduce the node's SSE by at least this much per sample.
    double min_variance_decrease = 1e-7;
    // Candidate columns per split; 0 or >= p means every column.
    std::size_t mtry = 0;
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0; // mean training response of the node
    std::size_t count = 0;

    [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }
};

// Binary regression tree. Rows with x[feature] <= threshold go left.
class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    [[nodiscard]] double predict_row(const Matrix& x, Index row) const;
    [[nodiscard]] Vector predict(const Matrix& x) const;
    // Index of the leaf a row is routed to.
    [[nodiscard]] int leaf_of(const Matrix& x, Index row) const;

    [[nodiscard]] const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t leaf_count() const;
    [[nodiscard]] int depth() const;

private:
    std::vector<TreeNode> nodes_;
};

// Grows a CART regression tree on the listed rows (duplicates allowed, as in
// a bootstrap resample). Splits minimize the weighted child SSE over
// midpoints of consecutive distinct values; exact ties go to the lower
// column index, then the lower threshold. When params.mtry < p a fresh
// subset of mtry columns is drawn from `rng` at every node. Per-feature SSE
// reductions are added to `importance` when it is non-null.
DecisionTree grow_tree(const Matrix& x, const Vector& y, std::span<const std::size_t> rows, const TreeParams& params,
                       Rng* rng = nullptr, std::vector<double>* importance = nullptr);

} // namespace buildtime
