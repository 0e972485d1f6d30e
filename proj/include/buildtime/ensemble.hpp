#pragma once

#include <cstdint>
#include <vector>

#include "buildtime/tree.hpp"
#include "buildtime/types.hpp"

namespace buildtime {

// Equal-weight average of regression trees. A single CART, bagged CART and
// random forest all fit into this shape.
struct TreeEnsemble {
    std::vector<DecisionTree> trees;
    std::vector<double> importance; // normalized to sum 1 when any split occurred

    [[nodiscard]] Vector predict(const Matrix& x) const;
    // n x n_trees matrix of individual tree outputs.
    [[nodiscard]] Matrix per_tree_predictions(const Matrix& x) const;
};

struct ForestParams {
    std::size_t n_trees = 500;
    TreeParams tree;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

TreeEnsemble fit_cart(const Matrix& x, const Vector& y, const TreeParams& params);

// Trees on bootstrap resamples, every column considered at each split.
TreeEnsemble fit_bagged_cart(const Matrix& x, const Vector& y, ForestParams params);

// Bagging plus a fresh random subset of params.tree.mtry columns per split.
TreeEnsemble fit_random_forest(const Matrix& x, const Vector& y, const ForestParams& params);

// Stagewise additive trees on residuals of the running fit.
struct BoostedTrees {
    double base = 0.0; // mean of the training response
    double learning_rate = 0.1;
    std::vector<DecisionTree> trees;
    std::vector<double> importance;
    std::vector<double> training_rmse; // after each stage, on all training rows

    [[nodiscard]] Vector predict(const Matrix& x) const;
};

struct BoostingParams {
    std::size_t n_trees = 150;
    double learning_rate = 0.1;
    double subsample = 0.5;
    TreeParams tree{3, 5, 1e-7, 0};
    std::uint64_t seed = 0;
};

BoostedTrees fit_sgb(const Matrix& x, const Vector& y, const BoostingParams& params);

} // namespace buildtime
