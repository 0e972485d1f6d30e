#include "buildtime/ensemble.hpp"

#include <cmath>
#include <numeric>

#include "buildtime/error.hpp"
#include "buildtime/parallel.hpp"

namespace buildtime {

namespace {

void normalize(std::vector<double>& importance)
{
    const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
    if (total > 0.0) {
        for (double& v : importance) {
            v /= total;
        }
    }
}

TreeEnsemble fit_forest(const Matrix& x, const Vector& y, const ForestParams& params)
{
    if (params.n_trees < 1) {
        throw InvalidArgument("an ensemble needs at least one tree");
    }
    if (y.size() != x.rows() || x.rows() == 0) {
        throw InvalidArgument("ensemble needs a non-empty design matching the response");
    }
    const auto n = static_cast<std::size_t>(x.rows());
    const auto p = static_cast<std::size_t>(x.cols());

    TreeEnsemble ensemble;
    ensemble.trees.resize(params.n_trees);
    std::vector<std::vector<double>> importance(params.n_trees, std::vector<double>(p, 0.0));

    parallel_for(params.n_trees, [&](std::size_t t) {
        Rng rng(derive_seed(params.seed, {t}));
        std::vector<std::size_t> rows(n);
        if (params.bootstrap) {
            for (auto& r : rows) {
                r = rng.uniform_index(n);
            }
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        ensemble.trees[t] = grow_tree(x, y, rows, params.tree, &rng, &importance[t]);
    });

    ensemble.importance.assign(p, 0.0);
    for (const auto& per_tree : importance) {
        for (std::size_t j = 0; j < p; ++j) {
            ensemble.importance[j] += per_tree[j];
        }
    }
    normalize(ensemble.importance);
    return ensemble;
}

} // namespace

Vector TreeEnsemble::predict(const Matrix& x) const
{
    Vector sum = Vector::Zero(x.rows());
    for (const auto& tree : trees) {
        sum += tree.predict(x);
    }
    return sum / static_cast<double>(trees.size());
}

Matrix TreeEnsemble::per_tree_predictions(const Matrix& x) const
{
    Matrix out(x.rows(), static_cast<Index>(trees.size()));
    for (std::size_t t = 0; t < trees.size(); ++t) {
        out.col(static_cast<Index>(t)) = trees[t].predict(x);
    }
    return out;
}

TreeEnsemble fit_cart(const Matrix& x, const Vector& y, const TreeParams& params)
{
    ForestParams forest;
    forest.n_trees = 1;
    forest.bootstrap = false;
    forest.tree = params;
    forest.tree.mtry = 0;
    return fit_forest(x, y, forest);
}

TreeEnsemble fit_bagged_cart(const Matrix& x, const Vector& y, ForestParams params)
{
    params.tree.mtry = 0;
    return fit_forest(x, y, params);
}

TreeEnsemble fit_random_forest(const Matrix& x, const Vector& y, const ForestParams& params)
{
    const auto p = static_cast<std::size_t>(x.cols());
    if (params.tree.mtry < 1 || params.tree.mtry > p) {
        throw InvalidArgument("mtry = " + std::to_string(params.tree.mtry) + " out of range [1, " +
                              std::to_string(p) + "]");
    }
    return fit_forest(x, y, params);
}

Vector BoostedTrees::predict(const Matrix& x) const
{
    Vector f = Vector::Constant(x.rows(), base);
    for (const auto& tree : trees) {
        f += learning_rate * tree.predict(x);
    }
    return f;
}

BoostedTrees fit_sgb(const Matrix& x, const Vector& y, const BoostingParams& params)
{
    if (!(params.learning_rate >= 0.0 && params.learning_rate <= 1.0)) {
        throw InvalidArgument("learning rate must lie in [0, 1]");
    }
    if (!(params.subsample > 0.0 && params.subsample <= 1.0)) {
        throw InvalidArgument("subsample fraction must lie in (0, 1]");
    }
    if (params.n_trees < 1) {
        throw InvalidArgument("boosting needs at least one stage");
    }
    if (y.size() != x.rows() || x.rows() == 0) {
        throw InvalidArgument("boosting needs a non-empty design matching the response");
    }
    const auto n = static_cast<std::size_t>(x.rows());
    const auto p = static_cast<std::size_t>(x.cols());

    BoostedTrees model;
    model.base = y.mean();
    model.learning_rate = params.learning_rate;
    model.importance.assign(p, 0.0);

    TreeParams tree_params = params.tree;
    tree_params.mtry = 0;
    const auto stage_rows = params.subsample >= 1.0
                                ? n
                                : std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.subsample * static_cast<double>(n))));

    Vector fitted = Vector::Constant(x.rows(), model.base);
    std::vector<std::size_t> rows(n);
    std::vector<double> importance(p);
    for (std::size_t stage = 0; stage < params.n_trees; ++stage) {
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        if (stage_rows < n) {
            Rng rng(derive_seed(params.seed, {stage}));
            for (std::size_t i = 0; i < stage_rows; ++i) {
                std::swap(rows[i], rows[i + rng.uniform_index(n - i)]);
            }
        }
        const Vector residual = y - fitted;
        std::fill(importance.begin(), importance.end(), 0.0);
        auto tree = grow_tree(x, residual, std::span(rows.data(), stage_rows), tree_params, nullptr, &importance);
        fitted += params.learning_rate * tree.predict(x);
        for (std::size_t j = 0; j < p; ++j) {
            model.importance[j] += importance[j];
        }
        model.trees.push_back(std::move(tree));
        model.training_rmse.push_back(std::sqrt((y - fitted).squaredNorm() / static_cast<double>(n)));
    }
    normalize(model.importance);
    return model;
}

} // namespace buildtime
