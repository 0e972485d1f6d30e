#include "buildtime/tree.hpp"

#include <algorithm>
#include <numeric>

#include "buildtime/error.hpp"

namespace buildtime {

int DecisionTree::leaf_of(const Matrix& x, Index row) const
{
    int at = 0;
    while (!nodes_[static_cast<std::size_t>(at)].is_leaf()) {
        const auto& node = nodes_[static_cast<std::size_t>(at)];
        at = x(row, node.feature) <= node.threshold ? node.left : node.right;
    }
    return at;
}

double DecisionTree::predict_row(const Matrix& x, Index row) const
{
    return nodes_[static_cast<std::size_t>(leaf_of(x, row))].value;
}

Vector DecisionTree::predict(const Matrix& x) const
{
    Vector out(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
        out(i) = predict_row(x, i);
    }
    return out;
}

std::size_t DecisionTree::leaf_count() const
{
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int DecisionTree::depth() const
{
    if (nodes_.empty()) {
        return 0;
    }
    std::vector<int> depth_of(nodes_.size(), 0);
    int deepest = 0;
    // Children are always stored after their parent.
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& node = nodes_[i];
        deepest = std::max(deepest, depth_of[i]);
        if (!node.is_leaf()) {
            depth_of[static_cast<std::size_t>(node.left)] = depth_of[i] + 1;
            depth_of[static_cast<std::size_t>(node.right)] = depth_of[i] + 1;
        }
    }
    return deepest;
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const Vector& y, std::span<const std::size_t> rows, const TreeParams& params, Rng* rng,
                std::vector<double>* importance)
        : x_(x), y_(y), params_(params), rng_(rng), importance_(importance), rows_(rows.begin(), rows.end())
    {
        const auto p = static_cast<std::size_t>(x.cols());
        pool_.resize(p);
        std::iota(pool_.begin(), pool_.end(), std::size_t{0});
        scratch_.reserve(rows_.size());
        if (params_.mtry > 0 && params_.mtry < p && rng_ == nullptr) {
            throw InvalidArgument("feature subsampling requires a random source");
        }
        if (params_.min_samples_leaf < 1) {
            throw InvalidArgument("min_samples_leaf must be >= 1");
        }
    }

    std::vector<TreeNode> build()
    {
        if (!rows_.empty()) {
            grow(0, rows_.size(), 0);
        }
        return std::move(nodes_);
    }

private:
    struct Split {
        Index feature = -1;
        double threshold = 0.0;
        double reduction = 0.0;
    };

    int grow(std::size_t begin, std::size_t end, int depth)
    {
        const std::size_t m = end - begin;
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            sum += y_(static_cast<Index>(rows_[i]));
        }
        const double mean = sum / static_cast<double>(m);

        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(TreeNode{-1, 0.0, -1, -1, mean, m});

        if (depth >= params_.max_depth || m < 2 * params_.min_samples_leaf) {
            return id;
        }
        const Split best = find_split(begin, end, mean);
        if (best.feature < 0 || best.reduction / static_cast<double>(m) < params_.min_variance_decrease) {
            return id;
        }

        auto first = rows_.begin() + static_cast<std::ptrdiff_t>(begin);
        auto last = rows_.begin() + static_cast<std::ptrdiff_t>(end);
        auto middle = std::stable_partition(first, last, [&](std::size_t r) {
            return x_(static_cast<Index>(r), best.feature) <= best.threshold;
        });
        const auto mid = static_cast<std::size_t>(middle - rows_.begin());

        if (importance_) {
            (*importance_)[static_cast<std::size_t>(best.feature)] += best.reduction;
        }
        const int left = grow(begin, mid, depth + 1);
        const int right = grow(mid, end, depth + 1);
        auto& node = nodes_[static_cast<std::size_t>(id)];
        node.feature = static_cast<int>(best.feature);
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    Split find_split(std::size_t begin, std::size_t end, double mean)
    {
        const std::size_t m = end - begin;
        const std::size_t p = pool_.size();
        std::size_t n_candidates = p;
        if (params_.mtry > 0 && params_.mtry < p) {
            n_candidates = params_.mtry;
            for (std::size_t i = 0; i < n_candidates; ++i) {
                std::swap(pool_[i], pool_[i + rng_->uniform_index(p - i)]);
            }
            // Kept in draw order: equal-gain splits then go to a random
            // candidate rather than always to the lowest column index.
            candidates_.assign(pool_.begin(), pool_.begin() + static_cast<std::ptrdiff_t>(n_candidates));
        } else {
            candidates_.resize(p);
            std::iota(candidates_.begin(), candidates_.end(), std::size_t{0});
        }

        const auto md = static_cast<double>(m);
        const std::size_t min_leaf = params_.min_samples_leaf;
        Split best;
        for (std::size_t f : candidates_) {
            const auto col = static_cast<Index>(f);
            scratch_.clear();
            double total = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                const auto r = static_cast<Index>(rows_[i]);
                const double centered = y_(r) - mean;
                scratch_.emplace_back(x_(r, col), centered);
                total += centered;
            }
            std::sort(scratch_.begin(), scratch_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (scratch_.front().first == scratch_.back().first) {
                continue;
            }
            const double base = total * total / md;
            double left_sum = 0.0;
            for (std::size_t i = 0; i + 1 < m; ++i) {
                left_sum += scratch_[i].second;
                const std::size_t n_left = i + 1;
                const std::size_t n_right = m - n_left;
                if (n_right < min_leaf) {
                    break;
                }
                if (n_left < min_leaf || scratch_[i].first == scratch_[i + 1].first) {
                    continue;
                }
                const double right_sum = total - left_sum;
                const double reduction = left_sum * left_sum / static_cast<double>(n_left) +
                                         right_sum * right_sum / static_cast<double>(n_right) - base;
                if (reduction > best.reduction) {
                    const double a = scratch_[i].first;
                    const double b = scratch_[i + 1].first;
                    double threshold = a + (b - a) / 2.0;
                    if (!(threshold < b)) {
                        threshold = a;
                    }
                    best = Split{col, threshold, reduction};
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    const Vector& y_;
    TreeParams params_;
    Rng* rng_;
    std::vector<double>* importance_;
    std::vector<std::size_t> rows_;
    std::vector<std::size_t> pool_;
    std::vector<std::size_t> candidates_;
    std::vector<std::pair<double, double>> scratch_;
    std::vector<TreeNode> nodes_;
};

} // namespace

DecisionTree grow_tree(const Matrix& x, const Vector& y, std::span<const std::size_t> rows, const TreeParams& params,
                       Rng* rng, std::vector<double>* importance)
{
    if (y.size() != x.rows()) {
        throw InvalidArgument("response length does not match row count");
    }
    if (rows.empty()) {
        throw InvalidArgument("cannot grow a tree on zero rows");
    }
    if (importance && importance->size() != static_cast<std::size_t>(x.cols())) {
        importance->assign(static_cast<std::size_t>(x.cols()), 0.0);
    }
    TreeBuilder builder(x, y, rows, params, rng, importance);
    return DecisionTree(builder.build());
}

} // namespace buildtime
