#include "buildtime/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "buildtime/csv.hpp"
#include "buildtime/error.hpp"
#include "buildtime/parallel.hpp"
#include "buildtime/report.hpp"
#include "buildtime/rng.hpp"

namespace buildtime {

namespace {

Matrix take_columns(const Matrix& x, std::span<const std::size_t> columns)
{
    Matrix out(x.rows(), static_cast<Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        out.col(static_cast<Index>(j)) = x.col(static_cast<Index>(columns[j]));
    }
    return out;
}

Matrix take(const Matrix& x, std::span<const std::size_t> rows, std::span<const std::size_t> columns)
{
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out(static_cast<Index>(i), static_cast<Index>(j)) =
                x(static_cast<Index>(rows[i]), static_cast<Index>(columns[j]));
        }
    }
    return out;
}

Vector take(const Vector& y, std::span<const std::size_t> rows)
{
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out(static_cast<Index>(i)) = y(static_cast<Index>(rows[i]));
    }
    return out;
}

std::vector<std::string> names_of(const std::vector<std::string>& all, std::span<const std::size_t> columns)
{
    std::vector<std::string> out;
    out.reserve(columns.size());
    for (auto c : columns) {
        out.push_back(all[c]);
    }
    return out;
}

// A spec whose mtry fits a subset of `p` columns.
RegressorSpec for_width(RegressorSpec spec, std::size_t p)
{
    auto it = spec.hyperparameters.find("mtry");
    if (it != spec.hyperparameters.end() && it->second > static_cast<double>(p)) {
        it->second = static_cast<double>(p);
    }
    return spec;
}

std::vector<double> require_importance(const RegressorModel& model)
{
    auto importance = model.importance();
    if (!importance) {
        throw InvalidArgument(std::string(to_string(model.family())) + " does not report feature importance");
    }
    return *importance;
}

// Column indices by descending importance; ties keep the lower index first.
std::vector<std::size_t> rank_by_importance(const std::vector<double>& importance)
{
    std::vector<std::size_t> order(importance.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
    return order;
}

std::vector<std::size_t> top_in_original_order(const std::vector<std::size_t>& ranking, std::size_t size)
{
    std::vector<std::size_t> subset(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(subset.begin(), subset.end());
    return subset;
}

double log_choose(std::size_t n, std::size_t k)
{
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// P(X >= h) for X ~ Binomial(n, 1/2).
double upper_tail(std::size_t h, std::size_t n)
{
    if (h == 0) {
        return 1.0;
    }
    const double log_half_n = -static_cast<double>(n) * std::log(2.0);
    double total = 0.0;
    for (std::size_t j = h; j <= n; ++j) {
        total += std::exp(log_choose(n, j) + log_half_n);
    }
    return std::min(total, 1.0);
}

} // namespace

std::string RfeProfile::to_csv() const
{
    std::string out = "size,mean_rmse,sd_rmse,best\n";
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        out += std::to_string(sizes[s]) + "," + format_number(mean_rmse[s]) + "," + format_number(sd_rmse[s]) + "," +
               (sizes[s] == best_size ? "1" : "0") + "\n";
    }
    return out;
}

nlohmann::json RfeProfile::to_json() const
{
    return {{"kind", "rfe"},          {"sizes", sizes},
            {"mean_rmse", mean_rmse}, {"sd_rmse", sd_rmse},
            {"fold_rmse", fold_rmse}, {"best_size", best_size},
            {"best_features", best_features}, {"ranking", ranking}};
}

RfeProfile rfe(const FeatureMatrix& data, const std::vector<std::size_t>& sizes, const CvSpec& cv,
               const RegressorSpec& spec)
{
    const auto p = static_cast<std::size_t>(data.cols());
    if (sizes.empty()) {
        throw InvalidArgument("rfe needs at least one subset size");
    }
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        if (sizes[s] < 1 || sizes[s] > p) {
            throw InvalidArgument("rfe subset size " + std::to_string(sizes[s]) + " is outside [1, " +
                                  std::to_string(p) + "]");
        }
        if (s > 0 && sizes[s] <= sizes[s - 1]) {
            throw InvalidArgument("rfe subset sizes must be strictly ascending");
        }
    }
    resolve_hyperparameters(spec.family, spec.hyperparameters);

    const FoldAssignment folds = kfold_indices(static_cast<std::size_t>(data.rows()), cv);
    const std::size_t k = folds.k;
    const std::size_t tasks = folds.repeats() * k;
    std::vector<std::vector<double>> per_task(tasks, std::vector<double>(sizes.size()));

    parallel_for(tasks, [&](std::size_t task) {
        const std::size_t repeat = task / k;
        const std::size_t fold = task % k;
        const auto train_rows = folds.training(repeat, fold);
        const auto held_rows = folds.held_out(repeat, fold);
        RegressorSpec fold_spec = spec;
        fold_spec.seed = fold_model_seed(spec.seed, repeat, fold);

        const Matrix x_train = data.values(train_rows, Eigen::all);
        const Vector y_train = take(data.response, train_rows);
        const Vector y_held = take(data.response, held_rows);

        const RegressorModel full = fit_model(fold_spec, x_train, y_train, data.column_names);
        const auto ranking = rank_by_importance(require_importance(full));
        for (std::size_t s = 0; s < sizes.size(); ++s) {
            Vector predicted;
            if (sizes[s] == p) {
                predicted = full.predict(Matrix(data.values(held_rows, Eigen::all)));
            } else {
                const auto subset = top_in_original_order(ranking, sizes[s]);
                const RegressorModel model = fit_model(for_width(fold_spec, subset.size()),
                                                       take_columns(x_train, subset), y_train,
                                                       names_of(data.column_names, subset));
                predicted = model.predict(take(data.values, held_rows, subset));
            }
            per_task[task][s] = rmse(y_held, predicted);
        }
    });

    RfeProfile profile;
    profile.sizes = sizes;
    profile.fold_rmse.assign(sizes.size(), std::vector<double>(tasks));
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        for (std::size_t t = 0; t < tasks; ++t) {
            profile.fold_rmse[s][t] = per_task[t][s];
        }
        const auto& values = profile.fold_rmse[s];
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(tasks);
        double ss = 0.0;
        for (double v : values) {
            ss += (v - mean) * (v - mean);
        }
        profile.mean_rmse.push_back(mean);
        profile.sd_rmse.push_back(tasks > 1 ? std::sqrt(ss / static_cast<double>(tasks - 1)) : 0.0);
    }
    std::size_t best = 0;
    for (std::size_t s = 1; s < sizes.size(); ++s) {
        if (profile.mean_rmse[s] < profile.mean_rmse[best]) {
            best = s;
        }
    }
    profile.best_size = sizes[best];

    const RegressorModel final_model = fit_model(spec, data);
    const auto ranking = rank_by_importance(require_importance(final_model));
    profile.ranking = names_of(data.column_names, ranking);
    profile.best_features = names_of(data.column_names, top_in_original_order(ranking, profile.best_size));
    return profile;
}

std::string_view to_string(BorutaStatus status)
{
    switch (status) {
    case BorutaStatus::Confirmed:
        return "confirmed";
    case BorutaStatus::Rejected:
        return "rejected";
    case BorutaStatus::Tentative:
        break;
    }
    return "tentative";
}

double binomial_two_sided_p(std::size_t hits, std::size_t trials)
{
    if (hits > trials) {
        throw InvalidArgument("binomial test: more hits than trials");
    }
    if (trials == 0) {
        return 1.0;
    }
    // The distribution is symmetric, so the two-sided p-value doubles the
    // tail on the observed side.
    const std::size_t extreme = std::max(hits, trials - hits);
    return std::min(1.0, 2.0 * upper_tail(extreme, trials));
}

std::vector<std::string> BorutaVerdict::with_status(BorutaStatus status) const
{
    std::vector<std::string> out;
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (statuses[j] == status) {
            out.push_back(names[j]);
        }
    }
    return out;
}

std::string BorutaVerdict::to_csv() const
{
    std::string out = "feature,status,hits,iterations,median_importance\n";
    for (std::size_t j = 0; j < names.size(); ++j) {
        std::vector<double> seen;
        for (const auto& row : importance_history) {
            if (!std::isnan(row[j])) {
                seen.push_back(row[j]);
            }
        }
        std::optional<double> median;
        if (!seen.empty()) {
            std::sort(seen.begin(), seen.end());
            median = quantile(seen, 0.5);
        }
        out += csv::escape(names[j]) + "," + std::string(to_string(statuses[j])) + "," + std::to_string(hits[j]) +
               "," + std::to_string(seen.size()) + "," + format_number(median) + "\n";
    }
    return out;
}

nlohmann::json BorutaVerdict::to_json() const
{
    nlohmann::json status = nlohmann::json::object();
    for (std::size_t j = 0; j < names.size(); ++j) {
        status[names[j]] = to_string(statuses[j]);
    }
    nlohmann::json history = nlohmann::json::array();
    for (const auto& row : importance_history) {
        nlohmann::json r = nlohmann::json::array();
        for (double v : row) {
            r.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
        }
        history.push_back(std::move(r));
    }
    return {{"kind", "boruta"}, {"names", names}, {"status", status}, {"hits", hits},
            {"importance_history", history}, {"shadow_max_history", shadow_max_history},
            {"alpha", alpha}, {"max_iter", max_iter}, {"iterations", iterations}};
}

BorutaVerdict boruta(const FeatureMatrix& data, double alpha, std::size_t max_iter, const RegressorSpec& spec)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("boruta alpha must lie in (0, 1)");
    }
    resolve_hyperparameters(spec.family, spec.hyperparameters);
    const auto n = static_cast<std::size_t>(data.rows());
    const auto p = static_cast<std::size_t>(data.cols());

    BorutaVerdict verdict;
    verdict.names = data.column_names;
    verdict.statuses.assign(p, BorutaStatus::Tentative);
    verdict.hits.assign(p, 0);
    verdict.alpha = alpha;
    verdict.max_iter = max_iter;

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        std::vector<std::size_t> active;
        for (std::size_t j = 0; j < p; ++j) {
            if (verdict.statuses[j] != BorutaStatus::Rejected) {
                active.push_back(j);
            }
        }
        const std::size_t m = active.size();
        Matrix x(static_cast<Index>(n), static_cast<Index>(2 * m));
        std::vector<std::string> columns;
        for (std::size_t a = 0; a < m; ++a) {
            x.col(static_cast<Index>(a)) = data.values.col(static_cast<Index>(active[a]));
            columns.push_back(data.column_names[active[a]]);
        }
        for (std::size_t a = 0; a < m; ++a) {
            const auto order = permutation(n, derive_seed(spec.seed, {0x5348, iter, active[a]}));
            const auto source = data.values.col(static_cast<Index>(active[a]));
            auto target = x.col(static_cast<Index>(m + a));
            for (std::size_t i = 0; i < n; ++i) {
                target(static_cast<Index>(i)) = source(static_cast<Index>(order[i]));
            }
            columns.push_back("shadow_" + data.column_names[active[a]]);
        }
        RegressorSpec iter_spec = for_width(spec, 2 * m);
        iter_spec.seed = derive_seed(spec.seed, {0x424f, iter});
        const auto importance = require_importance(fit_model(iter_spec, x, data.response, columns));
        const double shadow_max = *std::max_element(importance.begin() + static_cast<std::ptrdiff_t>(m), importance.end());

        std::vector<double> row(p, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t a = 0; a < m; ++a) {
            row[active[a]] = importance[a];
            if (importance[a] > shadow_max) {
                ++verdict.hits[active[a]];
            }
        }
        verdict.importance_history.push_back(std::move(row));
        verdict.shadow_max_history.push_back(shadow_max);
        verdict.iterations = iter + 1;

        // Every still-tentative feature has taken part in all iterations so far.
        bool undecided = false;
        for (std::size_t j = 0; j < p; ++j) {
            if (verdict.statuses[j] != BorutaStatus::Tentative) {
                continue;
            }
            const std::size_t trials = iter + 1;
            if (binomial_two_sided_p(verdict.hits[j], trials) < alpha) {
                verdict.statuses[j] = 2 * verdict.hits[j] > trials ? BorutaStatus::Confirmed : BorutaStatus::Rejected;
            } else {
                undecided = true;
            }
        }
        if (!undecided) {
            break;
        }
    }
    return verdict;
}

} // namespace buildtime
