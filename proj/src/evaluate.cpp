#include "buildtime/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "buildtime/csv.hpp"
#include "buildtime/error.hpp"
#include "buildtime/parallel.hpp"
#include "buildtime/report.hpp"

namespace buildtime {

void CvSpec::validate() const
{
    if (k < 2) {
        throw InvalidArgument("cross-validation needs k >= 2");
    }
    if (repeats < 1) {
        throw InvalidArgument("cross-validation needs at least one repeat");
    }
}

double rmse(std::span<const double> y, std::span<const double> yhat)
{
    if (y.size() != yhat.size()) {
        throw InvalidArgument("rmse: length mismatch (" + std::to_string(y.size()) + " vs " +
                              std::to_string(yhat.size()) + ")");
    }
    if (y.empty()) {
        throw InvalidArgument("rmse: empty input");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(y.size()));
}

double rmse(const Vector& y, const Vector& yhat)
{
    return rmse(std::span(y.data(), static_cast<std::size_t>(y.size())),
                std::span(yhat.data(), static_cast<std::size_t>(yhat.size())));
}

std::optional<double> r_squared(std::span<const double> y, std::span<const double> yhat)
{
    if (y.size() != yhat.size()) {
        throw InvalidArgument("r_squared: length mismatch");
    }
    if (y.size() < 2) {
        throw InvalidArgument("r_squared needs at least two observations");
    }
    const auto n = static_cast<double>(y.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    const double mp = std::accumulate(yhat.begin(), yhat.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double a = y[i] - my;
        const double b = yhat[i] - mp;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        return std::nullopt;
    }
    const double r = sxy / std::sqrt(sxx * syy);
    return std::min(r * r, 1.0);
}

std::optional<double> r_squared(const Vector& y, const Vector& yhat)
{
    return r_squared(std::span(y.data(), static_cast<std::size_t>(y.size())),
                     std::span(yhat.data(), static_cast<std::size_t>(yhat.size())));
}

std::optional<double> r_squared_traditional(const Vector& y, const Vector& yhat)
{
    if (y.size() != yhat.size() || y.size() < 2) {
        throw InvalidArgument("r_squared_traditional: bad lengths");
    }
    const double ss_tot = (y.array() - y.mean()).square().sum();
    if (!(ss_tot > 0.0)) {
        return std::nullopt;
    }
    return 1.0 - (y - yhat).squaredNorm() / ss_tot;
}

MetricPair compute_metrics(const Vector& y, const Vector& yhat)
{
    MetricPair m;
    m.rmse = rmse(y, yhat);
    if (y.size() >= 2) {
        m.r_squared = r_squared(y, yhat);
        m.r_squared_traditional = r_squared_traditional(y, yhat);
    }
    return m;
}

double quantile(std::span<const double> sorted, double p)
{
    if (sorted.empty()) {
        throw InvalidArgument("quantile of an empty sample");
    }
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

SixNumberSummary summarize(std::span<const std::optional<double>> values)
{
    SixNumberSummary s;
    std::vector<double> present;
    for (const auto& v : values) {
        if (v) {
            present.push_back(*v);
        } else {
            ++s.na_count;
        }
    }
    if (present.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        s.min = s.q1 = s.median = s.mean = s.q3 = s.max = nan;
        return s;
    }
    s.all_missing = false;
    std::sort(present.begin(), present.end());
    s.min = present.front();
    s.max = present.back();
    s.q1 = quantile(present, 0.25);
    s.median = quantile(present, 0.5);
    s.q3 = quantile(present, 0.75);
    s.mean = std::accumulate(present.begin(), present.end(), 0.0) / static_cast<double>(present.size());
    return s;
}

std::vector<std::size_t> FoldAssignment::held_out(std::size_t repeat, std::size_t fold) const
{
    std::vector<std::size_t> rows;
    const auto& assignment = fold_of.at(repeat);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == fold) {
            rows.push_back(i);
        }
    }
    return rows;
}

std::vector<std::size_t> FoldAssignment::training(std::size_t repeat, std::size_t fold) const
{
    std::vector<std::size_t> rows;
    const auto& assignment = fold_of.at(repeat);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] != fold) {
            rows.push_back(i);
        }
    }
    return rows;
}

FoldAssignment kfold_indices(std::size_t n, const CvSpec& spec)
{
    spec.validate();
    if (spec.k > n) {
        throw InvalidArgument("k = " + std::to_string(spec.k) + " exceeds the " + std::to_string(n) + " available rows");
    }
    FoldAssignment out;
    out.k = spec.k;
    out.fold_of.resize(spec.repeats);
    for (std::size_t r = 0; r < spec.repeats; ++r) {
        const auto order = permutation(n, derive_seed(spec.seed, {0x4b46, r}));
        auto& assignment = out.fold_of[r];
        assignment.resize(n);
        for (std::size_t pos = 0; pos < n; ++pos) {
            assignment[order[pos]] = pos % spec.k;
        }
    }
    return out;
}

std::uint64_t fold_model_seed(std::uint64_t model_seed, std::size_t repeat, std::size_t fold)
{
    return derive_seed(model_seed, {0x464d, repeat, fold});
}

std::size_t CvReport::failed_folds() const
{
    return static_cast<std::size_t>(std::count_if(folds.begin(), folds.end(), [](const FoldResult& f) { return !f.error.empty(); }));
}

std::string CvReport::to_csv() const
{
    std::string out = "algorithm,repeat,fold,rmse,r_squared,r_squared_traditional,error\n";
    for (const auto& f : folds) {
        out += algorithm + "," + std::to_string(f.repeat) + "," + std::to_string(f.fold) + "," +
               format_number(f.rmse) + "," + format_number(f.r_squared) + "," +
               format_number(f.r_squared_traditional) + "," + csv::escape(f.error) + "\n";
    }
    return out;
}

CvReport make_report(std::string algorithm, std::vector<FoldResult> folds)
{
    CvReport report;
    report.algorithm = std::move(algorithm);
    std::vector<std::optional<double>> rmse_values;
    std::vector<std::optional<double>> r2_values;
    for (const auto& f : folds) {
        rmse_values.push_back(f.rmse);
        r2_values.push_back(f.r_squared);
    }
    report.rmse = summarize(rmse_values);
    report.r_squared = summarize(r2_values);
    report.folds = std::move(folds);
    return report;
}

CvReport cross_validate(const RegressorSpec& spec, const FeatureMatrix& data, const FoldAssignment& folds,
                        const PlanRecipe& recipe, const CvOptions& options)
{
    if (folds.rows() != static_cast<std::size_t>(data.rows())) {
        throw InvalidArgument("fold assignment covers " + std::to_string(folds.rows()) + " rows, data has " +
                              std::to_string(data.rows()));
    }
    // Validate once up front so a bad spec is an error rather than all-NA.
    resolve_hyperparameters(spec.family, spec.hyperparameters);

    std::optional<PreprocessPlan> shared_plan;
    std::optional<FeatureMatrix> shared_transformed;
    if (!options.refit_preprocess_per_fold) {
        shared_plan = fit_plan(recipe, data);
        shared_transformed = shared_plan->apply(data);
    }

    const std::size_t k = folds.k;
    std::vector<FoldResult> results(folds.repeats() * k);
    parallel_for(results.size(), [&](std::size_t task) {
        const std::size_t repeat = task / k;
        const std::size_t fold = task % k;
        FoldResult& result = results[task];
        result.repeat = repeat;
        result.fold = fold;

        const auto train_rows = folds.training(repeat, fold);
        const auto held_rows = folds.held_out(repeat, fold);
        RegressorSpec fold_spec = spec;
        fold_spec.seed = fold_model_seed(spec.seed, repeat, fold);
        try {
            const FeatureMatrix held = data.select_rows(held_rows);
            std::optional<Pipeline> pipeline;
            if (shared_plan) {
                auto model = fit_model(fold_spec, shared_transformed->select_rows(train_rows));
                pipeline.emplace(Pipeline{*shared_plan, std::move(model)});
            } else {
                pipeline.emplace(fit_pipeline(fold_spec, recipe, data.select_rows(train_rows)));
            }
            if (options.observer) {
                options.observer(FoldContext{repeat, fold, train_rows, *pipeline});
            }
            const Vector predicted = pipeline->predict(held);
            if (!predicted.allFinite()) {
                throw FitError("model produced non-finite predictions");
            }
            const MetricPair m = compute_metrics(held.response, predicted);
            result.rmse = m.rmse;
            result.r_squared = m.r_squared;
            result.r_squared_traditional = m.r_squared_traditional;
        } catch (const std::exception& e) {
            result.error = e.what();
            result.rmse.reset();
            result.r_squared.reset();
            result.r_squared_traditional.reset();
        }
    });
    return make_report(spec.label(), std::move(results));
}

CvReport cross_validate(const RegressorSpec& spec, const FeatureMatrix& data, const CvSpec& cv,
                        const PlanRecipe& recipe, const CvOptions& options)
{
    return cross_validate(spec, data, kfold_indices(static_cast<std::size_t>(data.rows()), cv), recipe, options);
}

std::vector<CvReport> benchmark(const std::vector<RegressorSpec>& specs, const FeatureMatrix& data, const CvSpec& cv,
                                std::size_t subsample_n, std::uint64_t subsample_seed, const PlanRecipe& recipe,
                                const CvOptions& options)
{
    if (specs.empty()) {
        throw InvalidArgument("benchmark needs at least one model spec");
    }
    const FeatureMatrix sample = subsample_n == 0 ? data : subsample(data, subsample_n, subsample_seed);
    const FoldAssignment folds = kfold_indices(static_cast<std::size_t>(sample.rows()), cv);
    std::vector<CvReport> reports;
    reports.reserve(specs.size());
    for (const auto& spec : specs) {
        reports.push_back(cross_validate(spec, sample, folds, recipe, options));
    }
    return reports;
}

std::vector<TestResult> test_evaluate(const std::vector<NamedPipeline>& models, const FeatureMatrix& test,
                                      std::size_t subsample_n, std::uint64_t seed)
{
    const FeatureMatrix sample = subsample_n == 0 ? test : subsample(test, subsample_n, seed);
    std::vector<TestResult> results;
    for (const auto& [name, pipeline] : models) {
        const Vector predicted = pipeline->predict(sample);
        results.push_back(TestResult{name, compute_metrics(sample.response, predicted)});
    }
    return results;
}

} // namespace buildtime
