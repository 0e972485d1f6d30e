#include <doctest.h>

#include <set>

#include "buildtime/error.hpp"
#include "buildtime/evaluate.hpp"
#include "buildtime/report.hpp"
#include "fixtures.hpp"

using namespace buildtime;

namespace {

Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double e : v) {
        out(i++) = e;
    }
    return out;
}

} // namespace

TEST_CASE("rmse examples and errors")
{
    CHECK(rmse(vec({1, 2, 3}), vec({1, 2, 3})) == 0.0);
    CHECK(rmse(vec({10, 10, 10}), vec({13, 13, 13})) == doctest::Approx(3.0));
    CHECK(rmse(vec({0, 0}), vec({3, 4})) == doctest::Approx(std::sqrt(12.5)));
    CHECK_THROWS_AS(rmse(vec({1, 2}), vec({1})), InvalidArgument);
    CHECK_THROWS_AS(rmse(Vector(), Vector()), InvalidArgument);
}

TEST_CASE("r_squared examples")
{
    const Vector y = vec({1, 2, 3, 4});
    CHECK(*r_squared(y, (2.0 * y).array() + 5.0) == doctest::Approx(1.0));
    CHECK_FALSE(r_squared(y, vec({3, 3, 3, 3})));
    CHECK_FALSE(r_squared(vec({2, 2, 2}), vec({1, 2, 3})));
    const double r = oracle::pearson({1, 2, 3, 4}, {1, 2, 3, 5});
    CHECK(*r_squared(y, vec({1, 2, 3, 5})) == doctest::Approx(r * r).epsilon(1e-12));
    CHECK_THROWS_AS(r_squared(y, vec({1, 2})), InvalidArgument);
    // Invariant under positive affine maps of the prediction.
    const Vector p = vec({0.5, 2.5, 2.0, 7.0});
    CHECK(*r_squared(y, p) == doctest::Approx(*r_squared(y, (3.0 * p).array() + 11.0)).epsilon(1e-12));
    // The traditional form can go negative.
    CHECK(*r_squared_traditional(y, vec({4, 3, 2, 1})) < 0.0);
}

TEST_CASE("quantiles interpolate between order statistics")
{
    Rng rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(1 + rng.uniform_index(20));
        for (auto& e : v) {
            e = rng.normal();
        }
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        for (double p : {0.0, 0.25, 0.5, 0.75, 1.0, 0.1}) {
            CHECK(quantile(sorted, p) == doctest::Approx(oracle::quantile7(v, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("summary counts NAs and is recomputable")
{
    std::vector<std::optional<double>> v{4.0, std::nullopt, 1.0, 3.0, std::nullopt, 2.0};
    const auto s = summarize(v);
    CHECK(s.na_count == 2);
    CHECK(s.min == 1.0);
    CHECK(s.max == 4.0);
    CHECK(s.median == 2.5);
    CHECK(s.mean == 2.5);
    CHECK(s.q1 == 1.75);
    CHECK(s.q3 == 3.25);
    std::vector<std::optional<double>> none{std::nullopt, std::nullopt};
    const auto n = summarize(none);
    CHECK(n.all_missing);
    CHECK(n.na_count == 2);
}

TEST_CASE("fold assignments partition every repeat")
{
    const auto f = kfold_indices(100, CvSpec{10, 3, 5});
    CHECK(f.repeats() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
        std::vector<std::size_t> seen;
        for (std::size_t k = 0; k < 10; ++k) {
            const auto held = f.held_out(r, k);
            CHECK(held.size() == 10);
            CHECK(f.training(r, k).size() == 90);
            seen.insert(seen.end(), held.begin(), held.end());
        }
        std::sort(seen.begin(), seen.end());
        for (std::size_t i = 0; i < 100; ++i) {
            CHECK(seen[i] == i);
        }
    }
    CHECK(f.fold_of[0] != f.fold_of[1]);
    CHECK(kfold_indices(100, CvSpec{10, 3, 5}) == f);

    const auto singletons = kfold_indices(10, CvSpec{10, 1, 0});
    for (std::size_t k = 0; k < 10; ++k) {
        CHECK(singletons.held_out(0, k).size() == 1);
    }
    CHECK_THROWS_AS(kfold_indices(7, CvSpec{10, 1, 0}), InvalidArgument);
    CHECK_THROWS_AS(kfold_indices(7, CvSpec{1, 1, 0}), InvalidArgument);
    CHECK_THROWS_AS(kfold_indices(7, CvSpec{2, 0, 0}), InvalidArgument);
}

TEST_CASE("noiseless linear data: LM fold RMSE vanishes")
{
    Rng rng(62);
    const Matrix x = fixture::normal_matrix(100, 4, rng);
    const auto data = fixture::matrix(x, x * vec({1, -2, 3, 0.5}));
    const auto report = cross_validate(RegressorSpec{Family::LM, {}, 0}, data, CvSpec{10, 3, 1}, PlanRecipe{});
    CHECK(report.folds.size() == 30);
    for (const auto& f : report.folds) {
        REQUIRE(f.rmse);
        CHECK(*f.rmse < 1e-8);
    }
}

TEST_CASE("constant response: CART folds predict it exactly, R² is NA")
{
    Rng rng(63);
    const auto data = fixture::matrix(fixture::normal_matrix(50, 2, rng), Vector::Constant(50, 3.0));
    const auto report = cross_validate(RegressorSpec{Family::CART, {}, 0}, data, CvSpec{5, 2, 1}, PlanRecipe{});
    for (const auto& f : report.folds) {
        CHECK(*f.rmse == 0.0);
        CHECK_FALSE(f.r_squared);
    }
    CHECK(report.r_squared.na_count == 10);
}

TEST_CASE("failed fits become NA folds with the error kept")
{
    Rng rng(64);
    Matrix x = fixture::normal_matrix(40, 3, rng);
    x.col(2) = x.col(1);
    const auto data = fixture::matrix(x, x.col(0));
    const auto report = cross_validate(RegressorSpec{Family::LM, {}, 0}, data, CvSpec{4, 1, 1},
                                       PlanRecipe{false, false, std::nullopt, std::nullopt});
    CHECK(report.failed_folds() == 4);
    CHECK(report.rmse.na_count == 4);
    CHECK(report.rmse.all_missing);
    CHECK(render_benchmark_table({report}).find("NA") != std::string::npos);
}

TEST_CASE("summaries are recomputable from the fold list")
{
    Rng rng(65);
    const auto data = fixture::nonlinear(200, 3);
    const auto report = cross_validate(RegressorSpec{Family::CART, {}, 0}, data, CvSpec{5, 2, 9}, PlanRecipe{});
    std::vector<double> values;
    for (const auto& f : report.folds) {
        values.push_back(*f.rmse);
    }
    CHECK(std::abs(report.rmse.median - oracle::quantile7(values, 0.5)) < 1e-12);
    CHECK(std::abs(report.rmse.q1 - oracle::quantile7(values, 0.25)) < 1e-12);
    CHECK(std::abs(report.rmse.q3 - oracle::quantile7(values, 0.75)) < 1e-12);
    CHECK(std::abs(report.rmse.mean - std::accumulate(values.begin(), values.end(), 0.0) / 10.0) < 1e-12);
}

TEST_CASE("preprocessing is fitted on training rows only")
{
    // Held-out responses and predictors never influence a fold's fitted plan:
    // corrupting them leaves every fold model's training-row predictions unchanged.
    Rng rng(66);
    auto data = fixture::nonlinear(120, 4);
    const auto folds = kfold_indices(120, CvSpec{4, 1, 2});
    std::vector<Vector> first(4);
    std::vector<std::vector<double>> means(4);
    CvOptions options;
    options.observer = [&](const FoldContext& c) {
        Matrix train(static_cast<Index>(c.training_rows.size()), data.cols());
        for (std::size_t i = 0; i < c.training_rows.size(); ++i) {
            train.row(static_cast<Index>(i)) = data.values.row(static_cast<Index>(c.training_rows[i]));
        }
        first[c.fold] = c.pipeline.predict(train);
        means[c.fold] = c.pipeline.plan.standardizer->mean;
    };
    cross_validate(RegressorSpec{Family::KNN, {}, 0}, data, folds, PlanRecipe{}, options);
    auto corrupted = data;
    const auto held = folds.held_out(0, 0);
    for (auto r : held) {
        corrupted.response(static_cast<Index>(r)) = 1e9;
        corrupted.values.row(static_cast<Index>(r)).setConstant(1e6);
    }
    std::vector<Vector> second(4);
    options.observer = [&](const FoldContext& c) {
        if (c.fold == 0) {
            CHECK(c.pipeline.plan.standardizer->mean == means[0]);
        }
        Matrix train(static_cast<Index>(c.training_rows.size()), data.cols());
        for (std::size_t i = 0; i < c.training_rows.size(); ++i) {
            train.row(static_cast<Index>(i)) = data.values.row(static_cast<Index>(c.training_rows[i]));
        }
        second[c.fold] = c.pipeline.predict(train);
    };
    const auto report = cross_validate(RegressorSpec{Family::KNN, {}, 0}, corrupted, folds, PlanRecipe{}, options);
    CHECK(first[0] == second[0]);

    // The loose mode does see every row.
    CvOptions loose;
    loose.refit_preprocess_per_fold = false;
    std::vector<double> loose_mean;
    loose.observer = [&](const FoldContext& c) {
        if (c.fold == 0) {
            loose_mean = c.pipeline.plan.standardizer->mean;
        }
    };
    cross_validate(RegressorSpec{Family::KNN, {}, 0}, corrupted, folds, PlanRecipe{}, loose);
    CHECK(loose_mean != means[0]);
}

TEST_CASE("benchmark shares folds: identical specs give identical reports")
{
    const auto data = fixture::nonlinear(150, 5);
    const RegressorSpec cart{Family::CART, {}, 1};
    const auto reports = benchmark({cart, cart, RegressorSpec{Family::LM, {}, 0}}, data, CvSpec{5, 2, 3}, 100, 4,
                                   PlanRecipe{});
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].to_csv() == reports[1].to_csv());
    CHECK(reports[0].folds.size() == 10);
    const auto again = benchmark({cart}, data, CvSpec{5, 2, 3}, 100, 4, PlanRecipe{});
    CHECK(again[0].to_csv() == reports[0].to_csv());
    CHECK_THROWS_AS(benchmark({}, data, CvSpec{5, 2, 3}, 0, 4, PlanRecipe{}), InvalidArgument);
}

TEST_CASE("held-out evaluation and report rendering")
{
    const auto train = fixture::nonlinear(200, 6);
    const auto test = fixture::nonlinear(100, 7);
    const auto pipe = fit_pipeline(RegressorSpec{Family::CART, {}, 0}, PlanRecipe{}, train);
    const auto results = test_evaluate({NamedPipeline{"CART", &pipe}}, test, 50, 8);
    REQUIRE(results.size() == 1);
    const auto again = test_evaluate({NamedPipeline{"CART", &pipe}}, test, 50, 8);
    CHECK(again[0].metrics.rmse == results[0].metrics.rmse);
    CHECK(render_test_table(results).find("CART") != std::string::npos);
    CHECK(test_csv(results).rfind("algorithm,rmse,r_squared", 0) == 0);
}

TEST_CASE("number formatting")
{
    CHECK(with_thousands(12345.6) == "12,346");
    CHECK(with_thousands(999) == "999");
    CHECK(with_thousands(1000) == "1,000");
    CHECK(with_thousands(-1234567) == "-1,234,567");
    CHECK(format_number(std::optional<double>{}) == "NA");
    CHECK(std::stod(format_number(0.1)) == 0.1);
    CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
}

TEST_CASE("benchmark table has both metric blocks and the Table II columns")
{
    const auto data = fixture::nonlinear(100, 9);
    const auto reports = benchmark({RegressorSpec{Family::LM, {}, 0}, RegressorSpec{Family::CART, {}, 0}}, data,
                                   CvSpec{5, 1, 1}, 0, 0, PlanRecipe{});
    const auto table = render_benchmark_table(reports);
    for (const char* s : {"RMSE", "Rsquared", "Min.", "1st Qu.", "Median", "Mean", "3rd Qu.", "Max.", "NA's"}) {
        CHECK(table.find(s) != std::string::npos);
    }
    const auto csv = benchmark_csv(reports);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    const auto folds = fold_csv(reports);
    CHECK(std::count(folds.begin(), folds.end(), '\n') == 11);
}
