#include <doctest.h>

#include <cmath>

#include "buildtime/error.hpp"
#include "buildtime/preprocess.hpp"
#include "fixtures.hpp"

using namespace buildtime;

TEST_CASE("standardizer uses the sample standard deviation")
{
    Matrix x(3, 2);
    x << 2, 5, 4, 5, 6, 5;
    const auto s = fit_standardizer(x);
    CHECK(s.mean[0] == doctest::Approx(4.0));
    CHECK(s.scale[0] == doctest::Approx(2.0));
    CHECK_FALSE(s.constant[0]);
    CHECK(s.constant[1]);
    CHECK(s.scale[1] == 1.0);
    const Matrix z = s.transform(x);
    CHECK(z(0, 0) == doctest::Approx(-1.0));
    CHECK(z(1, 0) == doctest::Approx(0.0));
    CHECK(z(2, 0) == doctest::Approx(1.0));
    CHECK(z.col(1).isZero());
}

TEST_CASE("standardized training columns have mean 0 and sd 1, and invert")
{
    Rng rng(2);
    Matrix x = fixture::normal_matrix(200, 5, rng) * 37.0;
    x.col(2).array() += 1e4;
    const auto s = fit_standardizer(x);
    const Matrix z = s.transform(x);
    for (Index j = 0; j < 5; ++j) {
        CHECK(std::abs(z.col(j).mean()) < 1e-9);
        const double sd = std::sqrt((z.col(j).array() - z.col(j).mean()).square().sum() / 199.0);
        CHECK(std::abs(sd - 1.0) < 1e-9);
    }
    const Matrix back = s.inverse(z);
    CHECK(((back - x).cwiseAbs().array() <= 1e-10 * x.cwiseAbs().array().max(1.0)).all());

    // A re-fit on standardized data is the identity.
    const auto again = fit_standardizer(z);
    for (Index j = 0; j < 5; ++j) {
        CHECK(std::abs(again.mean[static_cast<std::size_t>(j)]) < 1e-9);
        CHECK(std::abs(again.scale[static_cast<std::size_t>(j)] - 1.0) < 1e-9);
    }
}

TEST_CASE("box-cox closed forms")
{
    CHECK(boxcox(1.0, 1.0) == 0.0);
    CHECK(boxcox(2.0, 1.0) == 1.0);
    CHECK(boxcox(3.0, 1.0) == 2.0);
    CHECK(boxcox(std::exp(2.0), 0.0) == doctest::Approx(2.0));
    for (double lambda : default_boxcox_grid()) {
        for (double v : {0.01, 0.5, 1.0, 3.0, 250.0}) {
            CHECK(std::abs(boxcox_inverse(boxcox(v, lambda), lambda) - v) <= 1e-10 * std::max(1.0, v));
        }
    }
    const auto grid = default_boxcox_grid();
    CHECK(grid.size() == 41);
    CHECK(grid[20] == 0.0);
    CHECK(grid.front() == -2.0);
    CHECK(grid.back() == 2.0);
}

TEST_CASE("box-cox fit matches the grid-search oracle and skips nonpositive columns")
{
    Rng rng(8);
    Matrix x(300, 4);
    for (Index i = 0; i < 300; ++i) {
        x(i, 0) = std::exp(rng.normal());
        x(i, 1) = 1.0 + rng.uniform() * 10.0;
        x(i, 2) = rng.normal(); // has negatives
        x(i, 3) = i == 0 ? 0.0 : 5.0 + rng.uniform();
    }
    const auto map = fit_boxcox(x);
    REQUIRE(map.lambda[0]);
    CHECK(std::abs(*map.lambda[0]) <= 0.2 + 1e-12);
    CHECK_FALSE(map.lambda[2]);
    CHECK_FALSE(map.lambda[3]);
    for (Index j = 0; j < 2; ++j) {
        const auto col = fixture::to_column(x.col(j));
        double best = -1e300;
        double arg = 0.0;
        for (double lambda : default_boxcox_grid()) {
            const double ll = oracle::boxcox_loglik(col, lambda);
            if (ll > best) {
                best = ll;
                arg = lambda;
            }
        }
        CHECK(*map.lambda[static_cast<std::size_t>(j)] == arg);
        CHECK(map.log_likelihood[static_cast<std::size_t>(j)] == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("box-cox transform is strictly monotone and preserves order statistics")
{
    Rng rng(9);
    Matrix x(100, 1);
    for (Index i = 0; i < 100; ++i) {
        x(i, 0) = 0.1 + 50.0 * rng.uniform();
    }
    for (double lambda : default_boxcox_grid()) {
        BoxCoxMap map{{lambda}, {0.0}, {x.minCoeff()}};
        const Matrix y = map.transform(x);
        for (Index a = 0; a < 100; ++a) {
            for (Index b = 0; b < 100; ++b) {
                if (x(a, 0) < x(b, 0)) {
                    REQUIRE(y(a, 0) < y(b, 0));
                }
            }
        }
        const Matrix back = map.inverse(y);
        CHECK(((back - x).cwiseAbs().array() <= 1e-10 * x.array()).all());
    }
}

TEST_CASE("correlation matrix matches the Pearson oracle")
{
    Rng rng(10);
    Matrix x = fixture::normal_matrix(60, 4, rng);
    x.col(1) += 0.8 * x.col(0);
    const Matrix r = correlation_matrix(x);
    for (Index a = 0; a < 4; ++a) {
        for (Index b = 0; b < 4; ++b) {
            const double expected = a == b ? 1.0 : oracle::pearson(fixture::to_column(x.col(a)), fixture::to_column(x.col(b)));
            CHECK(r(a, b) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    Matrix c = x;
    c.col(3).setConstant(0.1);
    CHECK(correlation_matrix(c)(0, 3) == 0.0);
}

TEST_CASE("two identical columns: exactly one dropped")
{
    Rng rng(12);
    Matrix x = fixture::normal_matrix(50, 3, rng);
    x.col(2) = x.col(0);
    const auto d = find_correlated(x, fixture::names(3), 0.7);
    CHECK(d.dropped_indices.size() == 1);
    CHECK((d.dropped_indices[0] == 0 || d.dropped_indices[0] == 2));
}

TEST_CASE("pair A,B correlated, C independent: C kept")
{
    Rng rng(13);
    Matrix x = fixture::normal_matrix(400, 3, rng);
    x.col(1) = x.col(0) + 0.3 * x.col(1);
    const auto d = find_correlated(x, {"A", "B", "C"}, 0.7);
    REQUIRE(d.dropped_columns.size() == 1);
    CHECK(d.dropped_columns[0] != "C");
    CHECK_THROWS_AS(find_correlated(x, {"A", "B", "C"}, 1.0), InvalidArgument);
}

TEST_CASE("pca on two perfectly correlated columns")
{
    Rng rng(14);
    Matrix x(40, 2);
    x.col(0) = fixture::normal_matrix(40, 1, rng).col(0);
    x.col(1) = 3.0 * x.col(0);
    const auto z = fit_standardizer(x).transform(x);
    const auto pca = fit_pca(z, 0.95);
    CHECK(std::abs(pca.explained_variance_fraction(0) - 1.0) < 1e-8);
    CHECK(pca.k == 1);
}

TEST_CASE("pca fractions match power iteration and rotation is orthonormal")
{
    Rng rng(15);
    Matrix x = fixture::normal_matrix(50, 5, rng);
    x.col(1) += 0.5 * x.col(0);
    x.col(4) -= 0.7 * x.col(2);
    const auto pca = fit_pca(x, 1.0);
    CHECK(pca.k == 5);
    const auto eig = oracle::eigenvalues(oracle::sample_covariance(fixture::to_table(x)));
    double total = 0.0;
    for (double e : eig) {
        total += e;
    }
    for (std::size_t c = 0; c < 5; ++c) {
        CHECK(std::abs(pca.explained_variance_fraction(static_cast<Index>(c)) - eig[c] / total) < 1e-6);
    }
    CHECK((pca.rotation.transpose() * pca.rotation - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(pca.explained_variance_fraction.sum() - 1.0) < 1e-8);
    for (Index c = 1; c < 5; ++c) {
        CHECK(pca.explained_variance_fraction(c) <= pca.explained_variance_fraction(c - 1));
    }
    CHECK((pca.inverse(pca.transform(x)) - x).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("plan applies training statistics in fixed order and round-trips through JSON")
{
    Rng rng(16);
    Matrix x = fixture::uniform_matrix(80, 4, rng).array() + 0.5;
    x.col(3) = x.col(0) * 2.0 + 0.01 * x.col(3);
    auto train = fixture::matrix(x, Vector::Zero(80));
    train.imputation = {1.0, 1.0, 1.0, 1.0};
    const PlanRecipe recipe{true, true, 0.7, 0.9};
    const auto plan = fit_plan(recipe, train);
    REQUIRE(plan.boxcox);
    REQUIRE(plan.standardizer);
    REQUIRE(plan.correlation);
    REQUIRE(plan.pca);
    CHECK(plan.correlation->dropped_indices.size() == 1);
    const auto out = plan.apply(train);
    CHECK(out.cols() == plan.pca->k);
    CHECK(out.column_names.front() == "PC1");

    // A single test row is transformed with training statistics.
    Matrix row = x.topRows(1);
    CHECK((plan.apply(row) - out.values.topRows(1)).cwiseAbs().maxCoeff() < 1e-12);

    // NaN cells are imputed with the stored constants.
    Matrix hole = row;
    hole(0, 1) = std::numeric_limits<double>::quiet_NaN();
    Matrix filled = row;
    filled(0, 1) = 1.0;
    CHECK(plan.apply(hole) == plan.apply(filled));

    const auto back = PreprocessPlan::from_json(nlohmann::json::parse(plan.to_json().dump()));
    CHECK(back.apply(x) == plan.apply(x));
    CHECK(back.output_columns() == plan.output_columns());

    auto renamed = train;
    renamed.column_names[0] = "other";
    CHECK_THROWS_AS(static_cast<void>(plan.apply(renamed)), SchemaError);
    CHECK_THROWS_AS(static_cast<void>(plan.apply(Matrix(x.leftCols(3)))), SchemaError);
    CHECK_THROWS_AS(PreprocessPlan::from_json(nlohmann::json{{"format", "nope"}}), SchemaError);
}

TEST_CASE("plan without optional steps only standardizes")
{
    Rng rng(17);
    auto train = fixture::matrix(fixture::normal_matrix(30, 3, rng), Vector::Zero(30));
    const auto plan = fit_plan(PlanRecipe{}, train);
    CHECK_FALSE(plan.boxcox);
    CHECK(plan.standardizer);
    CHECK_FALSE(plan.correlation);
    CHECK_FALSE(plan.pca);
    const auto identity = fit_plan(PlanRecipe{false, false, std::nullopt, std::nullopt}, train);
    CHECK(identity.apply(train.values) == train.values);
}
