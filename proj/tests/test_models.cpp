#include <doctest.h>

#include "buildtime/error.hpp"
#include "buildtime/models.hpp"
#include "buildtime/pipeline.hpp"
#include "fixtures.hpp"

using namespace buildtime;

namespace {

RegressorSpec small_spec(Family f)
{
    RegressorSpec spec{f, {}, 17};
    if (f == Family::RF || f == Family::BCART) {
        spec.hyperparameters["n_trees"] = 12;
    }
    if (f == Family::SGB) {
        spec.hyperparameters["n_trees"] = 25;
    }
    return spec;
}

} // namespace

TEST_CASE("family names parse case-insensitively")
{
    for (Family f : kAllFamilies) {
        CHECK(parse_family(to_string(f)) == f);
    }
    CHECK(parse_family("rf") == Family::RF);
    CHECK(parse_family("Glmnet") == Family::GLMNET);
    CHECK_THROWS_AS(parse_family("cubist"), InvalidArgument);
}

TEST_CASE("hyperparameters are validated against the family schema")
{
    const auto rf = resolve_hyperparameters(Family::RF, {});
    CHECK(rf.at("n_trees") == 500);
    CHECK(rf.at("mtry") == 0);
    const auto sgb = resolve_hyperparameters(Family::SGB, {});
    CHECK(sgb.at("n_trees") == 150);
    CHECK(sgb.at("learning_rate") == 0.1);
    CHECK(sgb.at("subsample") == 0.5);
    CHECK(sgb.at("max_depth") == 3);
    CHECK(resolve_hyperparameters(Family::KNN, {}).at("k") == 5);
    const auto cart = resolve_hyperparameters(Family::CART, {});
    CHECK(cart.at("max_depth") == 30);
    CHECK(cart.at("min_samples_leaf") == 5);
    CHECK(resolve_hyperparameters(Family::GLMNET, {}).at("alpha") == 0.5);

    CHECK_THROWS_AS(resolve_hyperparameters(Family::RF, {{"bogus", 1}}), InvalidArgument);
    CHECK_THROWS_AS(resolve_hyperparameters(Family::KNN, {{"k", 0}}), InvalidArgument);
    CHECK_THROWS_AS(resolve_hyperparameters(Family::KNN, {{"k", 2.5}}), InvalidArgument);
    CHECK_THROWS_AS(resolve_hyperparameters(Family::SGB, {{"subsample", 1.5}}), InvalidArgument);
    CHECK_THROWS_AS(resolve_hyperparameters(Family::LM, {{"k", 3}}), InvalidArgument);
}

TEST_CASE("spec JSON round-trip")
{
    RegressorSpec spec{Family::SGB, {{"n_trees", 10}, {"learning_rate", 0.05}}, 99};
    const auto back = nlohmann::json(spec).get<RegressorSpec>();
    CHECK(back.family == spec.family);
    CHECK(back.hyperparameters == spec.hyperparameters);
    CHECK(back.seed == spec.seed);
}

TEST_CASE("every family fits, predicts finitely, is deterministic, and round-trips bit-identically")
{
    Rng rng(51);
    const Matrix x = fixture::normal_matrix(120, 5, rng);
    const Vector y = 2.0 * x.col(0) + x.col(1).array().square().matrix() + 0.3 * fixture::normal_matrix(120, 1, rng).col(0);
    const auto names = fixture::names(5);
    const Matrix probe = fixture::normal_matrix(30, 5, rng);
    for (Family f : kAllFamilies) {
        CAPTURE(to_string(f));
        const auto spec = small_spec(f);
        const auto model = fit_model(spec, x, y, names);
        const Vector p = model.predict(x);
        CHECK(p.size() == 120);
        CHECK(p.allFinite());
        CHECK(fit_model(spec, x, y, names).predict(probe) == model.predict(probe));
        const auto back = RegressorModel::from_json(nlohmann::json::parse(model.to_json().dump()));
        CHECK(back.predict(probe) == model.predict(probe));
        CHECK(back.columns() == names);
        CHECK(back.family() == f);
    }
}

TEST_CASE("prediction requires the training schema")
{
    Rng rng(52);
    const Matrix x = fixture::normal_matrix(40, 3, rng);
    const Vector y = x.col(0);
    const auto data = fixture::matrix(x, y);
    const auto model = fit_model(RegressorSpec{Family::LM, {}, 0}, data);
    CHECK_THROWS_AS(static_cast<void>(model.predict(Matrix(x.leftCols(2)))), SchemaError);
    auto renamed = data;
    renamed.column_names[1] = "zz";
    CHECK_THROWS_AS(static_cast<void>(model.predict(renamed)), SchemaError);
    CHECK_NOTHROW(static_cast<void>(model.predict(data)));
}

TEST_CASE("LM prediction is a dot product")
{
    Matrix x(3, 1);
    x << 0, 1, 2;
    Vector y(3);
    y << 1, 3, 5;
    const auto model = fit_model(RegressorSpec{Family::LM, {}, 0}, x, y, {"x"});
    Matrix q(1, 1);
    q << 3;
    CHECK(model.predict(q)(0) == doctest::Approx(7.0));
}

TEST_CASE("importance is reported for tree families only")
{
    Rng rng(53);
    const Matrix x = fixture::normal_matrix(60, 3, rng);
    const Vector y = x.col(2);
    CHECK_FALSE(fit_model(RegressorSpec{Family::LM, {}, 0}, x, y, fixture::names(3)).importance());
    const auto imp = fit_model(small_spec(Family::RF), x, y, fixture::names(3)).importance();
    REQUIRE(imp);
    CHECK(imp->size() == 3);
}

TEST_CASE("pipeline standardizes before KNN and stores the plan")
{
    Rng rng(54);
    Matrix x = fixture::normal_matrix(60, 2, rng);
    x.col(1) *= 1000.0;
    const auto data = fixture::matrix(x, x.col(0));
    const auto pipe = fit_pipeline(RegressorSpec{Family::KNN, {{"k", 1}}, 0}, PlanRecipe{}, data);
    CHECK(pipe.plan.standardizer);
    CHECK(pipe.predict(data) == data.response);
}
