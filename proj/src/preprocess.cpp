#include "buildtime/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "buildtime/error.hpp"

namespace buildtime {

// ---------------------------------------------------------------- standardize

Standardizer fit_standardizer(const Matrix& x)
{
    if (x.rows() == 0) {
        throw InvalidArgument("cannot standardize an empty matrix");
    }
    Standardizer s;
    const auto n = static_cast<double>(x.rows());
    for (Index j = 0; j < x.cols(); ++j) {
        const auto col = x.col(j);
        const double mean = col.mean();
        const double ss = (col.array() - mean).square().sum();
        const double sd = x.rows() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        const double max_abs = col.cwiseAbs().maxCoeff();
        const bool constant = !(sd > 1e-12 * max_abs);
        s.mean.push_back(mean);
        s.scale.push_back(constant ? 1.0 : sd);
        s.constant.push_back(constant);
    }
    return s;
}

Matrix Standardizer::transform(const Matrix& x) const
{
    Matrix z(x.rows(), x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
        const auto jj = static_cast<std::size_t>(j);
        z.col(j) = (x.col(j).array() - mean[jj]) / scale[jj];
    }
    return z;
}

Matrix Standardizer::inverse(const Matrix& z) const
{
    Matrix x(z.rows(), z.cols());
    for (Index j = 0; j < z.cols(); ++j) {
        const auto jj = static_cast<std::size_t>(j);
        x.col(j) = z.col(j).array() * scale[jj] + mean[jj];
    }
    return x;
}

// -------------------------------------------------------------------- box-cox

double boxcox(double x, double lambda)
{
    return lambda == 0.0 ? std::log(x) : (std::pow(x, lambda) - 1.0) / lambda;
}

double boxcox_inverse(double y, double lambda)
{
    return lambda == 0.0 ? std::exp(y) : std::pow(lambda * y + 1.0, 1.0 / lambda);
}

double boxcox_log_likelihood(std::span<const double> x, double lambda)
{
    const auto n = static_cast<double>(x.size());
    double log_sum = 0.0;
    double mean = 0.0;
    for (double v : x) {
        log_sum += std::log(v);
        mean += boxcox(v, lambda);
    }
    mean /= n;
    double ss = 0.0;
    for (double v : x) {
        const double d = boxcox(v, lambda) - mean;
        ss += d * d;
    }
    const double variance = ss / n;
    if (!(variance > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    return -0.5 * n * std::log(variance) + (lambda - 1.0) * log_sum;
}

std::vector<double> default_boxcox_grid()
{
    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i) {
        grid.push_back(static_cast<double>(i) / 10.0);
    }
    return grid;
}

BoxCoxMap fit_boxcox(const Matrix& x, std::span<const double> grid)
{
    if (grid.empty()) {
        throw InvalidArgument("Box-Cox lambda grid is empty");
    }
    BoxCoxMap map;
    std::vector<double> column;
    for (Index j = 0; j < x.cols(); ++j) {
        column.assign(x.col(j).data(), x.col(j).data() + x.rows());
        const bool positive = !column.empty() && std::all_of(column.begin(), column.end(), [](double v) { return v > 0.0; });
        const bool varies = positive && std::any_of(column.begin(), column.end(), [&](double v) { return v != column.front(); });
        if (!positive || !varies) {
            map.lambda.emplace_back(std::nullopt);
            map.log_likelihood.push_back(std::numeric_limits<double>::quiet_NaN());
            map.floor.push_back(positive ? column.front() : 0.0);
            continue;
        }
        double best_lambda = grid.front();
        double best_ll = -std::numeric_limits<double>::infinity();
        for (double lambda : grid) {
            const double ll = boxcox_log_likelihood(column, lambda);
            if (ll > best_ll) {
                best_ll = ll;
                best_lambda = lambda;
            }
        }
        map.lambda.emplace_back(best_lambda);
        map.log_likelihood.push_back(best_ll);
        map.floor.push_back(*std::min_element(column.begin(), column.end()));
    }
    return map;
}

Matrix BoxCoxMap::transform(const Matrix& x) const
{
    Matrix y = x;
    for (Index j = 0; j < x.cols(); ++j) {
        const auto jj = static_cast<std::size_t>(j);
        if (!lambda[jj]) {
            continue;
        }
        for (Index i = 0; i < x.rows(); ++i) {
            // Unseen nonpositive values are clamped to the fitted minimum.
            const double v = x(i, j) > 0.0 ? x(i, j) : floor[jj];
            y(i, j) = boxcox(v, *lambda[jj]);
        }
    }
    return y;
}

Matrix BoxCoxMap::inverse(const Matrix& y) const
{
    Matrix x = y;
    for (Index j = 0; j < y.cols(); ++j) {
        const auto jj = static_cast<std::size_t>(j);
        if (!lambda[jj]) {
            continue;
        }
        for (Index i = 0; i < y.rows(); ++i) {
            x(i, j) = boxcox_inverse(y(i, j), *lambda[jj]);
        }
    }
    return x;
}

// ---------------------------------------------------------------- correlation

Matrix correlation_matrix(const Matrix& x)
{
    if (x.rows() < 2) {
        throw InvalidArgument("correlation needs at least two rows");
    }
    const Index p = x.cols();
    Matrix centered = x.rowwise() - x.colwise().mean();
    Vector norms = centered.colwise().norm();
    // Round-off in the mean leaves tiny residues on constant columns.
    const double root_n = std::sqrt(static_cast<double>(x.rows()));
    for (Index j = 0; j < p; ++j) {
        if (!(norms(j) > 1e-12 * root_n * x.col(j).cwiseAbs().maxCoeff())) {
            norms(j) = 0.0;
        }
    }
    Matrix r = Matrix::Zero(p, p);
    for (Index a = 0; a < p; ++a) {
        for (Index b = a; b < p; ++b) {
            double value = 0.0;
            if (a == b) {
                value = 1.0;
            } else if (norms(a) > 0.0 && norms(b) > 0.0) {
                value = centered.col(a).dot(centered.col(b)) / (norms(a) * norms(b));
                value = std::clamp(value, -1.0, 1.0);
            }
            r(a, b) = value;
            r(b, a) = value;
        }
    }
    return r;
}

CorrelationDropSet find_correlated(const Matrix& x, const std::vector<std::string>& names, double cutoff)
{
    if (!(cutoff > 0.0 && cutoff < 1.0)) {
        throw InvalidArgument("correlation cutoff must lie in (0, 1)");
    }
    if (static_cast<Index>(names.size()) != x.cols()) {
        throw InvalidArgument("column name count does not match matrix width");
    }
    const Matrix r = correlation_matrix(x).cwiseAbs();
    const Index p = x.cols();
    std::vector<bool> kept(static_cast<std::size_t>(p), true);

    auto mean_abs = [&](Index c) {
        double sum = 0.0;
        int count = 0;
        for (Index d = 0; d < p; ++d) {
            if (d != c && kept[static_cast<std::size_t>(d)]) {
                sum += r(c, d);
                ++count;
            }
        }
        return count > 0 ? sum / count : 0.0;
    };

    for (;;) {
        double worst = -1.0;
        Index wa = -1;
        Index wb = -1;
        for (Index a = 0; a < p; ++a) {
            if (!kept[static_cast<std::size_t>(a)]) {
                continue;
            }
            for (Index b = a + 1; b < p; ++b) {
                if (kept[static_cast<std::size_t>(b)] && r(a, b) > worst) {
                    worst = r(a, b);
                    wa = a;
                    wb = b;
                }
            }
        }
        if (wa < 0 || worst <= cutoff) {
            break;
        }
        const Index drop = mean_abs(wa) > mean_abs(wb) ? wa : wb;
        kept[static_cast<std::size_t>(drop)] = false;
    }

    CorrelationDropSet out;
    out.cutoff = cutoff;
    for (Index j = 0; j < p; ++j) {
        if (!kept[static_cast<std::size_t>(j)]) {
            out.dropped_indices.push_back(static_cast<std::size_t>(j));
            out.dropped_columns.push_back(names[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

// ------------------------------------------------------------------------ pca

PcaModel fit_pca(const Matrix& x, double variance_target)
{
    if (!(variance_target > 0.0 && variance_target <= 1.0)) {
        throw InvalidArgument("PCA variance target must lie in (0, 1]");
    }
    if (x.rows() < 2 || x.cols() == 0) {
        throw InvalidArgument("PCA needs at least two rows and one column");
    }
    const Index p = x.cols();
    PcaModel model;
    model.center = x.colwise().mean().transpose();
    const Matrix centered = x.rowwise() - model.center.transpose();
    const Matrix covariance = centered.transpose() * centered / static_cast<double>(x.rows() - 1);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(covariance);
    if (solver.info() != Eigen::Success) {
        throw FitError("eigendecomposition of the covariance matrix failed");
    }
    // Eigen returns ascending eigenvalues.
    model.rotation = solver.eigenvectors().rowwise().reverse();
    Vector values = solver.eigenvalues().reverse().cwiseMax(0.0);

    for (Index c = 0; c < p; ++c) {
        Index arg = 0;
        model.rotation.col(c).cwiseAbs().maxCoeff(&arg);
        if (model.rotation(arg, c) < 0.0) {
            model.rotation.col(c) *= -1.0;
        }
    }

    const double total = values.sum();
    model.explained_variance_fraction = total > 0.0 ? Vector(values / total) : Vector::Constant(p, 1.0 / static_cast<double>(p));

    if (variance_target >= 1.0) {
        model.k = p;
    } else {
        double cumulative = 0.0;
        model.k = p;
        for (Index c = 0; c < p; ++c) {
            cumulative += model.explained_variance_fraction(c);
            if (cumulative >= variance_target) {
                model.k = c + 1;
                break;
            }
        }
    }
    return model;
}

Matrix PcaModel::transform(const Matrix& x) const
{
    return (x.rowwise() - center.transpose()) * rotation.leftCols(k);
}

Matrix PcaModel::inverse(const Matrix& scores) const
{
    return (scores * rotation.leftCols(scores.cols()).transpose()).rowwise() + center.transpose();
}

// ----------------------------------------------------------------------- plan

void to_json(nlohmann::json& j, const PlanRecipe& recipe)
{
    j = nlohmann::json{{"boxcox", recipe.boxcox}, {"standardize", recipe.standardize}};
    j["correlation_cutoff"] = recipe.correlation_cutoff ? nlohmann::json(*recipe.correlation_cutoff) : nlohmann::json();
    j["pca_target"] = recipe.pca_target ? nlohmann::json(*recipe.pca_target) : nlohmann::json();
}

void from_json(const nlohmann::json& j, PlanRecipe& recipe)
{
    recipe = PlanRecipe{};
    recipe.boxcox = j.value("boxcox", false);
    recipe.standardize = j.value("standardize", true);
    if (j.contains("correlation_cutoff") && !j.at("correlation_cutoff").is_null()) {
        recipe.correlation_cutoff = j.at("correlation_cutoff").get<double>();
    }
    if (j.contains("pca_target") && !j.at("pca_target").is_null()) {
        recipe.pca_target = j.at("pca_target").get<double>();
    }
}

std::vector<std::string> PreprocessPlan::output_columns() const
{
    if (pca) {
        std::vector<std::string> names;
        for (Index c = 0; c < pca->k; ++c) {
            names.push_back("PC" + std::to_string(c + 1));
        }
        return names;
    }
    if (!correlation) {
        return input_columns;
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < input_columns.size(); ++j) {
        if (!std::binary_search(correlation->dropped_indices.begin(), correlation->dropped_indices.end(), j)) {
            names.push_back(input_columns[j]);
        }
    }
    return names;
}

namespace {

Matrix drop_columns(const Matrix& x, const std::vector<std::size_t>& dropped)
{
    Matrix out(x.rows(), x.cols() - static_cast<Index>(dropped.size()));
    Index c = 0;
    for (Index j = 0; j < x.cols(); ++j) {
        if (!std::binary_search(dropped.begin(), dropped.end(), static_cast<std::size_t>(j))) {
            out.col(c++) = x.col(j);
        }
    }
    return out;
}

} // namespace

Matrix PreprocessPlan::apply(const Matrix& x) const
{
    if (x.cols() != static_cast<Index>(input_columns.size())) {
        throw SchemaError("plan expects " + std::to_string(input_columns.size()) + " columns, got " +
                          std::to_string(x.cols()));
    }
    Matrix out = x;
    if (!imputation.empty()) {
        for (Index j = 0; j < out.cols(); ++j) {
            for (Index i = 0; i < out.rows(); ++i) {
                if (std::isnan(out(i, j))) {
                    out(i, j) = imputation[static_cast<std::size_t>(j)];
                }
            }
        }
    }
    if (boxcox) {
        out = boxcox->transform(out);
    }
    if (standardizer) {
        out = standardizer->transform(out);
    }
    if (correlation) {
        out = drop_columns(out, correlation->dropped_indices);
    }
    if (pca) {
        out = pca->transform(out);
    }
    return out;
}

FeatureMatrix PreprocessPlan::apply(const FeatureMatrix& x) const
{
    if (x.column_names != input_columns) {
        throw SchemaError("matrix columns do not match the plan's fitted schema");
    }
    FeatureMatrix out;
    out.values = apply(x.values);
    out.column_names = output_columns();
    out.response = x.response;
    out.response_name = x.response_name;
    out.provenance = x.provenance;
    return out;
}

PreprocessPlan fit_plan(const PlanRecipe& recipe, const FeatureMatrix& x)
{
    if (x.rows() == 0) {
        throw InvalidArgument("cannot fit a preprocessing plan on zero rows");
    }
    PreprocessPlan plan;
    plan.input_columns = x.column_names;
    plan.imputation = x.imputation;

    Matrix current = x.values;
    if (recipe.boxcox) {
        plan.boxcox = fit_boxcox(current);
        current = plan.boxcox->transform(current);
    }
    // PCA is only meaningful on standardized columns.
    if (recipe.standardize || recipe.pca_target) {
        plan.standardizer = fit_standardizer(current);
        current = plan.standardizer->transform(current);
    }
    if (recipe.correlation_cutoff && current.cols() >= 2) {
        plan.correlation = find_correlated(current, plan.input_columns, *recipe.correlation_cutoff);
        current = drop_columns(current, plan.correlation->dropped_indices);
    }
    if (recipe.pca_target) {
        plan.pca = fit_pca(current, *recipe.pca_target);
    }
    return plan;
}

// -------------------------------------------------------------- serialization

namespace {

nlohmann::json matrix_to_json(const Matrix& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Index j = 0; j < m.cols(); ++j) {
            row[static_cast<std::size_t>(j)] = m(i, j);
        }
        rows.push_back(row);
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j)
{
    const auto rows = static_cast<Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Index>(j.at(0).size()) : 0;
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (static_cast<Index>(row.size()) != cols) {
            throw SchemaError("ragged matrix in plan");
        }
        for (Index c = 0; c < cols; ++c) {
            m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
        }
    }
    return m;
}

Vector vector_from_json(const nlohmann::json& j)
{
    auto values = j.get<std::vector<double>>();
    return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

std::vector<double> to_std(const Vector& v)
{
    return {v.data(), v.data() + v.size()};
}

} // namespace

nlohmann::json PreprocessPlan::to_json() const
{
    nlohmann::json j;
    j["format"] = "buildtime-preprocess-plan";
    j["version"] = 1;
    j["input_columns"] = input_columns;
    j["imputation"] = imputation;
    nlohmann::json steps = nlohmann::json::array();
    if (boxcox) {
        nlohmann::json lambdas = nlohmann::json::array();
        for (const auto& l : boxcox->lambda) {
            lambdas.push_back(l ? nlohmann::json(*l) : nlohmann::json());
        }
        std::vector<nlohmann::json> ll;
        for (double v : boxcox->log_likelihood) {
            ll.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json());
        }
        steps.push_back({{"step", "boxcox"}, {"lambda", lambdas}, {"log_likelihood", ll}, {"floor", boxcox->floor}});
    }
    if (standardizer) {
        steps.push_back({{"step", "standardize"},
                         {"mean", standardizer->mean},
                         {"scale", standardizer->scale},
                         {"constant", standardizer->constant}});
    }
    if (correlation) {
        steps.push_back({{"step", "drop_correlated"},
                         {"cutoff", correlation->cutoff},
                         {"dropped_columns", correlation->dropped_columns},
                         {"dropped_indices", correlation->dropped_indices}});
    }
    if (pca) {
        steps.push_back({{"step", "pca"},
                         {"k", pca->k},
                         {"center", to_std(pca->center)},
                         {"explained_variance_fraction", to_std(pca->explained_variance_fraction)},
                         {"rotation", matrix_to_json(pca->rotation)}});
    }
    j["steps"] = steps;
    return j;
}

PreprocessPlan PreprocessPlan::from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format") != "buildtime-preprocess-plan" || j.at("version") != 1) {
            throw SchemaError("unsupported preprocess plan format");
        }
        PreprocessPlan plan;
        plan.input_columns = j.at("input_columns").get<std::vector<std::string>>();
        plan.imputation = j.at("imputation").get<std::vector<double>>();
        for (const auto& step : j.at("steps")) {
            const auto kind = step.at("step").get<std::string>();
            if (kind == "boxcox") {
                BoxCoxMap map;
                for (const auto& l : step.at("lambda")) {
                    map.lambda.push_back(l.is_null() ? std::nullopt : std::optional<double>(l.get<double>()));
                }
                for (const auto& v : step.at("log_likelihood")) {
                    map.log_likelihood.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
                }
                map.floor = step.at("floor").get<std::vector<double>>();
                plan.boxcox = std::move(map);
            } else if (kind == "standardize") {
                Standardizer s;
                s.mean = step.at("mean").get<std::vector<double>>();
                s.scale = step.at("scale").get<std::vector<double>>();
                s.constant = step.at("constant").get<std::vector<bool>>();
                plan.standardizer = std::move(s);
            } else if (kind == "drop_correlated") {
                CorrelationDropSet d;
                d.cutoff = step.at("cutoff").get<double>();
                d.dropped_columns = step.at("dropped_columns").get<std::vector<std::string>>();
                d.dropped_indices = step.at("dropped_indices").get<std::vector<std::size_t>>();
                plan.correlation = std::move(d);
            } else if (kind == "pca") {
                PcaModel m;
                m.k = step.at("k").get<Index>();
                m.center = vector_from_json(step.at("center"));
                m.explained_variance_fraction = vector_from_json(step.at("explained_variance_fraction"));
                m.rotation = matrix_from_json(step.at("rotation"));
                plan.pca = std::move(m);
            } else {
                throw SchemaError("unknown preprocess step '" + kind + "'");
            }
        }
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed preprocess plan: ") + e.what());
    }
}

} // namespace buildtime
