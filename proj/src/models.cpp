#include "buildtime/models.hpp"

#include <algorithm>
#include <cmath>

#include "buildtime/error.hpp"

namespace buildtime {

namespace {

constexpr double kInf = 1e300;

constexpr HyperparameterDef kLm[] = {{"", 0, 0, 0, false}};

constexpr HyperparameterDef kGlmnet[] = {
    {"alpha", 0.5, 0.0, 1.0, false},
    {"lambda", -1.0, -1.0, kInf, false}, // negative: choose by inner CV
    {"n_lambda", 10, 1, 1000, true},
    {"inner_folds", 5, 2, 100, true},
    {"max_iter", 100000, 1, 1e9, true},
    {"tol", 1e-9, 0.0, 1.0, false},
};

constexpr HyperparameterDef kKnn[] = {{"k", 5, 1, 1e9, true}};

constexpr HyperparameterDef kCart[] = {
    {"max_depth", 30, 0, 1000, true},
    {"min_samples_leaf", 5, 1, 1e9, true},
    {"min_variance_decrease", 1e-7, 0.0, kInf, false},
};

constexpr HyperparameterDef kBcart[] = {
    {"n_trees", 25, 1, 1e6, true},
    {"bootstrap", 1, 0, 1, true},
    {"max_depth", 30, 0, 1000, true},
    {"min_samples_leaf", 5, 1, 1e9, true},
    {"min_variance_decrease", 1e-7, 0.0, kInf, false},
};

constexpr HyperparameterDef kRf[] = {
    {"n_trees", 500, 1, 1e6, true},
    {"mtry", 0, 0, 1e6, true}, // 0: floor(p / 3), at least 1
    {"bootstrap", 1, 0, 1, true},
    {"max_depth", 30, 0, 1000, true},
    {"min_samples_leaf", 5, 1, 1e9, true},
    {"min_variance_decrease", 1e-7, 0.0, kInf, false},
};

constexpr HyperparameterDef kSgb[] = {
    {"n_trees", 150, 1, 1e6, true},
    {"learning_rate", 0.1, 0.0, 1.0, false},
    {"subsample", 0.5, 1e-12, 1.0, false},
    {"max_depth", 3, 0, 1000, true},
    {"min_samples_leaf", 5, 1, 1e9, true},
    {"min_variance_decrease", 1e-7, 0.0, kInf, false},
};

std::size_t as_size(const Hyperparameters& h, const std::string& name)
{
    return static_cast<std::size_t>(h.at(name));
}

TreeParams tree_params(const Hyperparameters& h)
{
    TreeParams params;
    params.max_depth = static_cast<int>(h.at("max_depth"));
    params.min_samples_leaf = as_size(h, "min_samples_leaf");
    params.min_variance_decrease = h.at("min_variance_decrease");
    return params;
}

// Trees serialize as rows of [feature, threshold, left, right, value, count].
nlohmann::json tree_to_json(const DecisionTree& tree)
{
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes()) {
        nodes.push_back(nlohmann::json::array({n.feature, n.threshold, n.left, n.right, n.value, n.count}));
    }
    return nodes;
}

DecisionTree tree_from_json(const nlohmann::json& j)
{
    std::vector<TreeNode> nodes;
    nodes.reserve(j.size());
    for (const auto& row : j) {
        TreeNode n;
        n.feature = row.at(0).get<int>();
        n.threshold = row.at(1).get<double>();
        n.left = row.at(2).get<int>();
        n.right = row.at(3).get<int>();
        n.value = row.at(4).get<double>();
        n.count = row.at(5).get<std::size_t>();
        nodes.push_back(n);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (!n.is_leaf() && (n.left <= static_cast<int>(i) || n.right <= static_cast<int>(i) ||
                             n.left >= static_cast<int>(nodes.size()) || n.right >= static_cast<int>(nodes.size()))) {
            throw SchemaError("tree node " + std::to_string(i) + " has invalid children");
        }
    }
    if (nodes.empty()) {
        throw SchemaError("empty tree");
    }
    return DecisionTree(std::move(nodes));
}

std::vector<double> to_std(const Vector& v)
{
    return {v.data(), v.data() + v.size()};
}

Vector to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

} // namespace

std::string_view to_string(Family family)
{
    switch (family) {
    case Family::LM: return "LM";
    case Family::GLMNET: return "GLMNET";
    case Family::KNN: return "KNN";
    case Family::CART: return "CART";
    case Family::BCART: return "BCART";
    case Family::RF: return "RF";
    case Family::SGB: return "SGB";
    }
    return "?";
}

Family parse_family(std::string_view name)
{
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (Family f : kAllFamilies) {
        if (to_string(f) == upper) {
            return f;
        }
    }
    throw InvalidArgument("unknown model family '" + std::string(name) + "' (expected LM, GLMNET, KNN, CART, BCART, RF or SGB)");
}

std::span<const HyperparameterDef> hyperparameter_schema(Family family)
{
    switch (family) {
    case Family::LM: return std::span(kLm, 0);
    case Family::GLMNET: return kGlmnet;
    case Family::KNN: return kKnn;
    case Family::CART: return kCart;
    case Family::BCART: return kBcart;
    case Family::RF: return kRf;
    case Family::SGB: return kSgb;
    }
    return {};
}

Hyperparameters resolve_hyperparameters(Family family, const Hyperparameters& given)
{
    const auto schema = hyperparameter_schema(family);
    Hyperparameters out;
    for (const auto& def : schema) {
        out[std::string(def.name)] = def.default_value;
    }
    for (const auto& [name, value] : given) {
        auto def = std::find_if(schema.begin(), schema.end(), [&](const auto& d) { return d.name == name; });
        if (def == schema.end()) {
            std::string allowed;
            for (const auto& d : schema) {
                allowed += allowed.empty() ? std::string(d.name) : ", " + std::string(d.name);
            }
            throw InvalidArgument("unknown hyperparameter '" + name + "' for " + std::string(to_string(family)) +
                                  (allowed.empty() ? " (it takes none)" : " (allowed: " + allowed + ")"));
        }
        if (!std::isfinite(value) || value < def->min || value > def->max) {
            throw InvalidArgument("hyperparameter '" + name + "' = " + std::to_string(value) + " out of range for " +
                                  std::string(to_string(family)));
        }
        if (def->integer && value != std::floor(value)) {
            throw InvalidArgument("hyperparameter '" + name + "' must be an integer");
        }
        out[name] = value;
    }
    return out;
}

void to_json(nlohmann::json& j, const RegressorSpec& spec)
{
    j = nlohmann::json{{"family", to_string(spec.family)}, {"hyperparameters", spec.hyperparameters}, {"seed", spec.seed}};
}

void from_json(const nlohmann::json& j, RegressorSpec& spec)
{
    spec.family = parse_family(j.at("family").get<std::string>());
    spec.hyperparameters = j.value("hyperparameters", Hyperparameters{});
    spec.seed = j.value("seed", std::uint64_t{0});
}

RegressorModel fit_model(const RegressorSpec& spec, const Matrix& x, const Vector& y,
                         const std::vector<std::string>& columns)
{
    if (static_cast<Index>(columns.size()) != x.cols()) {
        throw InvalidArgument("column names do not match matrix width");
    }
    if (y.size() != x.rows()) {
        throw InvalidArgument("response length does not match row count");
    }
    const Hyperparameters h = resolve_hyperparameters(spec.family, spec.hyperparameters);
    const auto p = static_cast<std::size_t>(x.cols());

    auto fitted = [&]() -> RegressorModel::Fitted {
        switch (spec.family) {
        case Family::LM:
            return fit_lm(x, y, columns);
        case Family::GLMNET: {
            if (h.at("lambda") >= 0.0) {
                ElasticNetParams params{h.at("lambda"), h.at("alpha"), static_cast<int>(h.at("max_iter")), h.at("tol")};
                return fit_elastic_net(x, y, params);
            }
            GlmnetParams params;
            params.alpha = h.at("alpha");
            params.n_lambda = static_cast<int>(h.at("n_lambda"));
            params.inner_folds = static_cast<int>(h.at("inner_folds"));
            params.max_iter = static_cast<int>(h.at("max_iter"));
            params.tol = h.at("tol");
            params.seed = spec.seed;
            return fit_glmnet(x, y, params);
        }
        case Family::KNN:
            return fit_knn(x, y, as_size(h, "k"));
        case Family::CART:
            return fit_cart(x, y, tree_params(h));
        case Family::BCART: {
            ForestParams params{as_size(h, "n_trees"), tree_params(h), h.at("bootstrap") != 0.0, spec.seed};
            return fit_bagged_cart(x, y, params);
        }
        case Family::RF: {
            ForestParams params{as_size(h, "n_trees"), tree_params(h), h.at("bootstrap") != 0.0, spec.seed};
            const auto mtry = as_size(h, "mtry");
            params.tree.mtry = mtry == 0 ? std::max<std::size_t>(1, p / 3) : mtry;
            return fit_random_forest(x, y, params);
        }
        case Family::SGB: {
            BoostingParams params;
            params.n_trees = as_size(h, "n_trees");
            params.learning_rate = h.at("learning_rate");
            params.subsample = h.at("subsample");
            params.tree = tree_params(h);
            params.seed = spec.seed;
            return fit_sgb(x, y, params);
        }
        }
        throw InvalidArgument("unhandled family");
    }();
    return RegressorModel(spec.family, h, spec.seed, columns, std::move(fitted));
}

Vector RegressorModel::predict(const Matrix& x) const
{
    if (x.cols() != static_cast<Index>(columns_.size())) {
        throw SchemaError("model expects " + std::to_string(columns_.size()) + " columns, got " +
                          std::to_string(x.cols()));
    }
    return std::visit([&](const auto& m) -> Vector { return m.predict(x); }, fitted_);
}

Vector RegressorModel::predict(const FeatureMatrix& x) const
{
    if (x.column_names != columns_) {
        throw SchemaError("matrix columns do not match the model's training schema");
    }
    return predict(x.values);
}

std::optional<std::vector<double>> RegressorModel::importance() const
{
    if (const auto* e = std::get_if<TreeEnsemble>(&fitted_)) {
        return e->importance;
    }
    if (const auto* b = std::get_if<BoostedTrees>(&fitted_)) {
        return b->importance;
    }
    return std::nullopt;
}

nlohmann::json RegressorModel::to_json() const
{
    nlohmann::json j;
    j["family"] = to_string(family_);
    j["hyperparameters"] = hyperparameters_;
    j["seed"] = seed_;
    j["columns"] = columns_;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            nlohmann::json body;
            if constexpr (std::is_same_v<T, LinearModel>) {
                body = {{"kind", "linear"},
                        {"intercept", m.intercept},
                        {"coefficients", to_std(m.coefficients)},
                        {"lambda", m.lambda},
                        {"alpha", m.alpha}};
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                std::vector<std::vector<double>> rows;
                for (Index i = 0; i < m.x.rows(); ++i) {
                    rows.push_back(to_std(m.x.row(i).transpose()));
                }
                body = {{"kind", "knn"}, {"k", m.k}, {"x", rows}, {"y", to_std(m.y)}};
            } else if constexpr (std::is_same_v<T, TreeEnsemble>) {
                nlohmann::json trees = nlohmann::json::array();
                for (const auto& t : m.trees) {
                    trees.push_back(tree_to_json(t));
                }
                body = {{"kind", "tree_ensemble"}, {"trees", trees}, {"importance", m.importance}};
            } else {
                nlohmann::json trees = nlohmann::json::array();
                for (const auto& t : m.trees) {
                    trees.push_back(tree_to_json(t));
                }
                body = {{"kind", "boosted_trees"},
                        {"base", m.base},
                        {"learning_rate", m.learning_rate},
                        {"trees", trees},
                        {"importance", m.importance},
                        {"training_rmse", m.training_rmse}};
            }
            j["fitted"] = std::move(body);
        },
        fitted_);
    return j;
}

RegressorModel RegressorModel::from_json(const nlohmann::json& j)
{
    try {
        const Family family = parse_family(j.at("family").get<std::string>());
        auto hyper = j.at("hyperparameters").get<Hyperparameters>();
        const auto seed = j.at("seed").get<std::uint64_t>();
        auto columns = j.at("columns").get<std::vector<std::string>>();
        const auto& body = j.at("fitted");
        const auto kind = body.at("kind").get<std::string>();
        const auto p = static_cast<Index>(columns.size());

        Fitted fitted;
        if (kind == "linear") {
            LinearModel m;
            m.intercept = body.at("intercept").get<double>();
            m.coefficients = to_vector(body.at("coefficients").get<std::vector<double>>());
            m.lambda = body.at("lambda").get<double>();
            m.alpha = body.at("alpha").get<double>();
            if (m.coefficients.size() != p) {
                throw SchemaError("coefficient count does not match columns");
            }
            fitted = std::move(m);
        } else if (kind == "knn") {
            KnnModel m;
            m.k = body.at("k").get<std::size_t>();
            const auto rows = body.at("x").get<std::vector<std::vector<double>>>();
            m.y = to_vector(body.at("y").get<std::vector<double>>());
            m.x.resize(static_cast<Index>(rows.size()), p);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (static_cast<Index>(rows[i].size()) != p) {
                    throw SchemaError("KNN training row has the wrong width");
                }
                m.x.row(static_cast<Index>(i)) = to_vector(rows[i]).transpose();
            }
            fitted = std::move(m);
        } else if (kind == "tree_ensemble") {
            TreeEnsemble m;
            for (const auto& t : body.at("trees")) {
                m.trees.push_back(tree_from_json(t));
            }
            m.importance = body.at("importance").get<std::vector<double>>();
            fitted = std::move(m);
        } else if (kind == "boosted_trees") {
            BoostedTrees m;
            m.base = body.at("base").get<double>();
            m.learning_rate = body.at("learning_rate").get<double>();
            for (const auto& t : body.at("trees")) {
                m.trees.push_back(tree_from_json(t));
            }
            m.importance = body.at("importance").get<std::vector<double>>();
            m.training_rmse = body.at("training_rmse").get<std::vector<double>>();
            fitted = std::move(m);
        } else {
            throw SchemaError("unknown fitted model kind '" + kind + "'");
        }
        return RegressorModel(family, std::move(hyper), seed, std::move(columns), std::move(fitted));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed model: ") + e.what());
    }
}

} // namespace buildtime
