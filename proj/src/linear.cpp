#include "buildtime/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "buildtime/error.hpp"
#include "buildtime/rng.hpp"

namespace buildtime {

Vector LinearModel::predict(const Matrix& x) const
{
    if (x.cols() != coefficients.size()) {
        throw InvalidArgument("linear model expects " + std::to_string(coefficients.size()) + " columns, got " +
                              std::to_string(x.cols()));
    }
    return (x * coefficients).array() + intercept;
}

LinearModel fit_lm(const Matrix& x, const Vector& y, const std::vector<std::string>& names)
{
    const Index n = x.rows();
    const Index p = x.cols();
    if (y.size() != n) {
        throw InvalidArgument("response length does not match row count");
    }
    if (n <= p) {
        throw InvalidArgument("least squares needs more rows than columns (" + std::to_string(n) + " <= " +
                              std::to_string(p) + ")");
    }
    Matrix design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = x;

    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < p + 1) {
        std::string dependent;
        const auto& perm = qr.colsPermutation().indices();
        for (Index k = qr.rank(); k < p + 1; ++k) {
            const Index c = perm(k);
            std::string label;
            if (c == 0) {
                label = "(intercept)";
            } else if (static_cast<std::size_t>(c - 1) < names.size()) {
                label = names[static_cast<std::size_t>(c - 1)];
            } else {
                label = "x" + std::to_string(c);
            }
            dependent += dependent.empty() ? label : ", " + label;
        }
        throw FitError("rank-deficient design; linearly dependent columns: " + dependent);
    }
    const Vector beta = qr.solve(y);

    LinearModel model;
    model.intercept = beta(0);
    model.coefficients = beta.tail(p);
    return model;
}

double soft_threshold(double z, double gamma)
{
    if (z > gamma) {
        return z - gamma;
    }
    if (z < -gamma) {
        return z + gamma;
    }
    return 0.0;
}

double lambda_max(const Matrix& x, const Vector& y, double alpha)
{
    const auto n = static_cast<double>(x.rows());
    const Matrix centered = x.rowwise() - x.colwise().mean();
    const Vector yc = y.array() - y.mean();
    const double max_grad = (centered.transpose() * yc).cwiseAbs().maxCoeff() / n;
    return max_grad / std::max(alpha, 1e-3);
}

LinearModel fit_elastic_net(const Matrix& x, const Vector& y, const ElasticNetParams& params,
                            const LinearModel* warm_start)
{
    if (!(params.lambda >= 0.0)) {
        throw InvalidArgument("elastic net lambda must be >= 0");
    }
    if (!(params.alpha >= 0.0 && params.alpha <= 1.0)) {
        throw InvalidArgument("elastic net alpha must lie in [0, 1]");
    }
    if (y.size() != x.rows() || x.rows() == 0) {
        throw InvalidArgument("elastic net needs a non-empty design matching the response");
    }
    const Index n = x.rows();
    const Index p = x.cols();
    const auto nd = static_cast<double>(n);

    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    const Matrix xc = x.rowwise() - x_mean;
    const Vector xtx = xc.colwise().squaredNorm().transpose() / nd;

    Vector beta = Vector::Zero(p);
    if (warm_start && warm_start->coefficients.size() == p) {
        beta = warm_start->coefficients;
    }
    Vector residual = (y.array() - y_mean).matrix() - xc * beta;

    const double l1 = params.lambda * params.alpha;
    const double l2 = params.lambda * (1.0 - params.alpha);

    LinearModel model;
    model.lambda = params.lambda;
    model.alpha = params.alpha;

    for (int sweep = 0; sweep < params.max_iter; ++sweep) {
        double max_change = 0.0;
        for (Index j = 0; j < p; ++j) {
            if (xtx(j) <= 0.0) {
                beta(j) = 0.0;
                continue;
            }
            const double old = beta(j);
            const double z = xc.col(j).dot(residual) / nd + xtx(j) * old;
            const double updated = soft_threshold(z, l1) / (xtx(j) + l2);
            const double delta = updated - old;
            if (delta != 0.0) {
                residual.noalias() -= delta * xc.col(j);
                beta(j) = updated;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        if (max_change < params.tol) {
            model.coefficients = beta;
            model.intercept = y_mean - x_mean.dot(beta);
            return model;
        }
    }
    throw ConvergenceError("elastic net did not converge in " + std::to_string(params.max_iter) + " sweeps",
                           y_mean - x_mean.dot(beta), beta);
}

LinearModel fit_glmnet(const Matrix& x, const Vector& y, const GlmnetParams& params, GlmnetPath* path)
{
    if (params.n_lambda < 1) {
        throw InvalidArgument("glmnet needs at least one lambda");
    }
    const Index n = x.rows();
    if (n < 2) {
        throw InvalidArgument("glmnet needs at least two rows");
    }
    const double top = std::max(lambda_max(x, y, params.alpha), 1e-12);
    std::vector<double> lambdas;
    for (int i = 0; i < params.n_lambda; ++i) {
        const double t = params.n_lambda == 1 ? 0.0 : static_cast<double>(i) / (params.n_lambda - 1);
        lambdas.push_back(top * std::pow(params.lambda_min_ratio, t));
    }

    auto fit_path = [&](const Matrix& xs, const Vector& ys, std::size_t upto, auto&& on_fit) {
        LinearModel current;
        bool have = false;
        for (std::size_t i = 0; i <= upto; ++i) {
            ElasticNetParams ep{lambdas[i], params.alpha, params.max_iter, params.tol};
            current = fit_elastic_net(xs, ys, ep, have ? &current : nullptr);
            have = true;
            on_fit(i, current);
        }
        return current;
    };

    const auto folds = static_cast<std::size_t>(std::clamp<Index>(params.inner_folds, 2, n));
    const auto order = permutation(static_cast<std::size_t>(n), derive_seed(params.seed, {0x474c}));
    std::vector<std::size_t> fold_of(static_cast<std::size_t>(n));
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        fold_of[order[pos]] = pos % folds;
    }

    std::vector<double> sse(lambdas.size(), 0.0);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<Index> train;
        std::vector<Index> held;
        for (Index i = 0; i < n; ++i) {
            (fold_of[static_cast<std::size_t>(i)] == f ? held : train).push_back(i);
        }
        const Matrix xt = x(train, Eigen::all);
        const Vector yt = y(train);
        const Matrix xh = x(held, Eigen::all);
        const Vector yh = y(held);
        fit_path(xt, yt, lambdas.size() - 1, [&](std::size_t i, const LinearModel& m) {
            sse[i] += (m.predict(xh) - yh).squaredNorm();
        });
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < sse.size(); ++i) {
        if (sse[i] < sse[best]) {
            best = i;
        }
    }
    if (path) {
        path->lambdas = lambdas;
        path->cv_mse.clear();
        for (double s : sse) {
            path->cv_mse.push_back(s / static_cast<double>(n));
        }
        path->best_lambda = lambdas[best];
    }
    return fit_path(x, y, best, [](std::size_t, const LinearModel&) {});
}

} // namespace buildtime
