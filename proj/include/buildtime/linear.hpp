#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "buildtime/types.hpp"

namespace buildtime {

// y ~ intercept + X * coefficients.
struct LinearModel {
    double intercept = 0.0;
    Vector coefficients;
    double lambda = 0.0; // penalty the model was fitted with (0 for OLS)
    double alpha = 0.0;

    [[nodiscard]] Vector predict(const Matrix& x) const;
};

// Ordinary least squares with an implicit intercept, solved through a
// column-pivoted Householder QR. Throws FitError naming the dependent
// columns when the design is rank deficient.
LinearModel fit_lm(const Matrix& x, const Vector& y, const std::vector<std::string>& names = {});

struct ElasticNetParams {
    double lambda = 0.0;
    double alpha = 0.5;
    int max_iter = 100000; // full coordinate sweeps
    double tol = 1e-9;     // max absolute coefficient change per sweep
};

// Minimizes  1/(2n) |y - b0 - X b|^2 + lambda * (alpha |b|_1 + (1 - alpha)/2 |b|_2^2)
// by cyclic coordinate descent; the intercept is unpenalized. Throws
// ConvergenceError (carrying the last iterate) when max_iter is exhausted.
LinearModel fit_elastic_net(const Matrix& x, const Vector& y, const ElasticNetParams& params,
                            const LinearModel* warm_start = nullptr);

// Soft-thresholding operator S(z, g) = sign(z) * max(|z| - g, 0).
double soft_threshold(double z, double gamma);

// Smallest lambda for which every slope is zero at the given alpha.
double lambda_max(const Matrix& x, const Vector& y, double alpha);

struct GlmnetParams {
    double alpha = 0.5;
    int n_lambda = 10;
    double lambda_min_ratio = 1e-3;
    int inner_folds = 5;
    int max_iter = 100000;
    double tol = 1e-9;
    std::uint64_t seed = 0;
};

struct GlmnetPath {
    std::vector<double> lambdas; // descending
    std::vector<double> cv_mse;
    double best_lambda = 0.0;
};

// Elastic net with lambda chosen by inner k-fold CV over a log-spaced grid
// from lambda_max down to lambda_max * lambda_min_ratio, then refit on all
// rows. `path` receives the grid and its CV errors when non-null.
LinearModel fit_glmnet(const Matrix& x, const Vector& y, const GlmnetParams& params, GlmnetPath* path = nullptr);

} // namespace buildtime
