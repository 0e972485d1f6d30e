#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "buildtime/dataset.hpp"
#include "buildtime/rng.hpp"
#include "buildtime/types.hpp"
#include "oracles.hpp"

namespace fixture {

using buildtime::Index;
using buildtime::Matrix;
using buildtime::Rng;
using buildtime::Vector;

inline Matrix normal_matrix(Index n, Index p, Rng& rng)
{
    Matrix m(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) {
            m(i, j) = rng.normal();
        }
    }
    return m;
}

inline Matrix uniform_matrix(Index n, Index p, Rng& rng)
{
    Matrix m(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) {
            m(i, j) = rng.uniform();
        }
    }
    return m;
}

inline std::vector<std::string> names(Index p, const std::string& prefix = "x")
{
    std::vector<std::string> out;
    for (Index j = 0; j < p; ++j) {
        out.push_back(prefix + std::to_string(j + 1));
    }
    return out;
}

inline buildtime::FeatureMatrix matrix(Matrix x, Vector y)
{
    buildtime::FeatureMatrix m;
    m.column_names = names(x.cols());
    m.values = std::move(x);
    m.response = std::move(y);
    m.response_name = "y";
    return m;
}

// Nonlinear build-time-like signal: a gated interaction, a quadratic and a
// linear term among 20 standard normal columns.
inline buildtime::FeatureMatrix nonlinear(Index n, std::uint64_t seed)
{
    Rng rng(seed);
    Matrix x = normal_matrix(n, 20, rng);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y(i) = 3000.0 * (x(i, 0) > 0 ? 1.0 : 0.0) * x(i, 1) + 500.0 * x(i, 2) * x(i, 2) + 100.0 * x(i, 3) +
               300.0 * rng.normal();
    }
    return matrix(std::move(x), std::move(y));
}

// Five informative columns (x1..x5) among 30 uniform columns: three linear
// terms plus an x4*x5 interaction.
inline buildtime::FeatureMatrix planted(Index n, std::uint64_t seed)
{
    Rng rng(seed);
    Matrix x = uniform_matrix(n, 30, rng);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y(i) = 10.0 * x(i, 0) + 8.0 * x(i, 1) + 6.0 * x(i, 2) + 20.0 * x(i, 3) * x(i, 4) + 0.5 * rng.normal();
    }
    return matrix(std::move(x), std::move(y));
}

inline oracle::Table to_table(const Matrix& m)
{
    oracle::Table t(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
        }
    }
    return t;
}

inline oracle::Column to_column(const Vector& v)
{
    return oracle::Column(v.data(), v.data() + v.size());
}

// A small TravisTorrent-shaped CSV with every schema column.
inline void write_travis_csv(const std::filesystem::path& path, std::size_t rows, std::uint64_t seed)
{
    Rng rng(seed);
    const auto columns = buildtime::travistorrent_columns();
    std::ofstream out(path);
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out << (c ? "," : "") << columns[c];
    }
    out << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        const double team = 1 + static_cast<double>(rng.uniform_index(20));
        const double churn = static_cast<double>(rng.uniform_index(500));
        const double jobs = 1 + static_cast<double>(rng.uniform_index(8));
        const double duration = 60 + 30 * jobs + 0.8 * churn + 5 * team + 20 * rng.normal();
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const std::string& name = columns[c];
            std::string cell;
            if (name == "tr_duration") {
                cell = r % 17 == 5 ? "NA" : std::to_string(std::max(1.0, std::round(duration)));
            } else if (name == "gh_team_size") {
                cell = std::to_string(static_cast<int>(team));
            } else if (name == "gh_src_churn") {
                cell = std::to_string(static_cast<int>(churn));
            } else if (name == "tr_num_jobs") {
                cell = std::to_string(static_cast<int>(jobs));
            } else if (name == "gh_is_pr" || name == "tr_tests_ran" || name == "tr_tests_failed" ||
                       name == "gh_by_core_team_member") {
                cell = rng.uniform() < 0.5 ? "true" : "false";
            } else if (name == "gh_description_complexity") {
                cell = r % 3 == 0 ? "NA" : std::to_string(rng.uniform_index(40));
            } else {
                bool predictor = false;
                for (const auto& f : buildtime::kPredictors) {
                    predictor = predictor || f.name == name;
                }
                cell = predictor ? std::to_string(rng.uniform_index(100)) : "\"text, " + std::to_string(r) + "\"";
            }
            out << (c ? "," : "") << cell;
        }
        out << "\n";
    }
}

} // namespace fixture
