#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "buildtime/types.hpp"

namespace buildtime {

enum class FeatureKind { Count, Real, Boolean };

struct FeatureDef {
    std::string_view name;
    FeatureKind kind;
};

inline constexpr std::string_view kResponseColumn = "tr_duration";

// Predictors selected for the build-time model, in canonical order.
inline constexpr std::array<FeatureDef, 34> kPredictors{{
    {"gh_team_size", FeatureKind::Count},
    {"gh_num_issue_comments", FeatureKind::Count},
    {"gh_num_commit_comments", FeatureKind::Count},
    {"gh_num_pr_comments", FeatureKind::Count},
    {"gh_src_churn", FeatureKind::Count},
    {"gh_test_churn", FeatureKind::Count},
    {"gh_files_added", FeatureKind::Count},
    {"gh_files_deleted", FeatureKind::Count},
    {"gh_files_modified", FeatureKind::Count},
    {"gh_tests_added", FeatureKind::Count},
    {"gh_tests_deleted", FeatureKind::Count},
    {"gh_src_files", FeatureKind::Count},
    {"gh_doc_files", FeatureKind::Count},
    {"gh_other_files", FeatureKind::Count},
    {"tr_tests_ok", FeatureKind::Count},
    {"tr_tests_fail", FeatureKind::Count},
    {"tr_tests_run", FeatureKind::Count},
    {"tr_tests_skipped", FeatureKind::Count},
    {"tr_testduration", FeatureKind::Real},
    {"gh_test_lines_per_kloc", FeatureKind::Real},
    {"gh_test_cases_per_kloc", FeatureKind::Real},
    {"gh_asserts_cases_per_kloc", FeatureKind::Real},
    {"gh_description_complexity", FeatureKind::Count},
    {"tr_num_jobs", FeatureKind::Count},
    {"gh_commits_on_files_touched", FeatureKind::Count},
    {"gh_sloc", FeatureKind::Count},
    {"tr_setup_time", FeatureKind::Real},
    {"tr_purebuildduration", FeatureKind::Real},
    {"git_num_committers", FeatureKind::Count},
    {"tr_ci_latency", FeatureKind::Real},
    {"gh_is_pr", FeatureKind::Boolean},
    {"tr_tests_ran", FeatureKind::Boolean},
    {"tr_tests_failed", FeatureKind::Boolean},
    {"gh_by_core_team_member", FeatureKind::Boolean},
}};

// The remaining TravisTorrent columns: identifiers, strings and dates. They
// are recognized on load but never encoded.
inline constexpr std::array<std::string_view, 21> kIgnoredColumns{{
    "row", "gh_pull_req_num", "tr_build_number",
    "gh_first_commit_created_at", "tr_started_at",
    "git_commit", "gh_project_name", "gh_lang", "git_branch", "git_commits",
    "git_num_commits", "git_merged_with", "tr_build_id", "tr_status", "tr_jobs",
    "tr_job_id", "tr_lan", "tr_analyzer", "tr_frameworks", "tr_prev_build",
    "git_prev_commit",
}};

// Every column name the loader recognizes (predictors, response, ignored).
std::vector<std::string> travistorrent_columns();

// Names of kPredictors in order.
std::vector<std::string> predictor_names();

bool is_missing(std::string_view cell);

// Cells as read from disk. Row-major; every row has columns.size() cells.
struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    // Columns present in the file but not in the expected schema.
    std::vector<std::string> unknown_columns;
    // Expected columns absent from the file.
    std::vector<std::string> missing_columns;

    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
    [[nodiscard]] std::optional<std::size_t> column_index(std::string_view name) const;
};

RawTable load_csv(const std::filesystem::path& path, const std::vector<std::string>& schema = travistorrent_columns());
RawTable parse_csv(std::istream& in, const std::vector<std::string>& schema = travistorrent_columns(),
                   const std::string& source = "<stream>");

struct CleanResult {
    RawTable table;
    std::size_t dropped_count = 0; // NA response
    std::size_t invalid_count = 0; // negative or non-numeric response
};

CleanResult clean(const RawTable& table);

RawTable shuffle(const RawTable& table, std::uint64_t seed);

struct SplitIndices {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    std::uint64_t seed = 0;
    double fraction = 0.7;
};

// |train| = floor(fraction * n); the remainder goes to test.
SplitIndices split(std::size_t n, double fraction, std::uint64_t seed);
SplitIndices split(const RawTable& table, double fraction, std::uint64_t seed);

RawTable select_rows(const RawTable& table, std::span<const std::size_t> rows);

// One build job parsed against the predictor schema. Missing or invalid
// predictor cells are nullopt; booleans are exactly 0 or 1.
struct BuildRecord {
    std::vector<std::optional<double>> predictors;
    double duration = 0.0;
};

BuildRecord parse_record(const RawTable& table, std::size_t row, std::span<const FeatureDef> features,
                         std::span<const std::size_t> column_of);

// Dense, complete design matrix.
struct FeatureMatrix {
    Matrix values;
    std::vector<std::string> column_names;
    Vector response;
    std::string response_name = std::string(kResponseColumn);
    // Constant substituted for missing cells, per column (empty when the
    // matrix was not produced by encode).
    std::vector<double> imputation;
    std::map<std::string, std::string> provenance;

    [[nodiscard]] Index rows() const noexcept { return values.rows(); }
    [[nodiscard]] Index cols() const noexcept { return values.cols(); }

    // Throws InvalidArgument if any invariant is broken.
    void validate() const;

    [[nodiscard]] FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
    [[nodiscard]] std::optional<std::size_t> column_index(std::string_view name) const;
};

// Encodes predictors and response. Imputation constants are fitted from the
// table (median for numeric, mode for boolean) unless `frozen` supplies them.
FeatureMatrix encode(const RawTable& table, std::span<const FeatureDef> features = kPredictors,
                     const std::vector<double>* frozen = nullptr);

FeatureMatrix subsample(const FeatureMatrix& matrix, std::size_t n, std::uint64_t seed);

// Columnar on-disk cache of an encoded matrix.
void save_matrix(const std::filesystem::path& path, const FeatureMatrix& matrix);
FeatureMatrix load_matrix(const std::filesystem::path& path);

// FNV-1a over column names and raw values.
std::uint64_t fingerprint(const FeatureMatrix& matrix);

} // namespace buildtime
