#include "buildtime/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "buildtime/csv.hpp"
#include "buildtime/error.hpp"
#include "buildtime/rng.hpp"

namespace buildtime {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

std::optional<double> parse_number(std::string_view cell)
{
    cell = trim(cell);
    if (cell.empty()) {
        return std::nullopt;
    }
    if (cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || end != cell.data() + cell.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<double> parse_boolean(std::string_view cell)
{
    cell = trim(cell);
    static constexpr std::array<std::string_view, 6> truthy{"true", "TRUE", "True", "T", "1", "yes"};
    static constexpr std::array<std::string_view, 6> falsy{"false", "FALSE", "False", "F", "0", "no"};
    if (std::find(truthy.begin(), truthy.end(), cell) != truthy.end()) {
        return 1.0;
    }
    if (std::find(falsy.begin(), falsy.end(), cell) != falsy.end()) {
        return 0.0;
    }
    return std::nullopt;
}

std::optional<double> parse_cell(std::string_view cell, FeatureKind kind)
{
    if (is_missing(cell)) {
        return std::nullopt;
    }
    switch (kind) {
    case FeatureKind::Boolean:
        return parse_boolean(cell);
    case FeatureKind::Count: {
        auto value = parse_number(cell);
        if (value && *value < 0.0) {
            return std::nullopt;
        }
        return value;
    }
    case FeatureKind::Real:
        return parse_number(cell);
    }
    return std::nullopt;
}

double median_of(std::vector<double> values)
{
    if (values.empty()) {
        return 0.0;
    }
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return lower + (upper - lower) / 2.0;
}

} // namespace

std::vector<std::string> predictor_names()
{
    std::vector<std::string> names;
    names.reserve(kPredictors.size());
    for (const auto& f : kPredictors) {
        names.emplace_back(f.name);
    }
    return names;
}

std::vector<std::string> travistorrent_columns()
{
    std::vector<std::string> names = predictor_names();
    names.emplace_back(kResponseColumn);
    for (auto name : kIgnoredColumns) {
        names.emplace_back(name);
    }
    return names;
}

bool is_missing(std::string_view cell)
{
    cell = trim(cell);
    return cell.empty() || cell == "NA";
}

std::optional<std::size_t> RawTable::column_index(std::string_view name) const
{
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - columns.begin());
}

RawTable parse_csv(std::istream& in, const std::vector<std::string>& schema, const std::string& source)
{
    RawTable table;
    std::size_t line = 0;
    if (!csv::read_record(in, table.columns, line)) {
        throw IoError(source + ": missing header row");
    }
    if (!table.columns.empty() && table.columns.front().starts_with("\xEF\xBB\xBF")) {
        table.columns.front().erase(0, 3);
    }

    std::set<std::string> seen;
    for (const auto& name : table.columns) {
        if (!seen.insert(name).second) {
            throw SchemaError(source + ":1: duplicate column '" + name + "'");
        }
    }
    const std::set<std::string> expected(schema.begin(), schema.end());
    for (const auto& name : table.columns) {
        if (!expected.contains(name)) {
            table.unknown_columns.push_back(name);
        }
    }
    for (const auto& name : schema) {
        if (!seen.contains(name)) {
            table.missing_columns.push_back(name);
        }
    }

    const bool any_predictor = std::any_of(kPredictors.begin(), kPredictors.end(),
                                           [&](const FeatureDef& f) { return seen.contains(std::string(f.name)); });
    if (!any_predictor && !seen.contains(std::string(kResponseColumn))) {
        throw SchemaError(source + ":1: header matches none of the build-record columns");
    }

    std::vector<std::string> fields;
    for (;;) {
        const std::size_t first_line = line + 1;
        if (!csv::read_record(in, fields, line)) {
            break;
        }
        if (fields.size() == 1 && fields.front().empty()) {
            continue; // blank line
        }
        if (fields.size() != table.columns.size()) {
            throw IoError(source + ":" + std::to_string(first_line) + ": expected " +
                          std::to_string(table.columns.size()) + " fields, found " + std::to_string(fields.size()));
        }
        table.rows.push_back(fields);
    }
    return table;
}

RawTable load_csv(const std::filesystem::path& path, const std::vector<std::string>& schema)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return parse_csv(in, schema, path.string());
}

CleanResult clean(const RawTable& table)
{
    auto response = table.column_index(kResponseColumn);
    if (!response) {
        throw SchemaError("column '" + std::string(kResponseColumn) + "' is absent");
    }
    CleanResult result;
    result.table.columns = table.columns;
    result.table.unknown_columns = table.unknown_columns;
    result.table.missing_columns = table.missing_columns;
    for (const auto& row : table.rows) {
        const std::string& cell = row[*response];
        if (is_missing(cell)) {
            ++result.dropped_count;
            continue;
        }
        auto value = parse_number(cell);
        if (!value || *value < 0.0) {
            ++result.invalid_count;
            continue;
        }
        result.table.rows.push_back(row);
    }
    return result;
}

RawTable select_rows(const RawTable& table, std::span<const std::size_t> rows)
{
    RawTable out;
    out.columns = table.columns;
    out.unknown_columns = table.unknown_columns;
    out.missing_columns = table.missing_columns;
    out.rows.reserve(rows.size());
    for (std::size_t r : rows) {
        out.rows.push_back(table.rows.at(r));
    }
    return out;
}

RawTable shuffle(const RawTable& table, std::uint64_t seed)
{
    auto order = permutation(table.size(), derive_seed(seed, {0x5348}));
    return select_rows(table, order);
}

SplitIndices split(std::size_t n, double fraction, std::uint64_t seed)
{
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw InvalidArgument("split fraction must lie in (0, 1), got " + std::to_string(fraction));
    }
    if (n == 0) {
        throw InvalidArgument("cannot split an empty table");
    }
    // The epsilon absorbs representation error such as 0.7 * 10 = 6.9999...
    const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
    auto order = permutation(n, derive_seed(seed, {0x5350}));

    SplitIndices out;
    out.seed = seed;
    out.fraction = fraction;
    out.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(out.train_rows.begin(), out.train_rows.end());
    std::sort(out.test_rows.begin(), out.test_rows.end());
    return out;
}

SplitIndices split(const RawTable& table, double fraction, std::uint64_t seed)
{
    return split(table.size(), fraction, seed);
}

BuildRecord parse_record(const RawTable& table, std::size_t row, std::span<const FeatureDef> features,
                         std::span<const std::size_t> column_of)
{
    const auto& cells = table.rows.at(row);
    BuildRecord record;
    record.predictors.reserve(features.size());
    for (std::size_t j = 0; j < features.size(); ++j) {
        record.predictors.push_back(parse_cell(cells[column_of[j]], features[j].kind));
    }
    if (auto response = table.column_index(kResponseColumn)) {
        auto value = parse_number(cells[*response]);
        if (!value || *value < 0.0) {
            throw InvalidArgument("row " + std::to_string(row) + " has no valid tr_duration; clean the table first");
        }
        record.duration = *value;
    }
    return record;
}

FeatureMatrix encode(const RawTable& table, std::span<const FeatureDef> features, const std::vector<double>* frozen)
{
    if (!table.column_index(kResponseColumn)) {
        throw SchemaError("column '" + std::string(kResponseColumn) + "' is absent");
    }
    std::vector<std::size_t> column_of;
    column_of.reserve(features.size());
    for (const auto& f : features) {
        auto idx = table.column_index(f.name);
        if (!idx) {
            throw SchemaError("predictor column '" + std::string(f.name) + "' is absent");
        }
        column_of.push_back(*idx);
    }
    if (frozen && frozen->size() != features.size()) {
        throw InvalidArgument("frozen imputation has " + std::to_string(frozen->size()) + " entries, expected " +
                              std::to_string(features.size()));
    }

    const std::size_t n = table.size();
    const std::size_t p = features.size();
    std::vector<BuildRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        records.push_back(parse_record(table, i, features, column_of));
    }

    FeatureMatrix out;
    out.values.resize(static_cast<Index>(n), static_cast<Index>(p));
    out.response.resize(static_cast<Index>(n));
    out.imputation.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        out.column_names.emplace_back(features[j].name);
        if (frozen) {
            out.imputation[j] = (*frozen)[j];
            continue;
        }
        std::vector<double> present;
        present.reserve(n);
        for (const auto& rec : records) {
            if (rec.predictors[j]) {
                present.push_back(*rec.predictors[j]);
            }
        }
        if (features[j].kind == FeatureKind::Boolean) {
            const auto ones = std::count(present.begin(), present.end(), 1.0);
            const auto zeros = static_cast<std::ptrdiff_t>(present.size()) - ones;
            out.imputation[j] = ones > zeros ? 1.0 : 0.0;
        } else {
            out.imputation[j] = median_of(std::move(present));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rec = records[i];
        for (std::size_t j = 0; j < p; ++j) {
            out.values(static_cast<Index>(i), static_cast<Index>(j)) = rec.predictors[j].value_or(out.imputation[j]);
        }
        out.response(static_cast<Index>(i)) = rec.duration;
    }
    return out;
}

void FeatureMatrix::validate() const
{
    if (values.rows() != response.size()) {
        throw InvalidArgument("matrix has " + std::to_string(values.rows()) + " rows but response has " +
                              std::to_string(response.size()));
    }
    if (static_cast<Index>(column_names.size()) != values.cols()) {
        throw InvalidArgument("column name count does not match matrix width");
    }
    std::set<std::string> unique(column_names.begin(), column_names.end());
    if (unique.size() != column_names.size()) {
        throw InvalidArgument("duplicate column names");
    }
    if (!values.allFinite() || !response.allFinite()) {
        throw InvalidArgument("matrix contains missing or non-finite values");
    }
    if (!imputation.empty() && imputation.size() != column_names.size()) {
        throw InvalidArgument("imputation vector does not match column count");
    }
}

std::optional<std::size_t> FeatureMatrix::column_index(std::string_view name) const
{
    auto it = std::find(column_names.begin(), column_names.end(), name);
    if (it == column_names.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - column_names.begin());
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const
{
    FeatureMatrix out;
    out.column_names = column_names;
    out.response_name = response_name;
    out.imputation = imputation;
    out.provenance = provenance;
    out.values.resize(static_cast<Index>(rows.size()), values.cols());
    out.response.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Index>(rows[i]);
        if (r >= values.rows()) {
            throw InvalidArgument("row index out of range");
        }
        out.values.row(static_cast<Index>(i)) = values.row(r);
        out.response(static_cast<Index>(i)) = response(r);
    }
    return out;
}

FeatureMatrix subsample(const FeatureMatrix& matrix, std::size_t n, std::uint64_t seed)
{
    if (n > static_cast<std::size_t>(matrix.rows())) {
        throw InvalidArgument("subsample of " + std::to_string(n) + " rows requested from " +
                              std::to_string(matrix.rows()));
    }
    auto order = permutation(static_cast<std::size_t>(matrix.rows()), derive_seed(seed, {0x5342}));
    order.resize(n);
    auto out = matrix.select_rows(order);
    out.provenance["subsample_seed"] = std::to_string(seed);
    out.provenance["subsample_rows"] = std::to_string(n);
    return out;
}

} // namespace buildtime
