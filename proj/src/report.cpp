#include "buildtime/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "buildtime/csv.hpp"

namespace buildtime {

namespace {

std::string fixed(double value, int digits)
{
    if (std::isnan(value)) {
        return "NA";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

using Cell = std::string;

std::string render_grid(const std::vector<std::vector<Cell>>& rows)
{
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::string pad(width[c] - row[c].size(), ' ');
            // First column left-aligned, numbers right-aligned.
            if (c == 0) {
                out << row[c] << pad;
            } else {
                out << "  " << pad << row[c];
            }
        }
        out << '\n';
    }
    return out.str();
}

std::vector<Cell> summary_row(const std::string& name, const SixNumberSummary& s, bool thousands)
{
    auto cell = [&](double v) {
        if (s.all_missing) {
            return std::string("NA");
        }
        return thousands ? with_thousands(v) : fixed(v, 4);
    };
    return {name, cell(s.min), cell(s.q1), cell(s.median), cell(s.mean), cell(s.q3), cell(s.max),
            std::to_string(s.na_count)};
}

void summary_csv(std::string& out, const std::string& algorithm, const char* metric, const SixNumberSummary& s)
{
    auto cell = [&](double v) { return s.all_missing ? std::string("NA") : format_number(v); };
    out += csv::escape(algorithm) + "," + metric + "," + cell(s.min) + "," + cell(s.q1) + "," + cell(s.median) + "," +
           cell(s.mean) + "," + cell(s.q3) + "," + cell(s.max) + "," + std::to_string(s.na_count) + "\n";
}

} // namespace

std::string format_number(double value)
{
    if (std::isnan(value)) {
        return "NaN";
    }
    if (std::isinf(value)) {
        return value > 0 ? "Inf" : "-Inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string format_number(const std::optional<double>& value)
{
    return value ? format_number(*value) : std::string("NA");
}

std::string with_thousands(double value)
{
    if (!std::isfinite(value)) {
        return format_number(value);
    }
    const long long rounded = std::llround(value);
    std::string digits = std::to_string(rounded < 0 ? -rounded : rounded);
    std::string out;
    const std::size_t lead = digits.size() % 3;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i != 0 && (i + 3 - lead) % 3 == 0) {
            out += ',';
        }
        out += digits[i];
    }
    return rounded < 0 ? "-" + out : out;
}

std::string render_benchmark_table(const std::vector<CvReport>& reports)
{
    const std::vector<Cell> header{"", "Min.", "1st Qu.", "Median", "Mean", "3rd Qu.", "Max.", "NA's"};
    std::vector<std::vector<Cell>> rmse_rows{header};
    std::vector<std::vector<Cell>> r2_rows{header};
    for (const auto& r : reports) {
        rmse_rows.push_back(summary_row(r.algorithm, r.rmse, true));
        r2_rows.push_back(summary_row(r.algorithm, r.r_squared, false));
    }
    return "RMSE\n" + render_grid(rmse_rows) + "\nRsquared\n" + render_grid(r2_rows);
}

std::string benchmark_csv(const std::vector<CvReport>& reports)
{
    std::string out = "algorithm,metric,min,q1,median,mean,q3,max,na\n";
    for (const auto& r : reports) {
        summary_csv(out, r.algorithm, "rmse", r.rmse);
        summary_csv(out, r.algorithm, "r_squared", r.r_squared);
    }
    return out;
}

std::string fold_csv(const std::vector<CvReport>& reports)
{
    std::string out;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        std::string body = reports[i].to_csv();
        if (i != 0) {
            body.erase(0, body.find('\n') + 1);
        }
        out += body;
    }
    return out;
}

std::string render_test_table(const std::vector<TestResult>& results)
{
    std::vector<std::vector<Cell>> rows{{"Algorithm", "RMSE", "R^2"}};
    for (const auto& r : results) {
        rows.push_back({r.algorithm, with_thousands(r.metrics.rmse),
                        r.metrics.r_squared ? fixed(*r.metrics.r_squared, 4) : "NA"});
    }
    return render_grid(rows);
}

std::string test_csv(const std::vector<TestResult>& results)
{
    std::string out = "algorithm,rmse,r_squared,r_squared_traditional\n";
    for (const auto& r : results) {
        out += csv::escape(r.algorithm) + "," + format_number(r.metrics.rmse) + "," +
               format_number(r.metrics.r_squared) + "," + format_number(r.metrics.r_squared_traditional) + "\n";
    }
    return out;
}

} // namespace buildtime
