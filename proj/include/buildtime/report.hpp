#pragma once

#include <string>
#include <vector>

#include "buildtime/evaluate.hpp"

namespace buildtime {

// Aligned plain-text table: an RMSE block and an Rsquared block, one row per
// algorithm with Min. / 1st Qu. / Median / Mean / 3rd Qu. / Max. / NA's.
std::string render_benchmark_table(const std::vector<CvReport>& reports);

// algorithm,metric,min,q1,median,mean,q3,max,na
std::string benchmark_csv(const std::vector<CvReport>& reports);

// algorithm,repeat,fold,rmse,r_squared,r_squared_traditional,error
std::string fold_csv(const std::vector<CvReport>& reports);

// Algorithm / RMSE / R^2 table of held-out results.
std::string render_test_table(const std::vector<TestResult>& results);
std::string test_csv(const std::vector<TestResult>& results);

// Full-precision, locale-independent number formatting ("NA" for nullopt).
std::string format_number(double value);
std::string format_number(const std::optional<double>& value);

// 12345.6 -> "12,346".
std::string with_thousands(double value);

} // namespace buildtime
