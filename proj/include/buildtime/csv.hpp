#pragma once

#include <istream>
#include <string>
#include <vector>

namespace buildtime::csv {

// Reads one record (comma separated, double-quote quoting, quoted fields may
// span lines). Returns false at end of input. `line` is advanced by the
// number of physical lines consumed.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line);

// Quotes a field if it contains a comma, quote, or newline.
std::string escape(const std::string& field);

} // namespace buildtime::csv
