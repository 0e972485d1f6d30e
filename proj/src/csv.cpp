#include "buildtime/csv.hpp"

namespace buildtime::csv {

bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line)
{
    fields.clear();
    int c = in.get();
    if (c == std::char_traits<char>::eof()) {
        return false;
    }

    std::string field;
    bool quoted = false;
    ++line;
    for (;; c = in.get()) {
        if (c == std::char_traits<char>::eof()) {
            fields.push_back(std::move(field));
            return true;
        }
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') {
                    ++line;
                }
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
        case '"':
            quoted = true;
            break;
        case ',':
            fields.push_back(std::move(field));
            field.clear();
            break;
        case '\r':
            if (in.peek() == '\n') {
                in.get();
            }
            [[fallthrough]];
        case '\n':
            fields.push_back(std::move(field));
            return true;
        default:
            field.push_back(ch);
        }
    }
}

std::string escape(const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') {
            out += "\"\"";
        } else {
            out.push_back(ch);
        }
    }
    out.push_back('"');
    return out;
}

} // namespace buildtime::csv
