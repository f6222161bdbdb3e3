#include "mcorr/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "mcorr/error.hpp"

namespace mcorr {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Splits one record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::string(trim(field)));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::string(trim(field)));
    return fields;
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

DataMatrix parse_csv(const std::string& text, bool has_header) {
    std::vector<std::string_view> lines;
    std::string_view rest(text);
    if (rest.size() >= 3 && rest.substr(0, 3) == "\xEF\xBB\xBF") rest.remove_prefix(3);
    while (!rest.empty()) {
        const std::size_t end = rest.find('\n');
        const std::string_view line = rest.substr(0, end);
        if (!blank(line)) lines.push_back(line);
        if (end == std::string_view::npos) break;
        rest.remove_prefix(end + 1);
    }
    if (lines.empty()) throw DataFormatError("input is empty");

    std::vector<std::string> names;
    std::size_t first = 0;
    if (has_header) {
        names = split_record(lines[0]);
        first = 1;
    }
    if (lines.size() == first) throw InsufficientSampleError("input has a header but no data rows");
    const std::size_t p = has_header ? names.size() : split_record(lines[first]).size();
    if (p < 2) throw DimensionError("need at least 2 variables, got " + std::to_string(p));

    const std::size_t n = lines.size() - first;
    Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < n; ++r) {
        const std::vector<std::string> fields = split_record(lines[first + r]);
        if (fields.size() != p) {
            throw DataFormatError("row " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) +
                                  " fields, expected " + std::to_string(p));
        }
        for (std::size_t c = 0; c < p; ++c) {
            const std::string& cell = fields[c];
            double v = 0.0;
            const char* begin = cell.data();
            const char* end = begin + cell.size();
            if (!cell.empty() && *begin == '+') ++begin;
            const auto [ptr, ec] = std::from_chars(begin, end, v);
            if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
                const std::string column = has_header ? "'" + names[c] + "'" : std::to_string(c + 1);
                throw DataFormatError("non-numeric value '" + cell + "' at row " + std::to_string(r + 1) +
                                      ", column " + column);
            }
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return DataMatrix(std::move(values), std::move(names));
}

DataMatrix ingest_csv(const std::string& path, bool has_header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidParameterError("cannot open input file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), has_header);
}

}  // namespace mcorr
