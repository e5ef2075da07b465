#include "xyflow/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace xyflow {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

CsvWriter& CsvWriter::header(const std::vector<std::string>& names) {
    for (const auto& n : names) field(n);
    return end_row();
}

CsvWriter& CsvWriter::raw(const std::string& s) {
    if (!first_) out_ << ',';
    first_ = false;
    out_ << s;
    return *this;
}

CsvWriter& CsvWriter::field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return raw(std::string(s));
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    q += '"';
    return raw(q);
}

CsvWriter& CsvWriter::end_row() {
    out_ << '\n';
    first_ = true;
    return *this;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cur;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(cur));
            cur.clear();
            any = true;
        } else if (c == '\n') {
            row.push_back(std::move(cur));
            cur.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (c != '\r') {
            cur += c;
            any = true;
        }
    }
    if (any) {
        row.push_back(std::move(cur));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace xyflow
