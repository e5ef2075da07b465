#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace xyflow {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

/// Minimal RFC 4180 writer: fields containing a comma, quote or line break
/// are quoted, embedded quotes doubled, rows end in "\n".
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    CsvWriter& header(const std::vector<std::string>& names);

    CsvWriter& field(std::string_view s);
    CsvWriter& field(const char* s) { return field(std::string_view(s)); }
    CsvWriter& field(const std::string& s) { return field(std::string_view(s)); }
    CsvWriter& field(double v) { return raw(format_double(v)); }
    CsvWriter& field(int v) { return raw(std::to_string(v)); }
    CsvWriter& field(std::int64_t v) { return raw(std::to_string(v)); }
    CsvWriter& field(std::uint64_t v) { return raw(std::to_string(v)); }
    CsvWriter& field(bool v) { return raw(v ? "1" : "0"); }

    template <class... Ts>
    CsvWriter& row(const Ts&... values) {
        (field(values), ...);
        return end_row();
    }

    CsvWriter& end_row();

private:
    CsvWriter& raw(const std::string& s);

    std::ostream& out_;
    bool first_ = true;
};

/// Parses one CSV document into rows of fields (quoted fields supported).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace xyflow
