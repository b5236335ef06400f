#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nlh::io {

/// Shortest decimal string that round-trips to the same double.
/// Non-finite values render as "nan", "inf" and "-inf".
std::string format_double(double v);

/// Minimal CSV writer: comma separator, '.' decimal point, LF line endings.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::span<const std::string_view> header);

    void row(std::span<const double> values);
    /// Row of pre-formatted cells (no quoting; cells must not contain commas).
    void raw_row(std::span<const std::string> cells);

private:
    std::ostream& os_;
    std::size_t columns_;
};

}  // namespace nlh::io
