#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ptcav {

/// 17 significant digits, '.' separator; round-trips every double.
std::string format_number(double value);

/// Comma-separated rows terminated by '\n'. Comment lines start with "# ".
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void comment(std::string_view text);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);

    std::size_t rows_written() const { return rows_; }

private:
    std::ostream& out_;
    std::size_t rows_ = 0;
};

} // namespace ptcav
