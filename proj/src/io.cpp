#include "ptcav/io.hpp"

#include <array>
#include <cmath>

namespace ptcav {

std::string format_number(double value) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", value);
    return buf.data();
}

void CsvWriter::comment(std::string_view text) {
    out_ << "# " << text << '\n';
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (std::size_t k = 0; k < columns.size(); ++k)
        out_ << (k ? "," : "") << columns[k];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    header(cells);
    ++rows_;
}

} // namespace ptcav
