#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>

#include "tsf/series.hpp"

namespace tsf {

/// Malformed input: bad header, missing/duplicate/gap years, unparsable or invalid rates.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& what, std::size_t line)
        : std::runtime_error(what), line(line) {}
    /// 1-based line number, 0 when not tied to a line.
    std::size_t line;
};

/// Parses `year,rate` CSV text (LF or CRLF, optional UTF-8 BOM).
[[nodiscard]] TimeSeries parse_csv(std::istream& in);

/// Reads a `year,rate` file. Throws InputError; a missing file is reported with line 0.
[[nodiscard]] TimeSeries load_csv(const std::filesystem::path& path);

}  // namespace tsf
