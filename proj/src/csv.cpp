#include "tsf/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <vector>

namespace tsf {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    for (auto& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

template <typename T>
std::optional<T> parse_number(const std::string& s) {
    T v{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        return std::nullopt;
    }
    return v;
}

}  // namespace

TimeSeries parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<double> rates;
    int first_year = 0;
    int prev_year = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) {
            line.erase(0, 3);
        }
        const std::string row = trim(line);
        if (row.empty()) {
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
            throw InputError("line " + std::to_string(line_no) + ": expected 2 columns", line_no);
        }
        const std::string c0 = trim(std::string_view(row).substr(0, comma));
        const std::string c1 = trim(std::string_view(row).substr(comma + 1));
        if (!have_header) {
            if (lower(c0) != "year" || lower(c1) != "rate") {
                throw InputError("line " + std::to_string(line_no) +
                                     ": header must be 'year,rate'",
                                 line_no);
            }
            have_header = true;
            continue;
        }
        const auto year = parse_number<int>(c0);
        if (!year) {
            throw InputError("line " + std::to_string(line_no) + ": year '" + c0 +
                                 "' is not an integer",
                             line_no);
        }
        const auto rate = parse_number<double>(c1);
        if (!rate || !std::isfinite(*rate)) {
            throw InputError("line " + std::to_string(line_no) + ": rate '" + c1 +
                                 "' is not a finite number",
                             line_no);
        }
        if (!(*rate > 0.0)) {
            throw InputError("line " + std::to_string(line_no) + ": rate must be positive", line_no);
        }
        if (rates.empty()) {
            first_year = *year;
        } else if (*year == prev_year) {
            throw InputError("line " + std::to_string(line_no) + ": duplicate year " +
                                 std::to_string(*year),
                             line_no);
        } else if (*year < prev_year) {
            throw InputError("line " + std::to_string(line_no) + ": year " +
                                 std::to_string(*year) + " is out of order",
                             line_no);
        } else if (*year != prev_year + 1) {
            throw InputError("line " + std::to_string(line_no) + ": missing year " +
                                 std::to_string(prev_year + 1),
                             line_no);
        }
        prev_year = *year;
        rates.push_back(*rate);
    }
    if (!have_header) {
        throw InputError("input is empty", 0);
    }
    if (rates.empty()) {
        throw InputError("input has a header but no data rows", 0);
    }
    return TimeSeries(first_year, std::move(rates));
}

TimeSeries load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path.string(), 0);
    }
    return parse_csv(in);
}

}  // namespace tsf
