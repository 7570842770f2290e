#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tsf {

/// Point forecasts for consecutive years starting at first_year.
struct Forecast {
    int first_year = 0;
    std::vector<double> values;
    /// Producing model(s), e.g. "HDES" or "HDES+ARIMA(0,2,2)".
    std::string source;

    [[nodiscard]] int last_year() const {
        return first_year + static_cast<int>(values.size()) - 1;
    }
};

/// Raised when two forecasts do not cover the same years.
class AlignmentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace tsf
