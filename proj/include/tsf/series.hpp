#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tsf {

/// Raised when a series is too short for the requested operation.
class LengthError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a calendar boundary falls outside a series.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/**
 * @brief Annual observations indexed by consecutive calendar years.
 *
 * Years are metadata only; every numeric routine indexes by position.
 * Values must be non-empty and finite.
 */
class TimeSeries {
public:
    TimeSeries(int start_year, std::vector<double> values);

    [[nodiscard]] int start_year() const noexcept { return start_year_; }
    [[nodiscard]] int end_year() const noexcept {
        return start_year_ + static_cast<int>(values_.size()) - 1;
    }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] double at_year(int year) const;

    bool operator==(const TimeSeries&) const = default;

private:
    int start_year_;
    std::vector<double> values_;
};

/// Result of differencing: the transformed values plus what is needed to undo it.
struct DifferencedSeries {
    int base_start_year = 0;
    int order = 0;
    std::vector<double> values;
    /// The leading observations consumed by differencing, in original order.
    std::vector<double> initial_values;
};

/// Repeated first differencing. Throws LengthError unless size() > order.
[[nodiscard]] DifferencedSeries difference(const TimeSeries& series, int order);

/// Raw first differences applied `order` times to a plain vector.
[[nodiscard]] std::vector<double> difference_values(std::span<const double> values, int order);

/// Inverse of difference(). Throws std::invalid_argument on missing initial values.
[[nodiscard]] TimeSeries integrate(const DifferencedSeries& diff);

/// Splits into [start, last_train_year] and (last_train_year, end]; both sides non-empty.
[[nodiscard]] std::pair<TimeSeries, TimeSeries> split_at(const TimeSeries& series,
                                                        int last_train_year);

}  // namespace tsf
