#include "tsf/series.hpp"

#include <cmath>

namespace tsf {

TimeSeries::TimeSeries(int start_year, std::vector<double> values)
    : start_year_(start_year), values_(std::move(values)) {
    if (values_.empty()) {
        throw LengthError("time series must contain at least one observation");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument("time series value at year " +
                                        std::to_string(start_year_ + static_cast<int>(i)) +
                                        " is not finite");
        }
    }
}

double TimeSeries::at_year(int year) const {
    if (year < start_year_ || year > end_year()) {
        throw RangeError("year " + std::to_string(year) + " outside series range " +
                         std::to_string(start_year_) + ".." + std::to_string(end_year()));
    }
    return values_[static_cast<std::size_t>(year - start_year_)];
}

std::vector<double> difference_values(std::span<const double> values, int order) {
    if (order < 0) {
        throw std::invalid_argument("differencing order must be non-negative");
    }
    if (values.size() <= static_cast<std::size_t>(order)) {
        throw LengthError("differencing of order " + std::to_string(order) +
                          " needs at least " + std::to_string(order + 1) + " observations, got " +
                          std::to_string(values.size()));
    }
    std::vector<double> out(values.begin(), values.end());
    for (int k = 0; k < order; ++k) {
        for (std::size_t i = 0; i + 1 < out.size(); ++i) {
            out[i] = out[i + 1] - out[i];
        }
        out.pop_back();
    }
    return out;
}

DifferencedSeries difference(const TimeSeries& series, int order) {
    DifferencedSeries d;
    d.base_start_year = series.start_year();
    d.order = order;
    d.values = difference_values(series.values(), order);
    auto v = series.values();
    d.initial_values.assign(v.begin(), v.begin() + order);
    return d;
}

TimeSeries integrate(const DifferencedSeries& diff) {
    if (diff.order < 0) {
        throw std::invalid_argument("differencing order must be non-negative");
    }
    const auto order = static_cast<std::size_t>(diff.order);
    if (diff.initial_values.size() < order) {
        throw std::invalid_argument("cannot integrate: order " + std::to_string(order) +
                                    " requires " + std::to_string(order) +
                                    " initial values, got " +
                                    std::to_string(diff.initial_values.size()));
    }
    if (order == 0) {
        return TimeSeries(diff.base_start_year, diff.values);
    }
    // heads[k] is the first element of the k-th difference of the original series.
    std::vector<double> heads(order);
    {
        std::vector<double> lead(diff.initial_values.begin(),
                                 diff.initial_values.begin() + static_cast<long>(order));
        for (std::size_t k = 0; k < order; ++k) {
            heads[k] = lead.front();
            for (std::size_t i = 0; i + 1 < lead.size(); ++i) {
                lead[i] = lead[i + 1] - lead[i];
            }
            lead.pop_back();
        }
    }
    std::vector<double> level = diff.values;
    for (std::size_t k = order; k-- > 0;) {
        std::vector<double> up;
        up.reserve(level.size() + 1);
        up.push_back(heads[k]);
        for (double step : level) {
            up.push_back(up.back() + step);
        }
        level = std::move(up);
    }
    return TimeSeries(diff.base_start_year, std::move(level));
}

std::pair<TimeSeries, TimeSeries> split_at(const TimeSeries& series, int last_train_year) {
    if (last_train_year < series.start_year() || last_train_year >= series.end_year()) {
        throw RangeError("split year " + std::to_string(last_train_year) +
                         " must lie in [" + std::to_string(series.start_year()) + ", " +
                         std::to_string(series.end_year() - 1) + "]");
    }
    auto v = series.values();
    const auto cut = static_cast<std::size_t>(last_train_year - series.start_year() + 1);
    TimeSeries train(series.start_year(), std::vector<double>(v.begin(), v.begin() + cut));
    TimeSeries test(last_train_year + 1, std::vector<double>(v.begin() + cut, v.end()));
    return {std::move(train), std::move(test)};
}

}  // namespace tsf
