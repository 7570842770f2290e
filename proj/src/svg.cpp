#include "tsf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "tsf/diagnostics.hpp"
#include "tsf/distributions.hpp"

namespace tsf::plot {

namespace {

constexpr double kWidth = 800.0;
constexpr double kPanelHeight = 360.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 45.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    // Avoid "-0.00" so output does not depend on the sign of rounding noise.
    if (std::string_view(buf) == "-0.00") {
        return "0.00";
    }
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

double nice_step(double span, int target) {
    if (!(span > 0.0)) {
        return 1.0;
    }
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

std::string tick_label(double v, double step) {
    char buf[32];
    const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step)));
    std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < step * 1e-9 ? 0.0 : v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi - lo < 1e-12) {
            const double d = std::max(1.0, std::abs(lo) * 0.05);
            lo -= d;
            hi += d;
        } else {
            const double d = (hi - lo) * 0.05;
            lo -= d;
            hi += d;
        }
    }
};

// One plotting area inside the document.
class Panel {
public:
    Panel(double top, Range x, Range y) : top_(top), x_(x), y_(y) {}

    [[nodiscard]] double px(double x) const {
        return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight);
    }
    [[nodiscard]] double py(double y) const {
        const double h = kPanelHeight - kTop - kBottom;
        return top_ + kTop + h - (y - y_.lo) / (y_.hi - y_.lo) * h;
    }
    [[nodiscard]] double x_lo() const { return x_.lo; }
    [[nodiscard]] double x_hi() const { return x_.hi; }
    [[nodiscard]] double y_lo() const { return y_.lo; }
    [[nodiscard]] double y_hi() const { return y_.hi; }

    void axes(std::ostringstream& o, const std::string& title, const std::string& xlabel,
              const std::string& ylabel, bool integer_x) const {
        const double bottom = py(y_.lo);
        const double top = py(y_.hi);
        o << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(top_ + 24)
          << "\" text-anchor=\"middle\" font-size=\"16\">" << escape(title) << "</text>\n";
        o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(top) << "\" width=\""
          << num(px(x_.hi) - kLeft) << "\" height=\"" << num(bottom - top)
          << "\" fill=\"none\" stroke=\"#333\"/>\n";

        const double xs = integer_x ? std::max(1.0, nice_step(x_.hi - x_.lo, 10))
                                    : nice_step(x_.hi - x_.lo, 8);
        std::vector<double> xticks;
        for (double v = std::ceil(x_.lo / xs) * xs; v <= x_.hi + 1e-9; v += xs) {
            xticks.push_back(v);
        }
        // Year axes always label the final year.
        if (integer_x && (xticks.empty() || xticks.back() < x_.hi - 1e-9)) {
            if (!xticks.empty() && x_.hi - xticks.back() < 0.5 * xs) {
                xticks.pop_back();
            }
            xticks.push_back(x_.hi);
        }
        for (const double v : xticks) {
            const double x = px(v);
            o << "<line x1=\"" << num(x) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(x)
              << "\" y2=\"" << num(bottom + 5) << "\" stroke=\"#333\"/>"
              << "<text x=\"" << num(x) << "\" y=\"" << num(bottom + 18)
              << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(v, xs)
              << "</text>\n";
        }
        const double ys = nice_step(y_.hi - y_.lo, 6);
        for (double v = std::ceil(y_.lo / ys) * ys; v <= y_.hi + 1e-9; v += ys) {
            const double y = py(v);
            o << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\""
              << num(kLeft) << "\" y2=\"" << num(y) << "\" stroke=\"#333\"/>"
              << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
              << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(v, ys) << "</text>\n";
        }
        o << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(bottom + 36)
          << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(xlabel) << "</text>\n";
        o << "<text x=\"16\" y=\"" << num((top + bottom) / 2)
          << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
          << num((top + bottom) / 2) << ")\">" << escape(ylabel) << "</text>\n";
    }

    void polyline(std::ostringstream& o, const Line& line) const {
        o << "<polyline fill=\"none\" stroke=\"" << line.color << "\" stroke-width=\"2\"";
        if (line.dashed) {
            o << " stroke-dasharray=\"6 4\"";
        }
        o << " points=\"";
        for (std::size_t i = 0; i < line.values.size(); ++i) {
            if (i > 0) {
                o << ' ';
            }
            o << num(px(line.first_year + static_cast<double>(i))) << ','
              << num(py(line.values[i]));
        }
        o << "\"/>\n";
    }

private:
    double top_;
    Range x_;
    Range y_;
};

void require_points(const Line& line) {
    if (line.values.size() < 2) {
        throw PlotError("plot '" + line.label + "' needs at least 2 points, got " +
                        std::to_string(line.values.size()));
    }
}

Range year_range(std::initializer_list<const Line*> lines) {
    Range r;
    for (const auto* l : lines) {
        if (!l->values.empty()) {
            r.add(l->first_year);
            r.add(l->first_year + static_cast<double>(l->values.size()) - 1);
        }
    }
    return r;
}

void add_values(Range& r, const Line& l) {
    for (double v : l.values) {
        r.add(v);
    }
}

std::string header(double height) {
    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(height)
      << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return o.str();
}

void legend(std::ostringstream& o, const std::vector<const Line*>& lines) {
    double y = kTop + 14;
    for (const auto* l : lines) {
        o << "<line x1=\"" << num(kWidth - 190) << "\" y1=\"" << num(y) << "\" x2=\""
          << num(kWidth - 165) << "\" y2=\"" << num(y) << "\" stroke=\"" << l->color
          << "\" stroke-width=\"2\"" << (l->dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>"
          << "<text x=\"" << num(kWidth - 160) << "\" y=\"" << num(y + 4)
          << "\" font-size=\"11\">" << escape(l->label) << "</text>\n";
        y += 16;
    }
}

}  // namespace

std::string observed_svg(const std::string& title, const Line& series) {
    require_points(series);
    Range ys;
    add_values(ys, series);
    ys.pad();
    Panel panel(0.0, year_range({&series}), ys);
    std::ostringstream o;
    o << header(kPanelHeight);
    panel.axes(o, title, "Year", "Rate per 100,000", true);
    panel.polyline(o, series);
    o << "</svg>\n";
    return o.str();
}

std::string fitted_vs_observed_svg(const std::string& title, const Line& observed,
                                   std::span<const Line> fitted) {
    require_points(observed);
    Range xs = year_range({&observed});
    Range ys;
    add_values(ys, observed);
    for (const auto& f : fitted) {
        require_points(f);
        add_values(ys, f);
        xs.add(f.first_year);
        xs.add(f.first_year + static_cast<double>(f.values.size()) - 1);
    }
    ys.pad();
    Panel panel(0.0, xs, ys);
    std::ostringstream o;
    o << header(kPanelHeight);
    panel.axes(o, title, "Year", "Rate per 100,000", true);
    panel.polyline(o, observed);
    for (const auto& f : fitted) {
        panel.polyline(o, f);
    }
    std::vector<const Line*> keyed{&observed};
    for (const auto& f : fitted) {
        keyed.push_back(&f);
    }
    legend(o, keyed);
    o << "</svg>\n";
    return o.str();
}

std::string forecast_svg(const std::string& title, const Line& observed, const Line& forecast) {
    require_points(observed);
    if (forecast.values.empty()) {
        throw PlotError("forecast plot needs at least one forecast value");
    }
    Range ys;
    add_values(ys, observed);
    add_values(ys, forecast);
    ys.pad();
    Panel panel(0.0, year_range({&observed, &forecast}), ys);
    std::ostringstream o;
    o << header(kPanelHeight);
    const double last_obs = observed.first_year + static_cast<double>(observed.values.size()) - 1;
    const double x0 = panel.px(last_obs);
    const double x1 = panel.px(panel.x_hi());
    o << "<rect x=\"" << num(x0) << "\" y=\"" << num(panel.py(panel.y_hi())) << "\" width=\""
      << num(x1 - x0) << "\" height=\"" << num(panel.py(panel.y_lo()) - panel.py(panel.y_hi()))
      << "\" fill=\"#fde9c9\" fill-opacity=\"0.7\"/>\n";
    panel.axes(o, title, "Year", "Rate per 100,000", true);
    panel.polyline(o, observed);
    // Join the forecast to the last observation so the lines connect.
    Line joined = forecast;
    joined.first_year = forecast.first_year - 1;
    joined.values.insert(joined.values.begin(), observed.values.back());
    panel.polyline(o, joined);
    legend(o, {&observed, &forecast});
    o << "</svg>\n";
    return o.str();
}

std::string residual_panel_svg(const std::string& title, int first_year,
                               std::span<const double> residuals, std::size_t acf_lags) {
    if (residuals.size() < 2) {
        throw PlotError("residual panel needs at least 2 residuals");
    }
    const std::size_t n = residuals.size();
    std::ostringstream o;
    o << header(3 * kPanelHeight);

    // Panel 1: residuals over time.
    Line line{"residuals", first_year, {residuals.begin(), residuals.end()}, "#1f77b4", false};
    Range ys;
    add_values(ys, line);
    ys.add(0.0);
    ys.pad();
    Panel p1(0.0, year_range({&line}), ys);
    p1.axes(o, title + ": residuals", "Year", "Residual", true);
    o << "<line x1=\"" << num(p1.px(p1.x_lo())) << "\" y1=\"" << num(p1.py(0)) << "\" x2=\""
      << num(p1.px(p1.x_hi())) << "\" y2=\"" << num(p1.py(0))
      << "\" stroke=\"#999\" stroke-dasharray=\"3 3\"/>\n";
    p1.polyline(o, line);

    // Panel 2: ACF bars. Degenerate residuals (zero variance) get an empty panel.
    const std::size_t lags = std::min(acf_lags, n - 1);
    std::vector<CorrelogramPoint> points;
    if (lags > 0) {
        try {
            points = acf(residuals, lags);
        } catch (const DegenerateError&) {
            points.clear();
        }
    }
    const double band = 1.96 / std::sqrt(static_cast<double>(n));
    Range ax;
    ax.add(0.0);
    ax.add(static_cast<double>(std::max<std::size_t>(lags, 1)) + 0.5);
    Range ay;
    ay.add(-1.0);
    ay.add(1.0);
    Panel p2(kPanelHeight, ax, ay);
    p2.axes(o, title + ": ACF", "Lag", "ACF", true);
    for (double b : {band, -band}) {
        o << "<line x1=\"" << num(p2.px(ax.lo)) << "\" y1=\"" << num(p2.py(b)) << "\" x2=\""
          << num(p2.px(ax.hi)) << "\" y2=\"" << num(p2.py(b))
          << "\" stroke=\"#d62728\" stroke-dasharray=\"5 4\"/>\n";
    }
    o << "<line x1=\"" << num(p2.px(ax.lo)) << "\" y1=\"" << num(p2.py(0)) << "\" x2=\""
      << num(p2.px(ax.hi)) << "\" y2=\"" << num(p2.py(0)) << "\" stroke=\"#333\"/>\n";
    for (const auto& pt : points) {
        const double x = p2.px(static_cast<double>(pt.lag));
        o << "<line x1=\"" << num(x) << "\" y1=\"" << num(p2.py(0)) << "\" x2=\"" << num(x)
          << "\" y2=\"" << num(p2.py(pt.value)) << "\" stroke=\"#1f77b4\" stroke-width=\"4\"/>\n";
    }

    // Panel 3: normal Q-Q with Blom plotting positions.
    std::vector<double> sorted(residuals.begin(), residuals.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> theo(n);
    for (std::size_t i = 0; i < n; ++i) {
        theo[i] = dist::normal_quantile((static_cast<double>(i + 1) - 0.375) /
                                        (static_cast<double>(n) + 0.25));
    }
    Range qx;
    Range qy;
    for (std::size_t i = 0; i < n; ++i) {
        qx.add(theo[i]);
        qy.add(sorted[i]);
    }
    qx.pad();
    qy.pad();
    Panel p3(2 * kPanelHeight, qx, qy);
    p3.axes(o, title + ": normal Q-Q", "Theoretical quantile", "Sample quantile", false);
    double mean = 0.0;
    for (double v : sorted) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double sd = 0.0;
    for (double v : sorted) {
        sd += (v - mean) * (v - mean);
    }
    sd = std::sqrt(sd / static_cast<double>(n > 1 ? n - 1 : 1));
    o << "<line x1=\"" << num(p3.px(qx.lo)) << "\" y1=\"" << num(p3.py(mean + sd * qx.lo))
      << "\" x2=\"" << num(p3.px(qx.hi)) << "\" y2=\"" << num(p3.py(mean + sd * qx.hi))
      << "\" stroke=\"#d62728\"/>\n";
    for (std::size_t i = 0; i < n; ++i) {
        o << "<circle cx=\"" << num(p3.px(theo[i])) << "\" cy=\"" << num(p3.py(sorted[i]))
          << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace tsf::plot
