#include "tsf/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tsf::opt {

ScalarMinimum golden_section(const std::function<double(double)>& f, double lo, double hi,
                             double tol, std::size_t max_iter) {
    if (!(lo <= hi)) {
        throw std::invalid_argument("golden_section: empty interval");
    }
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (std::size_t it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // Endpoints are candidates too: the minimum may sit on the boundary.
    ScalarMinimum best{c, fc};
    for (double x : {d, lo, hi}) {
        const double v = (x == d) ? fd : f(x);
        if (v < best.value) {
            best = {x, v};
        }
    }
    return best;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> start, const NelderMeadOptions& opts) {
    const std::size_t n = start.size();
    if (n == 0) {
        return {start, f(start), 0, true};
    }
    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += opts.step;
    }
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        vals[i] = f(pts[i]);
    }
    std::vector<std::size_t> order(n + 1);

    auto affine = [n](const std::vector<double>& a, const std::vector<double>& b, double t) {
        // a + t (b - a)
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = a[i] + t * (b[i] - a[i]);
        }
        return r;
    };

    std::size_t it = 0;
    bool converged = false;
    for (; it < opts.max_iter; ++it) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t i, std::size_t j) { return vals[i] < vals[j]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];
        const double spread = std::abs(vals[worst] - vals[best]);
        if (spread <= opts.rel_tol * (std::abs(vals[best]) + opts.abs_tol)) {
            converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& p = pts[order[k]];
            for (std::size_t i = 0; i < n; ++i) {
                centroid[i] += p[i] / static_cast<double>(n);
            }
        }
        auto reflected = affine(centroid, pts[worst], -1.0);
        const double fr = f(reflected);
        if (fr < vals[best]) {
            auto expanded = affine(centroid, pts[worst], -2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                pts[worst] = std::move(expanded);
                vals[worst] = fe;
            } else {
                pts[worst] = std::move(reflected);
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = std::move(reflected);
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        auto contracted = outside ? affine(centroid, reflected, 0.5)
                                  : affine(centroid, pts[worst], 0.5);
        const double fc = f(contracted);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = std::move(contracted);
            vals[worst] = fc;
            continue;
        }
        for (std::size_t k = 1; k <= n; ++k) {
            auto& p = pts[order[k]];
            p = affine(pts[best], p, 0.5);
            vals[order[k]] = f(p);
        }
    }
    const auto best = static_cast<std::size_t>(
        std::min_element(vals.begin(), vals.end()) - vals.begin());
    return {pts[best], vals[best], it, converged};
}

}  // namespace tsf::opt
