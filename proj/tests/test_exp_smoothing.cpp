#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "tsf/exp_smoothing.hpp"
#include "tsf/kernels.hpp"

using tsf::TimeSeries;

namespace {

std::vector<double> grid(double lo, double step, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = lo + step * static_cast<double>(i);
    }
    return g;
}

TimeSeries noisy_trend(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.5);
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) {
        v[t] = 60.0 - 0.8 * static_cast<double>(t) + z(rng);
    }
    return TimeSeries(1980, v);
}

}  // namespace

TEST_CASE("ses hand trace") {
    const auto fit = tsf::ses_evaluate(TimeSeries(2000, {1, 2, 3}), 0.5);
    REQUIRE(fit.residuals.size() == 3);
    CHECK(fit.residuals[0] == 0.0);
    CHECK(std::abs(fit.residuals[1] - 1.0) <= 1e-12);
    CHECK(std::abs(fit.residuals[2] - 1.5) <= 1e-12);
    CHECK(std::abs(fit.sse - 3.25) <= 1e-12);
    CHECK(std::abs(fit.final_level - 2.25) <= 1e-12);
}

TEST_CASE("hdes hand trace") {
    const auto fit = tsf::hdes_evaluate(TimeSeries(2000, {1, 2, 4}), 0.5, 0.5);
    REQUIRE(fit.residuals.size() == 3);
    CHECK(fit.residuals[0] == 0.0);
    CHECK(std::abs(fit.residuals[1]) <= 1e-12);
    CHECK(std::abs(fit.residuals[2] - 1.0) <= 1e-12);
    CHECK(std::abs(fit.fitted[2] - 3.0) <= 1e-12);
}

TEST_CASE("ses on a constant series") {
    const TimeSeries flat(2000, {5, 5, 5, 5, 5});
    const auto fit = tsf::ses_fit(flat);
    CHECK(fit.sse == 0.0);
    CHECK(fit.alpha == doctest::Approx(0.001));
    const auto fc = tsf::ses_forecast(fit, 5);
    CHECK(fc.first_year == 2005);
    CHECK(fc.source == "SES");
    for (double v : fc.values) {
        CHECK(v == 5.0);
    }
}

TEST_CASE("ses forecast is flat") {
    tsf::SesFit fit;
    fit.final_level = 31.7;
    fit.train_end_year = 2012;
    const auto f3 = tsf::ses_forecast(fit, 3);
    CHECK(f3.values == std::vector<double>{31.7, 31.7, 31.7});
    CHECK(tsf::ses_forecast(fit, 1).values[0] == tsf::ses_forecast(fit, 9).values[0]);
    CHECK_THROWS_AS((void)tsf::ses_forecast(fit, 0), std::invalid_argument);
}

TEST_CASE("hdes forecast is affine") {
    tsf::HdesFit fit;
    fit.final_level = 30.0;
    fit.final_trend = -1.2;
    fit.train_end_year = 2021;
    const auto f = tsf::hdes_forecast(fit, 3);
    CHECK(f.first_year == 2022);
    CHECK(f.values[0] == doctest::Approx(28.8));
    CHECK(f.values[1] == doctest::Approx(27.6));
    CHECK(f.values[2] == doctest::Approx(26.4));
    fit.final_trend = 0.0;
    for (double v : tsf::hdes_forecast(fit, 4).values) {
        CHECK(v == 30.0);
    }
}

TEST_CASE("hdes on an exactly linear series") {
    std::vector<double> v(20);
    for (std::size_t t = 0; t < v.size(); ++t) {
        v[t] = 3.0 + 2.0 * static_cast<double>(t + 1);
    }
    const TimeSeries line(1990, v);
    for (double a = 0.01; a < 1.0; a += 0.07) {
        for (double b = 0.01; b < 1.0; b += 0.07) {
            const auto e = tsf::hdes_evaluate(line, a, b);
            for (double r : e.residuals) {
                CHECK(std::abs(r) <= 1e-9);
            }
        }
    }
    const auto fit = tsf::hdes_fit(line);
    CHECK(fit.sse <= 1e-18);
    const auto f = tsf::hdes_forecast(fit, 4);
    for (std::size_t h = 0; h < 4; ++h) {
        CHECK(f.values[h] == doctest::Approx(3.0 + 2.0 * static_cast<double>(21 + h)).epsilon(1e-12));
    }
}

TEST_CASE("length preconditions") {
    CHECK_THROWS_AS((void)tsf::ses_fit(TimeSeries(2000, {1, 2})), tsf::LengthError);
    CHECK_THROWS_AS((void)tsf::hdes_fit(TimeSeries(2000, {1, 2, 3})), tsf::LengthError);
}

TEST_CASE("fits never lose to the grid") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = noisy_trend(38, seed);
        const auto ses = tsf::ses_fit(s);
        const auto sg = tsf::kernels::ses_grid_sse_serial(s.values(), grid(0.001, 0.001, 999));
        CHECK(ses.sse <= *std::min_element(sg.begin(), sg.end()));
        CHECK(ses.alpha > 0.0);
        CHECK(ses.alpha < 1.0);
        CHECK(ses.residuals.size() == s.size());

        const auto hdes = tsf::hdes_fit(s);
        const auto hg = tsf::kernels::hdes_grid_sse_serial(s.values(), grid(0.01, 0.01, 99));
        CHECK(hdes.sse <= *std::min_element(hg.begin(), hg.end()));
        CHECK(hdes.alpha > 0.0);
        CHECK(hdes.alpha < 1.0);
        CHECK(hdes.beta > 0.0);
        CHECK(hdes.beta < 1.0);
        CHECK(hdes.residuals.size() == s.size());
    }
}

TEST_CASE("ses with alpha near one tracks the last observation") {
    const auto s = noisy_trend(38, 7);
    const auto fit = tsf::ses_evaluate(s, 0.999);
    double max_abs = 0.0;
    for (double v : s.values()) {
        max_abs = std::max(max_abs, std::abs(v));
    }
    CHECK(std::abs(fit.final_level - s.values().back()) <=
          (1.0 - 0.999) * max_abs * static_cast<double>(s.size()));
}

TEST_CASE("serial and parallel grid kernels agree exactly") {
    const auto s = noisy_trend(47, 3);
    const auto g1 = grid(0.001, 0.001, 999);
    CHECK(tsf::kernels::ses_grid_sse(s.values(), g1) ==
          tsf::kernels::ses_grid_sse_serial(s.values(), g1));
    const auto g2 = grid(0.01, 0.01, 99);
    CHECK(tsf::kernels::hdes_grid_sse(s.values(), g2) ==
          tsf::kernels::hdes_grid_sse_serial(s.values(), g2));
}

TEST_CASE("grid selection does not depend on evaluation order") {
    const auto s = noisy_trend(38, 4);
    const auto g = grid(0.01, 0.01, 99);
    const auto reference = tsf::kernels::hdes_grid_sse_serial(s.values(), g);
    std::vector<std::size_t> order(reference.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(5);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> shuffled(reference.size());
    for (std::size_t idx : order) {
        shuffled[idx] = tsf::kernels::hdes_sse(s.values(), g[idx / g.size()], g[idx % g.size()]);
    }
    CHECK(tsf::kernels::first_argmin(shuffled) == tsf::kernels::first_argmin(reference));

    const std::vector<double> ties = {3.0, 1.0, 2.0, 1.0};
    CHECK(tsf::kernels::first_argmin(ties) == 1);
}

TEST_CASE("fits are deterministic") {
    const auto s = noisy_trend(38, 9);
    const auto a = tsf::hdes_fit(s);
    const auto b = tsf::hdes_fit(s);
    CHECK(a.alpha == b.alpha);
    CHECK(a.beta == b.beta);
    CHECK(a.sse == b.sse);
}
