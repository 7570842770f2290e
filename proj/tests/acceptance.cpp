// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. TSF_SEER_CSV may point at an alternative rate file.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tsf/arima.hpp"
#include "tsf/csv.hpp"
#include "tsf/diagnostics.hpp"
#include "tsf/ensemble.hpp"
#include "tsf/exp_smoothing.hpp"
#include "tsf/pipeline.hpp"

namespace fs = std::filesystem;
namespace oracle = tsf::oracle;

namespace {

// Collects sub-check outcomes for one criterion.
class Criterion {
public:
    void check(bool ok, const std::string& what) {
        if (!ok) {
            failed_.push_back(what);
        }
        notes_.push_back((ok ? "" : "!") + what);
    }
    [[nodiscard]] bool ok() const { return failed_.empty(); }
    [[nodiscard]] std::string summary() const {
        std::string s;
        for (std::size_t i = 0; i < notes_.size(); ++i) {
            s += (i ? "; " : "") + notes_[i];
        }
        return s;
    }

private:
    std::vector<std::string> failed_;
    std::vector<std::string> notes_;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

bool within(double v, double centre, double tol) { return std::abs(v - centre) <= tol; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& title, const Criterion& c) {
    std::printf("%s  %d. %s: %s\n", c.ok() ? "PASS" : "FAIL", id, title.c_str(),
                c.summary().c_str());
    std::fflush(stdout);
    failures += c.ok() ? 0 : 1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

tsf::RunConfig study_config() {
    tsf::RunConfig c;
    c.input_path = oracle::seer_csv_path();
    c.train_end_year = 2012;
    c.horizon = 9;
    return c;
}

// ---------------------------------------------------------------------------

void criterion_table(const tsf::TimeSeries& series) {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = tsf::run_analysis(series, study_config());
    const double secs = seconds_since(t0);
    const auto& ev = r.evaluation;
    c.check(ev.differencing && ev.differencing->d == 2,
            "d = " + (ev.differencing ? std::to_string(ev.differencing->d) : std::string("?")));
    c.check(ev.arima && ev.arima->order == tsf::ArimaOrder{0, 2, 2},
            "order " + (ev.arima ? ev.arima->order.to_string() : std::string("?")));
    if (const auto* a = ev.report.find("ARIMA")) {
        c.check(within(a->rmse, 2.56, 0.30), "ARIMA RMSE " + fmt("%.3f", a->rmse));
        c.check(within(a->mae, 2.16, 0.30), "ARIMA MAE " + fmt("%.3f", a->mae));
        c.check(within(a->mape_percent, 6.29, 0.75), "ARIMA MAPE " + fmt("%.2f", a->mape_percent));
    } else {
        c.check(false, "ARIMA row missing");
    }
    if (const auto* h = ev.report.find("HDES"); h && ev.hdes) {
        c.check(within(h->rmse, 2.56, 0.30), "HDES RMSE " + fmt("%.3f", h->rmse));
        c.check(within(ev.hdes->alpha, 0.52, 0.08), "HDES alpha " + fmt("%.4f", ev.hdes->alpha));
        c.check(within(ev.hdes->beta, 0.52, 0.08), "HDES beta " + fmt("%.4f", ev.hdes->beta));
    } else {
        c.check(false, "HDES row missing");
    }
    if (const auto* s = ev.report.find("SES"); s && ev.ses) {
        c.check(within(s->rmse, 8.90, 1.00), "SES RMSE " + fmt("%.3f", s->rmse));
        c.check(ev.ses->alpha >= 0.98, "SES alpha " + fmt("%.4f", ev.ses->alpha));
    } else {
        c.check(false, "SES row missing");
    }
    if (const auto* e = ev.report.find("HDES-ARIMA")) {
        c.check(within(e->rmse, 2.56, 0.30), "HDES-ARIMA RMSE " + fmt("%.3f", e->rmse));
    } else {
        c.check(false, "HDES-ARIMA row missing");
    }
    c.check(secs < 10.0, "runtime " + fmt("%.2f s", secs));
    report(1, "Table 2 reproduction", c);
}

void criterion_residuals(const tsf::TimeSeries& series) {
    Criterion c;
    const auto [train, test] = tsf::split_at(series, 2012);
    const auto arima = tsf::arima_fit(train, {0, 2, 2});
    const auto ad = tsf::diagnose_residuals("ARIMA", arima.residuals, 2, true);
    const auto ses = tsf::ses_fit(train);
    const auto sd = tsf::diagnose_residuals(
        "SES", std::span<const double>(ses.residuals).subspan(tsf::kSesLeadingZeros), 0, false);
    const auto hdes = tsf::hdes_fit(train);
    const auto hd = tsf::diagnose_residuals(
        "HDES", std::span<const double>(hdes.residuals).subspan(tsf::kHdesLeadingZeros), 0, false);

    auto p = [](const std::optional<tsf::TestResult>& t) { return t ? t->p_value : -1.0; };
    c.check(ad.ljung_box && !ad.ljung_box->reject_at_005,
            "ARIMA(0,2,2) Ljung-Box p " + fmt("%.4f", p(ad.ljung_box)));
    c.check(ad.shapiro_wilk && !ad.shapiro_wilk->reject_at_005,
            "ARIMA(0,2,2) Shapiro-Wilk p " + fmt("%.4f", p(ad.shapiro_wilk)));
    c.check(ad.kpss && ad.kpss->bound == tsf::PValueBound::AtLeast,
            "ARIMA(0,2,2) KPSS p " + (ad.kpss ? ad.kpss->p_value_text() : std::string("n/a")));
    c.check(hd.ljung_box && !hd.ljung_box->reject_at_005,
            "HDES Ljung-Box p " + fmt("%.4f", p(hd.ljung_box)));
    c.check(hd.shapiro_wilk && !hd.shapiro_wilk->reject_at_005,
            "HDES Shapiro-Wilk p " + fmt("%.4f", p(hd.shapiro_wilk)));
    c.check(sd.ljung_box && sd.ljung_box->reject_at_005,
            "SES Ljung-Box p " + fmt("%.2e", p(sd.ljung_box)));
    c.check(sd.shapiro_wilk && !sd.shapiro_wilk->reject_at_005,
            "SES Shapiro-Wilk p " + fmt("%.4f", p(sd.shapiro_wilk)));
    report(2, "Residual-test decisions", c);
}

void criterion_direction(const tsf::TimeSeries& series) {
    Criterion c;
    const auto r = tsf::run_analysis(series, study_config());
    const tsf::Forecast* f = nullptr;
    for (const auto& fc : r.final_forecasts) {
        if (fc.source.find('+') != std::string::npos) {
            f = &fc;
        }
    }
    if (f == nullptr) {
        c.check(false, "no HDES-ARIMA forecast");
    } else {
        c.check(f->first_year == 2022 && f->last_year() == 2030,
                "span " + std::to_string(f->first_year) + "-" + std::to_string(f->last_year()));
        bool decreasing = true;
        bool positive = true;
        for (std::size_t h = 0; h < f->values.size(); ++h) {
            positive = positive && f->values[h] > 0.0;
            if (h > 0) {
                decreasing = decreasing && f->values[h] < f->values[h - 1];
            }
        }
        c.check(decreasing, "strictly decreasing " + fmt("%.2f", f->values.front()) + " -> " +
                                fmt("%.2f", f->values.back()));
        c.check(positive, "positive");
    }
    report(3, "Forecast direction", c);
}

void criterion_likelihood_oracle() {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240101);
    std::uniform_real_distribution<double> ma(-0.95, 0.95);
    std::uniform_real_distribution<double> var(0.2, 4.0);
    std::uniform_int_distribution<int> len(5, 20);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t p = static_cast<std::size_t>(trial % 3);
        const std::size_t q = static_cast<std::size_t>((trial / 3) % 3);
        const auto phi = oracle::draw_stationary_ar(p, rng);
        std::vector<double> theta(q);
        for (auto& t : theta) {
            t = ma(rng);
        }
        const double s2 = var(rng);
        const auto w = oracle::simulate_arma(phi, theta, static_cast<std::size_t>(len(rng)), rng);
        worst = std::max(worst, std::abs(tsf::arima_loglik(w, phi, theta, s2) -
                                         oracle::dense_arma_loglik(w, phi, theta, s2)));
    }
    const double secs = seconds_since(t0);
    c.check(worst <= 1e-8, "200 cases, max |diff| " + fmt("%.2e", worst));
    c.check(secs < 5.0, "runtime " + fmt("%.2f s", secs));
    report(4, "Likelihood oracle", c);
}

void criterion_recovery() {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(7001);
    const auto y = oracle::integrate_n(oracle::simulate_arma({}, {-0.5, -0.3}, 2000, rng), 2);
    const auto fit = tsf::arima_fit(tsf::TimeSeries(1, y), {0, 2, 2});
    c.check(within(fit.ma_coeffs[0], -0.5, 0.05) && within(fit.ma_coeffs[1], -0.3, 0.05),
            "theta " + fmt("%.4f", fit.ma_coeffs[0]) + ", " + fmt("%.4f", fit.ma_coeffs[1]));

    const tsf::TimeSeries ar(1, oracle::simulate_arma({0.8}, {}, 1000, rng));
    const auto search = tsf::arima_order_search(ar, 0, 3, 3);
    c.check(search.best.order == tsf::ArimaOrder{1, 0, 0},
            "AR(1) search picks " + search.best.order.to_string());
    const double secs = seconds_since(t0);
    c.check(secs < 60.0, "runtime " + fmt("%.2f s", secs));
    report(5, "Parameter recovery", c);
}

void criterion_fixed_points() {
    Criterion c;
    std::vector<double> line(30);
    for (std::size_t t = 0; t < line.size(); ++t) {
        line[t] = 3.0 + 2.0 * static_cast<double>(t + 1);
    }
    const auto [ltrain, ltest] = tsf::split_at(tsf::TimeSeries(1990, line), 2012);
    tsf::EvaluationOptions hdes_only;
    hdes_only.models = {false, false, true, false};
    const auto ev = tsf::evaluate_models(ltrain, ltest, hdes_only);
    const auto* h = ev.report.find("HDES");
    c.check(h && h->rmse <= 1e-9 && h->mae <= 1e-9 && h->mape_percent <= 1e-9,
            "HDES linear holdout RMSE " + fmt("%.1e", h ? h->rmse : -1.0));

    const tsf::TimeSeries flat(2000, {5, 5, 5, 5, 5});
    const auto sf = tsf::ses_forecast(tsf::ses_fit(flat), 5);
    bool constant = true;
    for (double v : sf.values) {
        constant = constant && v == 5.0;
    }
    c.check(constant, "SES constant forecast");

    const auto ses = tsf::ses_evaluate(tsf::TimeSeries(2000, {1, 2, 3}), 0.5);
    c.check(std::abs(ses.sse - 3.25) <= 1e-12 && std::abs(ses.residuals[1] - 1.0) <= 1e-12 &&
                std::abs(ses.residuals[2] - 1.5) <= 1e-12,
            "SES trace SSE " + fmt("%.15g", ses.sse));
    const auto hd = tsf::hdes_evaluate(tsf::TimeSeries(2000, {1, 2, 4}), 0.5, 0.5);
    c.check(std::abs(hd.residuals[1]) <= 1e-12 && std::abs(hd.residuals[2] - 1.0) <= 1e-12,
            "HDES trace residuals " + fmt("%.15g", hd.residuals[1]) + ", " +
                fmt("%.15g", hd.residuals[2]));
    report(6, "Smoothing fixed points", c);
}

void criterion_calibration() {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    constexpr std::size_t kReps = 10000;
    for (const std::size_t n : {20U, 38U, 100U}) {
        const auto gen = [n](std::mt19937_64& rng) { return oracle::normal_sample(n, rng); };
        const std::size_t lags = tsf::default_ljung_box_lags(n);
        const double lb = tsf::rejection_rate(
            gen, [lags](std::span<const double> x) { return tsf::ljung_box(x, lags, 0).reject_at_005; },
            kReps, 1000 + n);
        const double sw = tsf::rejection_rate(
            gen, [](std::span<const double> x) { return tsf::shapiro_wilk(x).reject_at_005; }, kReps,
            2000 + n);
        c.check(lb >= 0.03 && lb <= 0.07, "LB n=" + std::to_string(n) + " " + fmt("%.4f", lb));
        c.check(sw >= 0.03 && sw <= 0.07, "SW n=" + std::to_string(n) + " " + fmt("%.4f", sw));
    }

    constexpr std::size_t kDirReps = 500;
    const auto walk200 = [](std::mt19937_64& rng) { return oracle::random_walk(200, rng); };
    const auto noise200 = [](std::mt19937_64& rng) { return oracle::normal_sample(200, rng); };
    const auto walk500 = [](std::mt19937_64& rng) { return oracle::random_walk(500, rng); };
    const auto noise500 = [](std::mt19937_64& rng) { return oracle::normal_sample(500, rng); };
    const auto adf_rejects = [](std::span<const double> x) { return tsf::adf_test(x).reject_at_005; };
    const double adf_walk = 1.0 - tsf::rejection_rate(walk200, adf_rejects, kDirReps, 3001);
    const double adf_noise = tsf::rejection_rate(noise200, adf_rejects, kDirReps, 3002);
    const double kpss_noise = tsf::rejection_rate(
        noise500,
        [](std::span<const double> x) { return tsf::kpss_test(x).bound == tsf::PValueBound::AtLeast; },
        kDirReps, 3003);
    const double kpss_walk = tsf::rejection_rate(
        walk500,
        [](std::span<const double> x) { return tsf::kpss_test(x).bound == tsf::PValueBound::AtMost; },
        kDirReps, 3004);
    c.check(adf_walk >= 0.90, "ADF keeps unit root " + fmt("%.3f", adf_walk));
    c.check(adf_noise >= 0.90, "ADF rejects on noise " + fmt("%.3f", adf_noise));
    c.check(kpss_noise >= 0.90, "KPSS >=0.10 on noise " + fmt("%.3f", kpss_noise));
    c.check(kpss_walk >= 0.90, "KPSS <=0.01 on walks " + fmt("%.3f", kpss_walk));
    const double secs = seconds_since(t0);
    c.check(secs < 120.0, "runtime " + fmt("%.1f s", secs));
    report(7, "Test calibration", c);
}

void criterion_determinism(const tsf::TimeSeries& series) {
    Criterion c;
    const auto root = fs::temp_directory_path() / "tsf_acceptance";
    fs::remove_all(root);
    const int max_threads = omp_get_max_threads();
    std::vector<int> counts = {1, 2, std::max(3, max_threads)};
    std::vector<fs::path> dirs;
    int run = 0;
    bool all_ok = true;
    for (const int threads : counts) {
        for (int rep = 0; rep < 2; ++rep) {
            omp_set_num_threads(threads);
            auto cfg = study_config();
            cfg.emit_plots = true;
            cfg.output_dir = root / ("run" + std::to_string(run++));
            all_ok = all_ok && tsf::run_pipeline(cfg).exit_code == tsf::kExitOk;
            dirs.push_back(cfg.output_dir);
        }
    }
    c.check(all_ok, "every pipeline run exited 0");
    omp_set_num_threads(max_threads);
    std::size_t files = 0;
    bool identical = true;
    for (const auto& entry : fs::directory_iterator(dirs.front())) {
        ++files;
        const auto ref = slurp(entry.path());
        for (std::size_t i = 1; i < dirs.size(); ++i) {
            identical = identical && slurp(dirs[i] / entry.path().filename()) == ref;
        }
    }
    c.check(identical && files >= 6, std::to_string(files) + " files identical across " +
                                         std::to_string(dirs.size()) + " runs and thread counts {1,2," +
                                         std::to_string(counts.back()) + "}");

    std::vector<double> v(series.values().begin(), series.values().end());
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> scale(0.5, 1.5);
    for (std::size_t i = 38; i < v.size(); ++i) {
        v[i] *= scale(rng);
    }
    const auto a = tsf::run_analysis(series, study_config()).evaluation;
    const auto b = tsf::run_analysis(tsf::TimeSeries(series.start_year(), v), study_config()).evaluation;
    const bool same = a.arima && b.arima && a.arima->order == b.arima->order &&
                      a.arima->ar_coeffs == b.arima->ar_coeffs &&
                      a.arima->ma_coeffs == b.arima->ma_coeffs && a.arima->sigma2 == b.arima->sigma2 &&
                      a.ses && b.ses && a.ses->alpha == b.ses->alpha && a.hdes && b.hdes &&
                      a.hdes->alpha == b.hdes->alpha && a.hdes->beta == b.hdes->beta;
    c.check(same, "fitted parameters unchanged after perturbing 2013-2021");
    fs::remove_all(root);
    report(8, "Determinism and isolation", c);
}

}  // namespace

int main() {
    const auto path = oracle::seer_csv_path();
    std::printf("rate file: %s\n", path.c_str());
    std::optional<tsf::TimeSeries> series;
    try {
        series = tsf::load_csv(path);
    } catch (const std::exception& e) {
        std::printf("cannot load rate file: %s\n", e.what());
    }
    auto guarded = [](int id, const std::string& title, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            Criterion c;
            c.check(false, std::string("exception: ") + e.what());
            report(id, title, c);
        }
    };
    const auto need_series = [&](int id, const std::string& title, auto&& fn) {
        guarded(id, title, [&] {
            if (!series) {
                throw std::runtime_error("rate file unavailable");
            }
            fn(*series);
        });
    };
    need_series(1, "Table 2 reproduction", criterion_table);
    need_series(2, "Residual-test decisions", criterion_residuals);
    need_series(3, "Forecast direction", criterion_direction);
    guarded(4, "Likelihood oracle", criterion_likelihood_oracle);
    guarded(5, "Parameter recovery", criterion_recovery);
    guarded(6, "Smoothing fixed points", criterion_fixed_points);
    guarded(7, "Test calibration", criterion_calibration);
    need_series(8, "Determinism and isolation", criterion_determinism);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
