#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <newton/counting.hpp>
#include <newton/fitting.hpp>
#include <newton/montecarlo.hpp>
#include <newton/parser.hpp>
#include <newton/polyhedron.hpp>

using namespace newton;

namespace {

Polynomial P(const std::string& s, int n) { return parse_polynomial(s, n); }

GrowthPrediction padic_prediction(const std::string& s, int n, long p) {
    NewtonPolyhedron poly(P(s, n));
    return predict_growth(poly, FieldSpec::padics(p));
}

std::vector<VolumeEstimate> synthetic_sweep(const std::vector<double>& eps,
                                            double expnt, double logpow) {
    std::vector<VolumeEstimate> rows;
    for (double e : eps) {
        VolumeEstimate v;
        v.eps = e;
        double L = std::log(1.0 / e);
        v.value = std::pow(e, expnt) * std::pow(L, logpow);
        rows.push_back(v);
    }
    return rows;
}

}  // namespace

TEST_CASE("a pure exponential series is recovered exactly") {
    std::vector<double> vals;
    for (int l = 1; l <= 9; ++l) vals.push_back(std::pow(3.0, -5.0 * l / 6.0));
    FitResult r = fit_growth(vals, 3.0, FitModel::pure_exponent);
    REQUIRE(r.slope == Catch::Approx(-5.0 / 6.0).margin(1e-10));
    REQUIRE(r.log_power == 0.0);
    REQUIRE(r.log_power_pinned);
    REQUIRE(r.max_residual < 1e-10);
    REQUIRE(r.levels.front() == 2);
    REQUIRE(r.levels.back() == 9);
}

TEST_CASE("a level-times-exponential series splits into slope and log power") {
    CountSeries s;
    s.p = 2;
    for (int l = 1; l <= 9; ++l) s.values.push_back(Rat(Int(l), Int(1) << unsigned(l)));
    FitResult r = fit_growth(s, FitModel::exponent_with_log);
    REQUIRE(r.slope == Catch::Approx(-1.0).margin(1e-9));
    REQUIRE(r.log_power == Catch::Approx(1.0).margin(1e-9));
    REQUIRE_FALSE(r.log_power_pinned);
    REQUIRE(r.max_residual < 1e-9);
}

TEST_CASE("pins remove the chosen coefficient from the solve") {
    CountSeries s;
    s.p = 2;
    for (int l = 1; l <= 9; ++l) s.values.push_back(Rat(Int(l), Int(1) << unsigned(l)));
    FitOptions opt;
    opt.pin_log_power = 1.0;
    FitResult r = fit_growth(s, FitModel::exponent_with_log, opt);
    REQUIRE(r.log_power == 1.0);
    REQUIRE(r.log_power_pinned);
    REQUIRE_FALSE(r.slope_pinned);
    REQUIRE(r.slope == Catch::Approx(-1.0).margin(1e-9));

    opt = {};
    opt.pin_slope = -1.0;
    FitResult w = fit_growth(s, FitModel::exponent_with_log, opt);
    REQUIRE(w.slope_pinned);
    REQUIRE(w.log_power == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("the cusp's hensel series passes its own prediction") {
    Polynomial f = P("x1^2+x2^3", 2);
    CountSeries s = count_series(f, 3, 10, CountStrategy::hensel);
    GrowthPrediction pred = padic_prediction("x1^2+x2^3", 2, 3);
    REQUIRE(pred.case_tag == 'a');
    REQUIRE(pred.log_hi == 0);

    FitResult r = fit_growth(s, pred);
    REQUIRE(r.model == FitModel::pure_exponent);
    REQUIRE(r.verdict == Verdict::pass);
    REQUIRE(r.slope == Catch::Approx(-0.8209489).margin(1e-4));
    REQUIRE(r.envelope_hi / r.envelope_lo < 2.0);
    REQUIRE(r.levels.front() == 2);
}

TEST_CASE("the crossing staircase passes with a pinned log power") {
    Polynomial f = P("x1*x2", 2);
    GrowthPrediction pred2 = padic_prediction("x1*x2", 2, 2);
    REQUIRE(pred2.log_hi == 1);

    CountSeries s2 = count_series(f, 2, 14, CountStrategy::hensel);
    FitOptions opt;
    opt.l_min = 3;
    FitResult a = fit_growth(s2, pred2, opt);
    REQUIRE(a.verdict == Verdict::pass);
    REQUIRE(a.log_power_pinned);
    REQUIRE(a.log_power == 1.0);
    REQUIRE(a.slope == Catch::Approx(-1.0435).margin(2e-3));

    opt.pin_slope = -1.0;
    FitResult b = fit_growth(s2, pred2, opt);
    REQUIRE(b.verdict == Verdict::pass);
    REQUIRE_FALSE(b.log_power_pinned);
    REQUIRE(b.log_power == Catch::Approx(0.7643).margin(2e-3));

    GrowthPrediction pred5 = padic_prediction("x1*x2", 2, 5);
    CountSeries s5 = count_series(f, 5, 6, CountStrategy::hensel);
    FitResult c = fit_growth(s5, pred5);
    REQUIRE(c.verdict == Verdict::pass);
    REQUIRE(c.slope == Catch::Approx(-1.0446).margin(2e-3));
}

TEST_CASE("a distance wrong by one percent is rejected") {
    Polynomial f = P("x1*x2", 2);
    CountSeries s = count_series(f, 2, 14, CountStrategy::hensel);
    GrowthPrediction pred = padic_prediction("x1*x2", 2, 2);

    GrowthPrediction wrong = pred;
    wrong.d = pred.d + Rat(1, 100);
    wrong.exponent = Rat(1) / wrong.d;

    FitOptions opt;
    opt.l_min = 3;
    REQUIRE(fit_growth(s, pred, opt).verdict == Verdict::pass);
    FitResult r = fit_growth(s, wrong, opt);
    REQUIRE(r.verdict == Verdict::fail);
    REQUIRE(r.note == "slope misses the predicted exponent");
}

TEST_CASE("case-c series land inside the exponent bracket") {
    Polynomial f = P("x1^2-2*x1*x2+x2^2", 2);
    GrowthPrediction pred = padic_prediction("x1^2-2*x1*x2+x2^2", 2, 3);
    REQUIRE(pred.case_tag == 'c');

    CountSeries s = count_series(f, 3, 8, CountStrategy::hensel);
    // (x-y)^2 = 0 mod 3^l forces x = y mod 3^ceil(l/2)
    for (int l = 1; l <= 8; ++l)
        REQUIRE(s.values[l - 1] == Rat(1, detail::int_power(3, (l + 1) / 2)));

    FitResult r = fit_growth(s, pred);
    REQUIRE(r.verdict == Verdict::pass);
    REQUIRE(r.slope == Catch::Approx(-0.5).margin(0.06));
}

TEST_CASE("degenerate series report not-applicable instead of a fit") {
    CountSeries s;
    s.p = 3;
    for (int l = 1; l <= 8; ++l) s.values.push_back(Rat(0));
    FitResult r = fit_growth(s, FitModel::pure_exponent);
    REQUIRE(r.verdict == Verdict::not_applicable);
    REQUIRE(r.levels.empty());

    Polynomial one = P("1", 1);
    CountSeries empty = count_series(one, 3, 5, CountStrategy::brute);
    REQUIRE(fit_growth(empty, FitModel::pure_exponent).verdict ==
            Verdict::not_applicable);
}

TEST_CASE("exact cancellation in sums reports not-applicable") {
    Polynomial f = P("x1", 1);
    ExpSumSeries s = exp_sum_series(f, 3, 4);
    FitResult r = fit_growth(s, FitModel::pure_exponent);
    REQUIRE(r.verdict == Verdict::not_applicable);
    REQUIRE(r.note.find("cancel") != std::string::npos);
}

TEST_CASE("short windows are a precondition violation") {
    std::vector<double> vals{0.5, 0.25, 0.125, 0.0625};  // levels 2..4 usable
    REQUIRE_THROWS_AS(fit_growth(vals, 2.0, FitModel::pure_exponent),
                      std::invalid_argument);
}

TEST_CASE("volume sweeps fit in the same sign convention as counts") {
    std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    auto pure = synthetic_sweep(eps, 0.75, 0.0);
    FitResult r = fit_growth(pure, FitModel::pure_exponent);
    REQUIRE(r.slope == Catch::Approx(-0.75).margin(1e-10));

    auto logged = synthetic_sweep(eps, 1.0, 1.0);
    FitResult w = fit_growth(logged, FitModel::exponent_with_log);
    REQUIRE(w.slope == Catch::Approx(-1.0).margin(1e-9));
    REQUIRE(w.log_power == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("a synthetic volume sweep passes its matching prediction") {
    NewtonPolyhedron poly(P("x1^2+x2^3", 2));
    GrowthPrediction pred = predict_growth(poly, FieldSpec::reals());
    REQUIRE(rat_str(pred.exponent) == "5/6");

    std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    auto rows = synthetic_sweep(eps, 5.0 / 6.0, 0.0);
    FitResult r = fit_growth(rows, pred);
    REQUIRE(r.verdict == Verdict::pass);
    REQUIRE(r.slope == Catch::Approx(-5.0 / 6.0).margin(1e-9));
    REQUIRE(r.envelope_hi == Catch::Approx(r.envelope_lo).epsilon(1e-6));

    auto off = synthetic_sweep(eps, 0.95, 0.0);
    REQUIRE(fit_growth(off, pred).verdict == Verdict::fail);
}
