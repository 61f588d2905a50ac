#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "newton/counting.hpp"
#include "newton/growth.hpp"
#include "newton/montecarlo.hpp"

namespace newton {

/// pure_exponent: log_p N_l = c + s l. exponent_with_log adds w log_p l,
/// with either coefficient optionally pinned; over short windows l and
/// log l are nearly collinear, so pinning one and fitting the other is the
/// stable way to read off both.
enum class FitModel { pure_exponent, exponent_with_log };

enum class Verdict { none, pass, fail, not_applicable };

struct FitOptions {
    int l_min = 2;
    std::optional<double> pin_slope;
    std::optional<double> pin_log_power;
    double tol_slope = 0.05;
    double tol_log_power = 0.3;
    double envelope_span = 10.0;
};

struct FitResult {
    FitModel model = FitModel::pure_exponent;
    double slope = 0;
    double log_power = 0;
    double intercept = 0;
    bool slope_pinned = false;
    bool log_power_pinned = false;
    std::vector<int> levels;
    std::vector<double> residuals;
    double max_residual = 0;
    double envelope_lo = 0;  // extremes of value / predicted shape, verdict fits only
    double envelope_hi = 0;
    Verdict verdict = Verdict::none;
    std::string note;
};

namespace detail {

/// Least squares for y = c + s u + w v with optional pins on s and w.
/// Solves the normal equations of whatever stays free.
inline void fit_plane(const std::vector<double>& u, const std::vector<double>& v,
                      const std::vector<double>& y, std::optional<double> pin_s,
                      std::optional<double> pin_w, bool use_v, FitResult& r) {
    std::size_t m = y.size();
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        rhs[i] = y[i];
        if (pin_s) rhs[i] -= *pin_s * u[i];
        if (use_v && pin_w) rhs[i] -= *pin_w * v[i];
    }
    std::vector<const std::vector<double>*> basis;
    std::vector<double> ones(m, 1.0);
    basis.push_back(&ones);
    if (!pin_s) basis.push_back(&u);
    if (use_v && !pin_w) basis.push_back(&v);

    std::size_t k = basis.size();
    std::vector<std::vector<double>> A(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t r1 = 0; r1 < k; ++r1) {
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t i = 0; i < m; ++i)
                A[r1][c] += (*basis[r1])[i] * (*basis[c])[i];
        for (std::size_t i = 0; i < m; ++i) A[r1][k] += (*basis[r1])[i] * rhs[i];
    }
    for (std::size_t p = 0; p < k; ++p) {
        std::size_t best = p;
        for (std::size_t r1 = p + 1; r1 < k; ++r1)
            if (std::fabs(A[r1][p]) > std::fabs(A[best][p])) best = r1;
        std::swap(A[p], A[best]);
        if (A[p][p] == 0) throw std::runtime_error("singular fit system");
        for (std::size_t r1 = 0; r1 < k; ++r1) {
            if (r1 == p) continue;
            double f = A[r1][p] / A[p][p];
            for (std::size_t c = p; c <= k; ++c) A[r1][c] -= f * A[p][c];
        }
    }
    std::vector<double> coef(k);
    for (std::size_t p = 0; p < k; ++p) coef[p] = A[p][k] / A[p][p];

    std::size_t pos = 0;
    r.intercept = coef[pos++];
    r.slope = pin_s ? *pin_s : coef[pos++];
    r.slope_pinned = pin_s.has_value();
    if (use_v) {
        r.log_power = pin_w ? *pin_w : coef[pos++];
        r.log_power_pinned = pin_w.has_value();
    } else {
        r.log_power = 0;
        r.log_power_pinned = true;
    }
    r.residuals.resize(m);
    r.max_residual = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double model = r.intercept + r.slope * u[i] + (use_v ? r.log_power * v[i] : 0.0);
        r.residuals[i] = y[i] - model;
        r.max_residual = std::max(r.max_residual, std::fabs(r.residuals[i]));
    }
}

inline FitResult fit_levels(const std::vector<double>& vals, double p, FitModel model,
                            const FitOptions& opt) {
    FitResult r;
    r.model = model;
    double lp = std::log(p);
    std::vector<double> u, v, y;
    bool any_positive = false;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        int l = static_cast<int>(i) + 1;
        if (vals[i] > 0) any_positive = true;
        if (l < opt.l_min || vals[i] <= 0) continue;
        r.levels.push_back(l);
        u.push_back(static_cast<double>(l));
        v.push_back(std::log(static_cast<double>(l)) / lp);
        y.push_back(std::log(vals[i]) / lp);
    }
    if (!any_positive) {
        r.verdict = Verdict::not_applicable;
        r.note = "series is identically zero; no decay rate to fit";
        return r;
    }
    if (y.size() < 4)
        throw std::invalid_argument("need at least 4 usable levels beyond l_min");
    fit_plane(u, v, y, opt.pin_slope, opt.pin_log_power,
              model == FitModel::exponent_with_log, r);
    return r;
}

}  // namespace detail

/// values[i] is the level-(i+1) sample of a p^(sl) l^w shape.
inline FitResult fit_growth(const std::vector<double>& values, double p, FitModel model,
                            const FitOptions& opt = {}) {
    return detail::fit_levels(values, p, model, opt);
}

inline FitResult fit_growth(const CountSeries& series, FitModel model,
                            const FitOptions& opt = {}) {
    std::vector<double> vals;
    for (const Rat& v : series.values) vals.push_back(to_double(v));
    return detail::fit_levels(vals, static_cast<double>(series.p), model, opt);
}

inline FitResult fit_growth(const ExpSumSeries& series, FitModel model,
                            const FitOptions& opt = {}) {
    std::vector<double> vals;
    for (const auto& v : series.values) {
        double a = std::abs(v);
        vals.push_back(a < 1e-13 ? 0.0 : a);  // exact cancellation lands at rounding scale
    }
    FitResult r = detail::fit_levels(vals, static_cast<double>(series.p), model, opt);
    if (r.verdict == Verdict::not_applicable)
        r.note = "sums cancel exactly at every level; no decay rate to fit";
    return r;
}

/// Volume sweeps fit against log(1/eps) instead of the level index:
/// log vol = c + s log(1/eps) + w log log(1/eps). A decaying volume gives
/// s < 0 and the predicted value is -exponent, the same sign convention as
/// the count fits.
inline FitResult fit_growth(const std::vector<VolumeEstimate>& sweep, FitModel model,
                            const FitOptions& opt = {}) {
    FitResult r;
    r.model = model;
    std::vector<double> u, v, y;
    bool any_positive = false;
    for (const auto& row : sweep) {
        if (row.value > 0) any_positive = true;
        if (row.value <= 0 || !(row.eps > 0) || row.eps >= 1) continue;
        double L = std::log(1.0 / row.eps);
        u.push_back(L);
        v.push_back(std::log(L));
        y.push_back(std::log(row.value));
    }
    if (!any_positive) {
        r.verdict = Verdict::not_applicable;
        r.note = "no sampled mass at any threshold; nothing to fit";
        return r;
    }
    if (y.size() < 4)
        throw std::invalid_argument("need at least 4 usable thresholds below 1");
    detail::fit_plane(u, v, y, opt.pin_slope, opt.pin_log_power,
                      model == FitModel::exponent_with_log, r);
    r.note = "abscissa is log(1/eps); levels field unused";
    return r;
}

/// Fit plus verdict against a prediction. The decay side is checked on the
/// slope: cases a and b pin it at -exponent within tol; case c only brackets
/// it between the two exponents. The log power is checked when the fit
/// produced a free one; a pinned log power is consistent by construction.
/// Case-a fits also require the envelope value/(p^{sl} l^w) to stay within
/// the configured span across the used levels.
inline FitResult fit_growth(const CountSeries& series, const GrowthPrediction& pred,
                            FitOptions opt = {}) {
    int n_minus_k_1 = pred.log_hi;
    FitModel model = FitModel::exponent_with_log;
    // no log power is predicted in the bracket case, so fit the bare slope
    if (pred.case_tag == 'c' || (pred.case_tag == 'a' && n_minus_k_1 == 0))
        model = FitModel::pure_exponent;
    if (pred.case_tag == 'a' && model == FitModel::exponent_with_log && !opt.pin_slope &&
        !opt.pin_log_power)
        opt.pin_log_power = static_cast<double>(n_minus_k_1);

    FitResult r = fit_growth(series, model, opt);
    if (r.verdict == Verdict::not_applicable) return r;

    double want_slope = -to_double(pred.exponent);
    bool ok = true;
    std::string why;
    if (pred.case_tag == 'c') {
        double hi = -to_double(pred.exponent);        // slow side, bK/s
        double lo = -to_double(pred.lower_exponent);  // fast side, bK/d
        if (r.slope < lo - opt.tol_slope || r.slope > hi + opt.tol_slope) {
            ok = false;
            why = "slope outside the case-c bracket";
        }
    } else if (std::fabs(r.slope - want_slope) > opt.tol_slope) {
        ok = false;
        why = "slope misses the predicted exponent";
    }
    if (ok && !r.log_power_pinned) {
        double wlo = static_cast<double>(pred.log_lo) - opt.tol_log_power;
        double whi = static_cast<double>(pred.log_hi) + opt.tol_log_power;
        if (pred.case_tag != 'c' && (r.log_power < wlo || r.log_power > whi)) {
            ok = false;
            why = "log power outside the predicted bracket";
        }
    }
    if (pred.case_tag == 'a') {
        double lp = std::log(static_cast<double>(series.p));
        double w = static_cast<double>(n_minus_k_1);
        double lo = 0, hi = 0;
        bool first = true;
        for (int l : r.levels) {
            double nl = to_double(series.values[l - 1]);
            double shape = std::exp(want_slope * l * lp) * std::pow(static_cast<double>(l), w);
            double ratio = nl / shape;
            if (first || ratio < lo) lo = ratio;
            if (first || ratio > hi) hi = ratio;
            first = false;
        }
        r.envelope_lo = lo;
        r.envelope_hi = hi;
        if (ok && hi > lo * opt.envelope_span) {
            ok = false;
            why = "envelope constant drifts beyond the configured span";
        }
    }
    r.verdict = ok ? Verdict::pass : Verdict::fail;
    r.note = ok ? "within tolerance of the predicted growth" : why;
    return r;
}

/// Volume-sweep verdict against a prediction, with the same slope bracket
/// and envelope rules as the count fits; the envelope shape at threshold
/// eps is eps^exponent times log(1/eps)^(n-k-1).
inline FitResult fit_growth(const std::vector<VolumeEstimate>& sweep,
                            const GrowthPrediction& pred, FitOptions opt = {}) {
    int n_minus_k_1 = pred.log_hi;
    FitModel model = FitModel::exponent_with_log;
    if (pred.case_tag == 'c' || (pred.case_tag == 'a' && n_minus_k_1 == 0))
        model = FitModel::pure_exponent;
    if (pred.case_tag == 'a' && model == FitModel::exponent_with_log && !opt.pin_slope &&
        !opt.pin_log_power)
        opt.pin_log_power = static_cast<double>(n_minus_k_1);

    FitResult r = fit_growth(sweep, model, opt);
    if (r.verdict == Verdict::not_applicable) return r;

    double want_slope = -to_double(pred.exponent);
    bool ok = true;
    std::string why;
    if (pred.case_tag == 'c') {
        double hi = -to_double(pred.exponent);
        double lo = -to_double(pred.lower_exponent);
        if (r.slope < lo - opt.tol_slope || r.slope > hi + opt.tol_slope) {
            ok = false;
            why = "slope outside the case-c bracket";
        }
    } else if (std::fabs(r.slope - want_slope) > opt.tol_slope) {
        ok = false;
        why = "slope misses the predicted exponent";
    }
    if (ok && !r.log_power_pinned && pred.case_tag != 'c') {
        double wlo = static_cast<double>(pred.log_lo) - opt.tol_log_power;
        double whi = static_cast<double>(pred.log_hi) + opt.tol_log_power;
        if (r.log_power < wlo || r.log_power > whi) {
            ok = false;
            why = "log power outside the predicted bracket";
        }
    }
    if (pred.case_tag == 'a') {
        double w = static_cast<double>(n_minus_k_1);
        double lo = 0, hi = 0;
        bool first = true;
        for (const auto& row : sweep) {
            if (row.value <= 0 || !(row.eps > 0) || row.eps >= 1) continue;
            double L = std::log(1.0 / row.eps);
            double shape = std::exp(want_slope * L) * std::pow(L, w);
            double ratio = row.value / shape;
            if (first || ratio < lo) lo = ratio;
            if (first || ratio > hi) hi = ratio;
            first = false;
        }
        r.envelope_lo = lo;
        r.envelope_hi = hi;
        if (ok && hi > lo * opt.envelope_span) {
            ok = false;
            why = "envelope constant drifts beyond the configured span";
        }
    }
    r.verdict = ok ? Verdict::pass : Verdict::fail;
    r.note = ok ? "within tolerance of the predicted growth" : why;
    return r;
}

}  // namespace newton
