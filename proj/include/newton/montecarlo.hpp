#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "newton/accum.hpp"
#include "newton/polynomial.hpp"
#include "newton/rng.hpp"
#include "newton/zero_order.hpp"

namespace newton {

/// One measured point of eps -> |{x in box : |f(x)| < eps}|. The value is an
/// absolute measure, not a fraction of the box. Monte Carlo rows carry a
/// binomial standard error; grid rows are deterministic and say so in the
/// note instead.
struct VolumeEstimate {
    double eps = 0;
    double value = 0;
    double std_error = 0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
    double box_volume = 0;
    bool deterministic = false;
    std::string note;
};

/// Every draw is a pure function of (seed, sample index, coordinate), so the
/// estimate is identical for any thread count. threads = 0 picks the
/// hardware count.
struct MonteCarloSampler {
    std::uint64_t count = 1000000;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Midpoint product grid with `resolution` cells per axis (per real axis;
/// complex coordinates use two).
struct GridSampler {
    int resolution = 64;
};

namespace detail {

/// Coefficients converted to the sample scalar once, up front; eval_real
/// re-converts per call, which dominates at Monte Carlo sample counts.
template <class T>
struct NumericTable {
    std::vector<std::pair<Exp, T>> terms;
    int nvars;

    explicit NumericTable(const Polynomial& f) : nvars(f.nvars()) {
        for (const auto& [e, c] : f.terms()) terms.emplace_back(e, T(to_double(c)));
    }

    T eval(const std::vector<T>& x) const {
        T s{};
        for (const auto& [e, c] : terms) {
            T t = c;
            for (int i = 0; i < nvars; ++i)
                for (int k = 0; k < e[i]; ++k) t *= x[i];
            s += t;
        }
        return s;
    }
};

inline int real_dims(const Polynomial& f, FieldSpec K) {
    if (K.field == Field::padic)
        throw std::invalid_argument("sublevel volumes are an archimedean quantity");
    return f.nvars() * K.bK();
}

/// |f| at the sample point laid out as `dims` reals (pairs re,im when
/// complex).
struct AbsEvaluator {
    NumericTable<double> re;
    NumericTable<std::complex<double>> cx;
    bool complex_field;

    AbsEvaluator(const Polynomial& f, FieldSpec K)
        : re(f), cx(f), complex_field(K.field == Field::complex) {}

    double operator()(const std::vector<double>& coords) const {
        if (!complex_field) return std::fabs(re.eval(coords));
        std::vector<std::complex<double>> z(coords.size() / 2);
        for (std::size_t j = 0; j < z.size(); ++j)
            z[j] = {coords[2 * j], coords[2 * j + 1]};
        return std::abs(cx.eval(z));
    }
};

}  // namespace detail

/// Measures |{x : |f(x)| < eps_i}| on the box of the given radius (complex
/// coordinates range over the square box of that radius in each of re, im)
/// for every threshold at once, from one shared sample stream. Sharing makes
/// the rows of a sweep exactly monotone in eps and costs one |f| per sample;
/// the rows are correlated, which is harmless for exponent fits.
inline std::vector<VolumeEstimate> sublevel_sweep(const Polynomial& f, FieldSpec K,
                                                  const std::vector<double>& eps,
                                                  const MonteCarloSampler& sampler,
                                                  double radius = 0.5) {
    for (double e : eps)
        if (!(e > 0)) throw std::invalid_argument("thresholds must be positive");
    if (sampler.count == 0) throw std::invalid_argument("empty sample budget");
    int dims = detail::real_dims(f, K);
    detail::AbsEvaluator av(f, K);
    std::uint64_t key = splitmix64(sampler.seed);
    double box_volume = std::pow(2.0 * radius, dims);

    int threads = sampler.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (static_cast<std::uint64_t>(threads) > sampler.count)
        threads = static_cast<int>(sampler.count);

    std::vector<std::vector<std::uint64_t>> hits(threads,
                                                 std::vector<std::uint64_t>(eps.size(), 0));
    auto run = [&](int t) {
        std::uint64_t lo = sampler.count * t / threads;
        std::uint64_t hi = sampler.count * (t + 1) / threads;
        std::vector<double> x(dims);
        for (std::uint64_t i = lo; i < hi; ++i) {
            for (int j = 0; j < dims; ++j)
                x[j] = uniform_in(key, i * dims + j, -radius, radius);
            double a = av(x);
            for (std::size_t s = 0; s < eps.size(); ++s)
                if (a < eps[s]) ++hits[t][s];
        }
    };
    if (threads == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(run, t);
        for (auto& th : pool) th.join();
    }

    std::vector<VolumeEstimate> out;
    for (std::size_t s = 0; s < eps.size(); ++s) {
        std::uint64_t h = 0;
        for (int t = 0; t < threads; ++t) h += hits[t][s];
        double frac = static_cast<double>(h) / static_cast<double>(sampler.count);
        VolumeEstimate v;
        v.eps = eps[s];
        v.hits = h;
        v.samples = sampler.count;
        v.box_volume = box_volume;
        v.value = frac * box_volume;
        v.std_error = box_volume *
                      std::sqrt(frac * (1.0 - frac) / static_cast<double>(sampler.count));
        v.note = "shared-stream monte carlo";
        out.push_back(std::move(v));
    }
    return out;
}

inline VolumeEstimate sublevel_volume(const Polynomial& f, FieldSpec K, double eps,
                                      const MonteCarloSampler& sampler,
                                      double radius = 0.5) {
    return sublevel_sweep(f, K, {eps}, sampler, radius)[0];
}

inline std::vector<VolumeEstimate> sublevel_sweep(const Polynomial& f, FieldSpec K,
                                                  const std::vector<double>& eps,
                                                  const GridSampler& sampler,
                                                  double radius = 0.5) {
    for (double e : eps)
        if (!(e > 0)) throw std::invalid_argument("thresholds must be positive");
    if (sampler.resolution < 1) throw std::invalid_argument("resolution must be positive");
    int dims = detail::real_dims(f, K);
    double cells = std::pow(static_cast<double>(sampler.resolution), dims);
    if (cells > 1e8) throw std::invalid_argument("grid too large; lower the resolution");
    std::uint64_t total = static_cast<std::uint64_t>(cells);
    detail::AbsEvaluator av(f, K);
    double box_volume = std::pow(2.0 * radius, dims);
    double h = 2.0 * radius / sampler.resolution;

    std::vector<std::uint64_t> hits(eps.size(), 0);
    std::vector<int> idx(dims, 0);
    std::vector<double> x(dims);
    for (std::uint64_t i = 0; i < total; ++i) {
        for (int j = 0; j < dims; ++j) x[j] = -radius + h * (idx[j] + 0.5);
        double a = av(x);
        for (std::size_t s = 0; s < eps.size(); ++s)
            if (a < eps[s]) ++hits[s];
        int pos = 0;
        while (pos < dims && ++idx[pos] == sampler.resolution) idx[pos++] = 0;
    }

    std::vector<VolumeEstimate> out;
    for (std::size_t s = 0; s < eps.size(); ++s) {
        VolumeEstimate v;
        v.eps = eps[s];
        v.hits = hits[s];
        v.samples = total;
        v.box_volume = box_volume;
        v.value = box_volume * static_cast<double>(hits[s]) / static_cast<double>(total);
        v.std_error = 0;
        v.deterministic = true;
        v.note = "midpoint grid, error set by the cell size " + std::to_string(h);
        out.push_back(std::move(v));
    }
    return out;
}

inline VolumeEstimate sublevel_volume(const Polynomial& f, FieldSpec K, double eps,
                                      const GridSampler& sampler, double radius = 0.5) {
    return sublevel_sweep(f, K, {eps}, sampler, radius)[0];
}

/// One row of an I(lambda) table. `resolved` drops when the requested
/// resolution scaling hit the axis cap, in which case the value is reported
/// anyway but should not feed a fit.
struct OscillatorySample {
    double lambda = 0;
    std::complex<double> value;
    long long axis_points = 0;
    bool resolved = true;
};

struct OscillatoryConfig {
    double res_factor = 8.0;     // grid points per axis and unit of lambda
    long long base_points = 64;  // floor for small lambda
    long long max_axis_points = 4096;
    double radius = 0.5;
};

/// I(lambda) = integral of e^{i lambda f} against the product cosine-square
/// bump on the box, by midpoint product quadrature with the per-axis count
/// growing linearly in lambda. A fixed grid against an oscillatory phase is
/// a heuristic, not a certified quadrature; treat fitted decay rates as
/// indicative only.
inline std::vector<OscillatorySample> oscillatory_integral(
    const Polynomial& f, const std::vector<double>& lambdas,
    const OscillatoryConfig& cfg = {}) {
    int n = f.nvars();
    detail::NumericTable<double> table(f);
    std::vector<OscillatorySample> out;
    constexpr double pi = 3.14159265358979323846;
    for (double lam : lambdas) {
        if (!(lam >= 0)) throw std::invalid_argument("lambda must be nonnegative");
        long long want = std::max<long long>(
            cfg.base_points, static_cast<long long>(std::ceil(cfg.res_factor * lam)));
        OscillatorySample row;
        row.lambda = lam;
        row.axis_points = std::min(want, cfg.max_axis_points);
        row.resolved = want <= cfg.max_axis_points;
        double cells = std::pow(static_cast<double>(row.axis_points), n);
        if (cells > 2e8) {
            row.axis_points = static_cast<long long>(std::pow(2e8, 1.0 / n));
            row.resolved = false;
            cells = std::pow(static_cast<double>(row.axis_points), n);
        }
        std::uint64_t total = static_cast<std::uint64_t>(cells);
        double h = 2.0 * cfg.radius / static_cast<double>(row.axis_points);
        double cell = std::pow(h, n);

        detail::Kahan re, im;
        std::vector<int> idx(n, 0);
        std::vector<double> x(n);
        for (std::uint64_t i = 0; i < total; ++i) {
            double bump = 1.0;
            for (int j = 0; j < n; ++j) {
                x[j] = -cfg.radius + h * (idx[j] + 0.5);
                double c = std::cos(pi * x[j] / (2.0 * cfg.radius));
                bump *= c * c;
            }
            double phase = lam * table.eval(x);
            re.add(bump * std::cos(phase));
            im.add(bump * std::sin(phase));
            int pos = 0;
            while (pos < n && ++idx[pos] == row.axis_points) idx[pos++] = 0;
        }
        row.value = {re.sum * cell, im.sum * cell};
        out.push_back(row);
    }
    return out;
}

}  // namespace newton
