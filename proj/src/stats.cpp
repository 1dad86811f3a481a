#include "sigest/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sigest/parallel.hpp"
#include "sigest/rng.hpp"

namespace sigest {

double mean_of(std::span<const double> xs) {
    return pairwise_sum(xs.data(), xs.size()) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / (static_cast<double>(xs.size()) - 1.0);
}

RegressionResult ols_loglog(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw DataError("ols_loglog: need at least 2 points");
    const std::size_t n = points.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(points[i].first > 0.0) || !(points[i].second > 0.0))
            throw DataError("ols_loglog: x and mse must be strictly positive");
        x[i] = std::log10(points[i].first);
        y[i] = std::log10(points[i].second);
    }
    const double xbar = mean_of(x), ybar = mean_of(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
        syy += (y[i] - ybar) * (y[i] - ybar);
    }
    if (sxx == 0.0) throw DataError("ols_loglog: degenerate x values");
    RegressionResult r;
    r.points = static_cast<int>(n);
    r.slope = sxy / sxx;
    r.intercept = ybar - r.slope * xbar;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (r.intercept + r.slope * x[i]);
        ss_res += e * e;
    }
    r.r2 = (syy == 0.0) ? (ss_res == 0.0 ? 1.0 : 0.0) : std::max(0.0, 1.0 - ss_res / syy);
    if (ss_res <= 1e-30 * std::max(1.0, syy)) r.r2 = 1.0;
    r.ci_low = r.slope;
    r.ci_high = r.slope;
    return r;
}

std::pair<double, double> pairs_bootstrap_ci(std::span<const std::pair<double, double>> points,
                                             int B, std::uint64_t seed) {
    if (points.size() < 3) throw DataError("pairs_bootstrap_ci: need at least 3 points");
    if (B < 100) throw DataError("pairs_bootstrap_ci: B must be >= 100");
    const std::size_t n = points.size();
    NormalStream rng(splitmix64(seed));  // used only for its uniform 64-bit stream

    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(B));
    std::vector<std::pair<double, double>> res(n);
    for (int b = 0; b < B; ++b) {
        for (;;) {
            bool degenerate = true;
            for (std::size_t i = 0; i < n; ++i) {
                res[i] = points[rng.next_u64() % n];
                if (i > 0 && res[i].first != res[0].first) degenerate = false;
            }
            if (!degenerate) break;  // redraw resamples with a single x value
        }
        slopes.push_back(ols_loglog(res).slope);
    }
    std::sort(slopes.begin(), slopes.end());
    auto quantile = [&](double q) {
        // nearest-rank with linear interpolation
        const double pos = q * (static_cast<double>(slopes.size()) - 1.0);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, slopes.size() - 1);
        const double frac = pos - std::floor(pos);
        return slopes[lo] * (1.0 - frac) + slopes[hi] * frac;
    };
    return {quantile(0.025), quantile(0.975)};
}

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// P(A^2 <= z) in the limit, Marsaglia & Marsaglia (2004) two-branch fit.
double ad_cdf(double z) {
    if (z <= 0.0) return 0.0;
    if (z < 2.0)
        return std::exp(-1.2337141 / z) / std::sqrt(z) *
               (2.00012 +
                (0.247105 - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z) * z);
    return std::exp(
        -std::exp(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z));
}

}  // namespace

double anderson_darling_normal_pvalue(std::vector<double> sample) {
    const std::size_t n = sample.size();
    if (n < 8) throw DataError("anderson_darling: need at least 8 observations");
    std::sort(sample.begin(), sample.end());
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = std_normal_cdf(sample[i]);
        const double g = std_normal_cdf(sample[n - 1 - i]);
        const double fi = std::min(std::max(f, 1e-300), 1.0 - 1e-16);
        const double gi = std::min(std::max(g, 1e-300), 1.0 - 1e-16);
        a += (2.0 * static_cast<double>(i) + 1.0) * (std::log(fi) + std::log1p(-gi));
    }
    const double A2 = -static_cast<double>(n) - a / static_cast<double>(n);
    return 1.0 - ad_cdf(A2);
}

}  // namespace sigest
