#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sigest/errors.hpp"

namespace sigest {

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int points = 0;
};

// OLS of log10(y) on log10(x).  Inputs must be strictly positive.
RegressionResult ols_loglog(std::span<const std::pair<double, double>> points);

// Percentile 95% CI for the log-log slope from a pairs bootstrap with B
// resamples; resamples whose x-values collapse to a single point are
// redrawn.  Deterministic given the seed.
std::pair<double, double> pairs_bootstrap_ci(std::span<const std::pair<double, double>> points,
                                             int B, std::uint64_t seed);

// Anderson-Darling p-value against a fully specified N(0,1), via the
// asymptotic distribution (Marsaglia & Marsaglia 2004 approximation).
double anderson_darling_normal_pvalue(std::vector<double> sample);

double mean_of(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // unbiased

}  // namespace sigest
