#pragma once

#include <functional>

#include "sigest/errors.hpp"

namespace sigest::quad {

// Adaptive Gauss-Kronrod (G7-K15) on a finite interval.
double gk(const std::function<double(double)>& f, double a, double b, double rel_tol,
          int max_depth = 15);

// tanh-sinh rule on a finite interval; tolerates integrable endpoint
// singularities.
double ts(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

// Cohen-Rodriguez Villegas-Zagier acceleration of an alternating series
// sum_{k=0}^{n-1} (-1)^k a_k with a_k > 0.
double crvz(const double* a, int n);

// Sum of an eventually alternating, decaying sequence of lobe integrals
// t_0 + t_1 + ..., accelerated with crvz.  Stops once successive accelerated
// estimates agree within abs_tol, or the terms themselves drop below it.
// Throws NumericError with diagnostics if max_lobes is exhausted.
double accelerated_lobe_sum(const std::function<double(int)>& lobe, double abs_tol,
                            int max_lobes, const char* what);

}  // namespace sigest::quad
