#pragma once

#include <span>
#include <vector>

#include "sigest/tensor.hpp"

namespace sigest {

// A d-coordinate piecewise-linear path: points at strictly increasing times.
// The signature itself is parametrization-invariant; times matter only for
// block bookkeeping.
struct PiecewiseLinearPath {
    int d = 0;
    std::vector<double> times;   // size n
    std::vector<double> points;  // row-major n x d

    std::size_t size() const { return times.size(); }
    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    }
    void validate() const;
};

// Signature of a straight segment with the given increment: the tensor
// exponential, level-m block = increment^{(x)m} / m!.  Group-like.
TruncatedTensor segment_signature(std::span<const double> increment, int M);

// Chen concatenation: the signature of the concatenated path is the tensor
// product of the signatures.  Both inputs must be group-like.
TruncatedTensor chen_concat(const TruncatedTensor& a, const TruncatedTensor& b);

// Exact truncated signature of a piecewise-linear path: left-to-right Chen
// concatenation (running product, deterministic floating-point result) of
// segment exponentials.
TruncatedTensor signature_of_path(const PiecewiseLinearPath& path, int M);

// Same, over a raw point range (row-major, npoints x d).  Used by the block
// estimator to avoid copying block views.
TruncatedTensor signature_of_points(const double* pts, std::size_t npoints, int d, int M);

// Test oracle: level-m coefficients by m-fold nested left-point
// Riemann-Stieltjes sums over the mesh refined to `refine` sub-steps per
// segment.  Converges to signature_of_path at rate O(1/refine).  Implemented
// as the forward prefix recursion equivalent to the strict nested sum; the
// literal nested-loop form is kept in the tests as a cross-check.
TruncatedTensor brute_force_signature(const PiecewiseLinearPath& path, int M, int refine);

}  // namespace sigest
