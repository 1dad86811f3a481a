#pragma once

#include <vector>

#include "sigest/davies_harte.hpp"
#include "sigest/expected_signature.hpp"
#include "sigest/pl_signature.hpp"

namespace sigest {

// Block-averaging estimator: the arithmetic mean over k of the truncated
// signatures of the K blocks of n points (shared endpoints), averaged in
// fixed block order.
TruncatedTensor block_average_estimate(const SampledPath& path, int M);

// One replication's evaluation against a ground truth.
struct EstimateRecord {
    TruncatedTensor estimate;
    long K = 0;
    long n = 0;
    double delta = 0.0;
    double H = 0.0;
    double total_sq_err = 0.0;
    std::vector<double> level_sq_err;  // index m = 0..M; total is their sum
};

EstimateRecord evaluate_estimate(const TruncatedTensor& est, const GroundTruth& gt,
                                 const SimSpec& spec);

// Monte Carlo squared-error summary over independent replications.
struct MseResult {
    double mean = 0.0;  // mean squared HS error
    double se = 0.0;    // jackknife standard error of the mean
    std::vector<double> level_mean;        // per-level mean contribution
    std::vector<double> rep_total;         // per-replication squared errors
    std::vector<std::vector<double>> rep_level;
    TruncatedTensor mean_estimate;         // across-replication mean of the estimates
    int reps = 0;
};

// Replications run in parallel; aggregation is pairwise over the replication
// index, so results are identical for any thread count.
MseResult replicate_mse(const SimSpec& spec, int M, const GroundTruth& gt, int reps,
                        int threads);

// Same but reusing a prebuilt sampler (covariance table shared across calls).
MseResult replicate_mse(const FouSampler& sampler, const SimSpec& spec, int M,
                        const GroundTruth& gt, int reps, int threads);

// Per-level share of the m >= 2 block-signature variance, pooled over all
// blocks of all replications.
struct LevelwiseReport {
    std::vector<double> level_variance;  // index m = 0..M (levels 0,1 reported too)
    std::vector<double> share;           // m = 2..M shares, normalized to sum to 1 exactly
    long blocks = 0;
};

LevelwiseReport levelwise_report(const SimSpec& spec, int M, int reps, int threads);

}  // namespace sigest
