#include "sigest/estimator.hpp"

#include <cmath>

#include "sigest/parallel.hpp"

namespace sigest {

TruncatedTensor block_average_estimate(const SampledPath& path, int M) {
    if (path.K < 1 || path.n < 2) throw ShapeError("block_average_estimate: bad block geometry");
    const std::size_t expect =
        static_cast<std::size_t>(path.K) * static_cast<std::size_t>(path.n - 1) + 1;
    if (path.points() != expect)
        throw ShapeError("block_average_estimate: path does not partition into K blocks of n points");

    TruncatedTensor mean(path.d, M);
    for (long k = 0; k < path.K; ++k) {
        const TruncatedTensor sig =
            signature_of_points(path.block(k), static_cast<std::size_t>(path.n), path.d, M);
        mean += sig;
    }
    mean *= 1.0 / static_cast<double>(path.K);
    return mean;
}

EstimateRecord evaluate_estimate(const TruncatedTensor& est, const GroundTruth& gt,
                                 const SimSpec& spec) {
    if (!est.same_shape(gt.tensor)) throw ShapeError("evaluate_estimate: estimate/gt shape mismatch");
    EstimateRecord rec;
    rec.estimate = est;
    rec.K = spec.K;
    rec.n = spec.n;
    rec.delta = spec.fou.delta;
    rec.H = spec.fou.H;
    const int M = est.truncation();
    rec.level_sq_err.assign(static_cast<std::size_t>(M) + 1, 0.0);
    TruncatedTensor diff = est;
    diff -= gt.tensor;
    double total = 0.0;
    for (int m = 0; m <= M; ++m) {
        const double v = hs_level_sq(diff, m);
        rec.level_sq_err[static_cast<std::size_t>(m)] = v;
        total += v;
    }
    rec.total_sq_err = total;
    return rec;
}

namespace {

MseResult summarize(std::vector<double> rep_total, std::vector<std::vector<double>> rep_level,
                    int M) {
    MseResult out;
    out.reps = static_cast<int>(rep_total.size());
    out.rep_total = std::move(rep_total);
    out.rep_level = std::move(rep_level);
    const double n = static_cast<double>(out.reps);
    out.mean = pairwise_sum(out.rep_total) / n;
    // Jackknife SE of the mean.
    double ss = 0.0;
    for (double x : out.rep_total) ss += (x - out.mean) * (x - out.mean);
    out.se = out.reps > 1 ? std::sqrt(ss / (n * (n - 1.0))) : 0.0;
    out.level_mean.assign(static_cast<std::size_t>(M) + 1, 0.0);
    std::vector<double> tmp(out.rep_level.size());
    for (int m = 0; m <= M; ++m) {
        for (std::size_t r = 0; r < out.rep_level.size(); ++r)
            tmp[r] = out.rep_level[r][static_cast<std::size_t>(m)];
        out.level_mean[static_cast<std::size_t>(m)] = pairwise_sum(tmp) / n;
    }
    return out;
}

}  // namespace

MseResult replicate_mse(const FouSampler& sampler, const SimSpec& spec, int M,
                        const GroundTruth& gt, int reps, int threads) {
    if (reps < 2) throw DomainError("replicate_mse: reps must be >= 2");
    std::vector<double> rep_total(static_cast<std::size_t>(reps), 0.0);
    std::vector<std::vector<double>> rep_level(static_cast<std::size_t>(reps));
    std::vector<TruncatedTensor> rep_est(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
        const SampledPath path = sampler.sample(static_cast<long>(r));
        const TruncatedTensor est = block_average_estimate(path, M);
        const EstimateRecord rec = evaluate_estimate(est, gt, spec);
        rep_total[r] = rec.total_sq_err;
        rep_level[r] = rec.level_sq_err;
        rep_est[r] = est;
    });
    MseResult out = summarize(std::move(rep_total), std::move(rep_level), M);
    out.mean_estimate = TruncatedTensor(spec.fou.d, M);
    std::vector<double> tmp(static_cast<std::size_t>(reps));
    for (std::size_t c = 0; c < out.mean_estimate.size(); ++c) {
        for (std::size_t r = 0; r < rep_est.size(); ++r) tmp[r] = rep_est[r][c];
        out.mean_estimate[c] = pairwise_sum(tmp) / static_cast<double>(reps);
    }
    return out;
}

MseResult replicate_mse(const SimSpec& spec, int M, const GroundTruth& gt, int reps,
                        int threads) {
    FouSampler sampler(spec, threads);
    return replicate_mse(sampler, spec, M, gt, reps, threads);
}

LevelwiseReport levelwise_report(const SimSpec& spec, int M, int reps, int threads) {
    if (M < 2) throw DomainError("levelwise_report: M must be >= 2");
    spec.validate();
    FouSampler sampler(spec, threads);
    const int d = spec.fou.d;
    const std::size_t dim = tensor_dim(d, M);

    // Per-replication coefficient sums and sums of squares over blocks;
    // combined pairwise over the replication index afterwards.
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(reps)),
        sqs(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
        auto& s = sums[r];
        auto& q = sqs[r];
        s.assign(dim, 0.0);
        q.assign(dim, 0.0);
        const SampledPath path = sampler.sample(static_cast<long>(r));
        for (long k = 0; k < spec.K; ++k) {
            const TruncatedTensor sig =
                signature_of_points(path.block(k), static_cast<std::size_t>(spec.n), d, M);
            for (std::size_t c = 0; c < dim; ++c) {
                s[c] += sig[c];
                q[c] += sig[c] * sig[c];
            }
        }
    });

    const double nblocks = static_cast<double>(reps) * static_cast<double>(spec.K);
    LevelwiseReport rep;
    rep.blocks = static_cast<long>(nblocks);
    rep.level_variance.assign(static_cast<std::size_t>(M) + 1, 0.0);
    std::vector<double> tmp(static_cast<std::size_t>(reps));
    for (int m = 0; m <= M; ++m) {
        double var_m = 0.0;
        for (std::size_t c = level_offset(d, m); c < level_offset(d, m) + level_size(d, m); ++c) {
            for (std::size_t r = 0; r < sums.size(); ++r) tmp[r] = sums[r][c];
            const double mean = pairwise_sum(tmp) / nblocks;
            for (std::size_t r = 0; r < sqs.size(); ++r) tmp[r] = sqs[r][c];
            const double mean_sq = pairwise_sum(tmp) / nblocks;
            var_m += mean_sq - mean * mean;
        }
        rep.level_variance[static_cast<std::size_t>(m)] = var_m;
    }

    double denom = 0.0;
    for (int m = 2; m <= M; ++m) denom += rep.level_variance[static_cast<std::size_t>(m)];
    rep.share.assign(static_cast<std::size_t>(M - 1), 0.0);
    double acc = 0.0;
    for (int m = 2; m < M; ++m) {
        const double s = rep.level_variance[static_cast<std::size_t>(m)] / denom;
        rep.share[static_cast<std::size_t>(m - 2)] = s;
        acc += s;
    }
    // Last share closes to 1 exactly.
    rep.share[static_cast<std::size_t>(M - 2)] = 1.0 - acc;
    return rep;
}

}  // namespace sigest
