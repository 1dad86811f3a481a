#include "sigest/pl_signature.hpp"

#include <cmath>

namespace sigest {

void PiecewiseLinearPath::validate() const {
    if (d < 1) throw ShapeError("path: d must be >= 1");
    if (times.size() < 2) throw DataError("path: need at least 2 points");
    if (points.size() != times.size() * static_cast<std::size_t>(d))
        throw ShapeError("path: point array size does not match times x d");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DataError("path: times must be strictly increasing");
    for (double x : points)
        if (!std::isfinite(x)) throw DataError("path: non-finite point");
}

TruncatedTensor segment_signature(std::span<const double> increment, int M) {
    const int d = static_cast<int>(increment.size());
    TruncatedTensor t(d, M);
    t[0] = 1.0;
    // level m = (previous level (x) increment) / m
    for (int m = 1; m <= M; ++m) {
        auto prev = t.level(m - 1);
        auto cur = t.level(m);
        const double inv_m = 1.0 / m;
        std::size_t k = 0;
        for (std::size_t i = 0; i < prev.size(); ++i)
            for (int j = 0; j < d; ++j) cur[k++] = prev[i] * increment[static_cast<std::size_t>(j)] * inv_m;
    }
    return t;
}

namespace {

void require_group_like(const TruncatedTensor& t, const char* who) {
    if (std::abs(t[0] - 1.0) > 1e-9)
        throw ShapeError(std::string(who) + ": operand is not group-like (level-0 coefficient != 1)");
}

}  // namespace

TruncatedTensor chen_concat(const TruncatedTensor& a, const TruncatedTensor& b) {
    if (!a.same_shape(b)) throw ShapeError("chen_concat: shape mismatch");
    require_group_like(a, "chen_concat");
    require_group_like(b, "chen_concat");
    return tensor_mul(a, b);
}

TruncatedTensor signature_of_points(const double* pts, std::size_t npoints, int d, int M) {
    if (npoints < 2) throw DataError("signature: need at least 2 points");
    const std::size_t dd = static_cast<std::size_t>(d);
    std::vector<double> inc(dd);
    for (std::size_t j = 0; j < dd; ++j) {
        if (!std::isfinite(pts[j]) || !std::isfinite(pts[dd + j]))
            throw DataError("signature: non-finite point");
        inc[j] = pts[dd + j] - pts[j];
    }
    TruncatedTensor acc = segment_signature(inc, M);
    TruncatedTensor seg(d, M), scratch(d, M);
    for (std::size_t i = 1; i + 1 < npoints; ++i) {
        const double* p0 = pts + i * dd;
        const double* p1 = p0 + dd;
        for (std::size_t j = 0; j < dd; ++j) {
            if (!std::isfinite(p1[j])) throw DataError("signature: non-finite point");
            inc[j] = p1[j] - p0[j];
        }
        seg = segment_signature(inc, M);
        tensor_mul_into(acc, seg, scratch);
        std::swap(acc, scratch);
    }
    return acc;
}

TruncatedTensor signature_of_path(const PiecewiseLinearPath& path, int M) {
    path.validate();
    return signature_of_points(path.points.data(), path.size(), path.d, M);
}

TruncatedTensor brute_force_signature(const PiecewiseLinearPath& path, int M, int refine) {
    path.validate();
    if (refine < 1) throw DomainError("brute_force_signature: refine must be >= 1");
    const int d = path.d;
    const std::size_t segs = path.size() - 1;

    // Prefix state: I[w] approximates the iterated integral of word w over
    // the grid consumed so far; the update for each refined cell applies the
    // strict left-point rule I[w] += I[w minus last letter] * dX^{last}.
    // Words are updated longest-first so each step uses pre-update prefixes.
    TruncatedTensor acc(d, M);
    acc[0] = 1.0;
    std::vector<double> dx(static_cast<std::size_t>(d));
    for (std::size_t s = 0; s < segs; ++s) {
        auto p0 = path.point(s);
        auto p1 = path.point(s + 1);
        for (int j = 0; j < d; ++j)
            dx[static_cast<std::size_t>(j)] = (p1[static_cast<std::size_t>(j)] - p0[static_cast<std::size_t>(j)]) / refine;
        for (int r = 0; r < refine; ++r) {
            for (int m = M; m >= 1; --m) {
                auto prev = acc.level(m - 1);
                auto cur = acc.level(m);
                std::size_t k = 0;
                for (std::size_t i = 0; i < prev.size(); ++i)
                    for (int j = 0; j < d; ++j) cur[k++] += prev[i] * dx[static_cast<std::size_t>(j)];
            }
        }
    }
    return acc;
}

}  // namespace sigest
