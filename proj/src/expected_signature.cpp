#include "sigest/expected_signature.hpp"

#include <algorithm>
#include <cmath>

#include "sigest/parallel.hpp"
#include "sigest/quadrature.hpp"

namespace sigest {

const char* gt_method_name(GtMethod m) {
    switch (m) {
        case GtMethod::closed_form: return "closed_form";
        case GtMethod::boundary_form: return "boundary_form";
        case GtMethod::wick_mesh: return "wick_mesh";
    }
    return "?";
}

double ground_truth_level2(const FouParams& p, int i) {
    p.validate();
    FouCovariance cov(p.H, p.theta.at(static_cast<std::size_t>(i)),
                      p.sigma.at(static_cast<std::size_t>(i)));
    return cov.D(p.delta);
}

// ---------------------------------------------------------------------------
// Pairing integrals.
//
// P1 (adjacent), word (a,a,b,b):
//   H > 1/2:  int_0^D R'_a(s) [R_b(D-s) - R_b(0)] ds
//   H = 1/2:  int_{0<t2<t3<D} [R'_a(0+)-R'_a(t2)][R'_b(0+)-R'_b(D-t3)]
// P2 (alternating), word (a,b,a,b), any H > 1/4, with u = t3-t2:
//   int_0^D dt int_0^{D-t} [R'_a(t+u)-R'_a(u)][R'_b(D-t)-R'_b(u)] du
// P3 (nested), word (a,b,b,a):
//   H > 1/2:  int_0^D R'_a(t)[R_b(t)-R_b(0)] dt - int_0^D (D-w) R'_a(w) R'_b(w) dw
//   H = 1/2:  int_{0<t2<t4<D} [R'_a(t4)-R'_a(t4-t2)][R'_b(t4-t2)-R'_b(0+)]
// ---------------------------------------------------------------------------

double pairing1(const FouCovariance& a, const FouCovariance& b, double delta, double tol) {
    const double D = delta;
    if (a.H() > 0.5) {
        const double Rb0 = b.variance();
        auto f = [&](double s) { return a.Rprime(s) * (b.R(D - s) - Rb0); };
        return quad::ts(f, 0.0, D, tol);
    }
    // H = 1/2 boundary form, tensorized adaptive rule on the triangle t2 < t3.
    // The semimartingale Wick density -R'' carries a quadratic-variation atom
    // sigma^2 delta_0 whose half mass enters each inner integration-by-parts
    // boundary, so the bracket is sigma^2/2 + R'(0+) - R'(.) = -R'(.) for
    // stationary OU (R'(0+) = -sigma^2/2).
    auto outer = [&](double t2) {
        const double ga = -a.Rprime(t2);
        auto inner = [&](double t3) { return -b.Rprime(D - t3); };
        return ga * quad::gk(inner, t2, D, tol, 12);
    };
    return quad::gk(outer, 0.0, D, tol, 12);
}

double pairing2(const FouCovariance& a, const FouCovariance& b, double delta, double tol) {
    const double D = delta;
    const double Ra0 = a.variance();
    // The factor R'_b(D-t) is constant in u; its u-integral of
    // R'_a(t+u) - R'_a(u) telescopes to covariance differences.
    auto outer = [&](double t) {
        const double rbc = b.Rprime(D - t);
        const double telescoped = (a.R(D) - a.R(t)) - (a.R(D - t) - Ra0);
        auto inner = [&](double u) { return (a.Rprime(t + u) - a.Rprime(u)) * b.Rprime(u); };
        const double cross = quad::ts(inner, 0.0, D - t, tol);
        return rbc * telescoped - cross;
    };
    return quad::gk(outer, 0.0, D, tol, 12);
}

double pairing3(const FouCovariance& a, const FouCovariance& b, double delta, double tol) {
    const double D = delta;
    if (a.H() > 0.5) {
        const double Rb0 = b.variance();
        auto f1 = [&](double t) { return a.Rprime(t) * (b.R(t) - Rb0); };
        auto f2 = [&](double w) { return (D - w) * a.Rprime(w) * b.Rprime(w); };
        return quad::ts(f1, 0.0, D, tol) - quad::ts(f2, 0.0, D, tol);
    }
    // H = 1/2 boundary form, substituted u = t4 - t2.  The inner (t2, t3)
    // pair picks up the half quadratic-variation atom at t3 = t2, giving the
    // bracket sigma^2/2 + R'(0+) - R'(u) = -R'(u) for stationary OU.
    auto outer = [&](double u) {
        const double gb = b.Rprime(u);
        auto inner = [&](double t2) { return (a.Rprime(u + t2) - a.Rprime(u)); };
        return gb * quad::gk(inner, 0.0, D - u, tol, 12);
    };
    return quad::gk(outer, 0.0, D, tol, 12);
}

namespace {

bool has_odd_letter(const Word& w, int d) {
    std::vector<int> mult(static_cast<std::size_t>(d), 0);
    for (int l : w.letters) ++mult[static_cast<std::size_t>(l - 1)];
    for (int m : mult)
        if (m % 2 != 0) return true;
    return false;
}

}  // namespace

double ground_truth_level4_closed(const FouParams& p, const Word& w, double quad_tol) {
    p.validate();
    if (w.length() != 4) throw DomainError("ground_truth_level4_closed: word length must be 4");
    if (p.H < 0.5)
        throw DomainError(
            "ground_truth_level4_closed: closed forms are invalid for H < 1/2; use the mesh route");
    if (has_odd_letter(w, p.d)) return 0.0;

    FouCovarianceSet cov(p);
    const auto& l = w.letters;
    double val = 0.0;
    if (l[0] == l[1] && l[2] == l[3])
        val += pairing1(cov.coord(l[0] - 1), cov.coord(l[2] - 1), p.delta, quad_tol);
    if (l[0] == l[2] && l[1] == l[3])
        val += pairing2(cov.coord(l[0] - 1), cov.coord(l[1] - 1), p.delta, quad_tol);
    if (l[0] == l[3] && l[1] == l[2])
        val += pairing3(cov.coord(l[0] - 1), cov.coord(l[1] - 1), p.delta, quad_tol);
    return val;
}

// ---------------------------------------------------------------------------
// Wick mesh: weighted simplex sums over mesh segments.
//
// Each sum runs over 1 <= k1 <= k2 <= k3 <= k4 <= L with weight
// prod 1/(run length)! and splits into the 8 equality patterns of adjacent
// indices; strict parts are factorized through the prefix sums
//   SA(g) = sum_{j<=g} a[j],  TA(g) = sum_{j<=g} SA(j),
//   PAB(g) = sum_{j<=g} a[j] SB(j).
// ---------------------------------------------------------------------------

namespace {

struct Prefix {
    std::vector<double> S;  // S[g] = sum_{j=1..g} c[j], S[0] = 0
    std::vector<double> T;  // T[g] = sum_{j=1..g} S[j]
    explicit Prefix(const std::vector<double>& c) {
        const std::size_t L = c.size();
        S.assign(L, 0.0);
        T.assign(L, 0.0);
        for (std::size_t g = 1; g < L; ++g) {
            S[g] = S[g - 1] + c[g];
            T[g] = T[g - 1] + S[g];
        }
    }
};

// sum_{g<=G} a[g] * SB[g]
std::vector<double> cross_prefix(const std::vector<double>& a, const Prefix& pb) {
    std::vector<double> P(a.size(), 0.0);
    for (std::size_t g = 1; g < a.size(); ++g) P[g] = P[g - 1] + a[g] * pb.S[g];
    return P;
}

}  // namespace

double wick4_adjacent(const std::vector<double>& a, const std::vector<double>& b, long L) {
    const Prefix pa(a), pb(b);
    const double A0 = a[0], B0 = b[0];
    const auto nL = static_cast<std::size_t>(L);
    double total = 0.0;

    // strict k1<k2<k3<k4: sum_{k2<k3} SA(k2-1) SB(L-k3)
    {
        double s = 0.0;
        for (std::size_t k3 = 2; k3 <= nL; ++k3) s += pa.T[k3 - 2] * pb.S[nL - k3];
        total += s;
    }
    // k1=k2=s<k3<k4 (1/2): (A0/2) sum_{k3} (k3-1) SB(L-k3)
    {
        double s = 0.0;
        for (std::size_t k3 = 2; k3 < nL; ++k3) s += static_cast<double>(k3 - 1) * pb.S[nL - k3];
        total += 0.5 * A0 * s;
    }
    // k1<k2=k3<k4 (1/2): sum_t SA(t-1) SB(L-t)
    {
        double s = 0.0;
        for (std::size_t t = 2; t < nL; ++t) s += pa.S[t - 1] * pb.S[nL - t];
        total += 0.5 * s;
    }
    // k1<k2<k3=k4 (1/2): (B0/2) sum_{k2} SA(k2-1) (L-k2)
    {
        double s = 0.0;
        for (std::size_t k2 = 2; k2 < nL; ++k2)
            s += pa.S[k2 - 1] * static_cast<double>(nL - k2);
        total += 0.5 * B0 * s;
    }
    // k1=k2<k3=k4 (1/4)
    total += 0.25 * A0 * B0 * 0.5 * static_cast<double>(L) * static_cast<double>(L - 1);
    // k1=k2=k3<k4 (1/6): (A0/6) sum_g (L-g) b[g]
    {
        double s = 0.0;
        for (std::size_t g = 1; g < nL; ++g) s += static_cast<double>(nL - g) * b[g];
        total += A0 / 6.0 * s;
    }
    // k1<k2=k3=k4 (1/6): (B0/6) sum_g (L-g) a[g]
    {
        double s = 0.0;
        for (std::size_t g = 1; g < nL; ++g) s += static_cast<double>(nL - g) * a[g];
        total += B0 / 6.0 * s;
    }
    // all equal (1/24)
    total += A0 * B0 * static_cast<double>(L) / 24.0;
    return total;
}

double wick4_alternating(const std::vector<double>& a, const std::vector<double>& b, long L) {
    const Prefix pa(a), pb(b);
    const auto PAB = cross_prefix(a, pb);
    const auto PBA = cross_prefix(b, pa);
    const double A0 = a[0], B0 = b[0];
    const auto nL = static_cast<std::size_t>(L);
    double total = 0.0;

    // strict: sum_{k2<k3} [SA(k3-1)-SA(k3-k2)][SB(L-k2)-SB(k3-k2)]
    {
        double s = 0.0;
        for (std::size_t k2 = 1; k2 < nL; ++k2) {
            const double sbl = pb.S[nL - k2];
            double row = 0.0;
            for (std::size_t k3 = k2 + 1; k3 <= nL; ++k3) {
                const std::size_t g = k3 - k2;
                row += (pa.S[k3 - 1] - pa.S[g]) * (sbl - pb.S[g]);
            }
            s += row;
        }
        total += s;
    }
    // k1=k2=s<k3<k4 (1/2): (1/2) sum_s [SA(L-s) SB(L-s) - PAB(L-s)]
    {
        double s = 0.0;
        for (std::size_t ss = 1; ss < nL; ++ss) {
            const std::size_t G = nL - ss;
            s += pa.S[G] * pb.S[G] - PAB[G];
        }
        total += 0.5 * s;
    }
    // k1<k2=k3<k4 (1/2): sum_t SA(t-1) SB(L-t)
    {
        double s = 0.0;
        for (std::size_t t = 2; t < nL; ++t) s += pa.S[t - 1] * pb.S[nL - t];
        total += 0.5 * s;
    }
    // k1<k2<k3=k4 (1/2): (1/2) sum_u [SA(u-1) SB(u-1) - PBA(u-1)]
    {
        double s = 0.0;
        for (std::size_t u = 2; u <= nL; ++u) s += pa.S[u - 1] * pb.S[u - 1] - PBA[u - 1];
        total += 0.5 * s;
    }
    // k1=k2<k3=k4 (1/4): (1/4) sum_g (L-g) a[g] b[g]
    {
        double s = 0.0;
        for (std::size_t g = 1; g < nL; ++g) s += static_cast<double>(nL - g) * a[g] * b[g];
        total += 0.25 * s;
    }
    // k1=k2=k3<k4 (1/6): (A0/6) sum_g (L-g) b[g]
    {
        double s = 0.0;
        for (std::size_t g = 1; g < nL; ++g) s += static_cast<double>(nL - g) * b[g];
        total += A0 / 6.0 * s;
    }
    // k1<k2=k3=k4 (1/6): (B0/6) sum_g (L-g) a[g]
    {
        double s = 0.0;
        for (std::size_t g = 1; g < nL; ++g) s += static_cast<double>(nL - g) * a[g];
        total += B0 / 6.0 * s;
    }
    total += A0 * B0 * static_cast<double>(L) / 24.0;
    return total;
}

double wick4_nested(const std::vector<double>& a, const std::vector<double>& b, long L) {
    const Prefix pa(a), pb(b);
    const auto PBA = cross_prefix(b, pa);
    const double A0 = a[0], B0 = b[0];
    const auto nL = static_cast<std::size_t>(L);
    double total = 0.0;

    // strict: sum_{k2<k3} b(k3-k2) [TA(L-1)-TA(L-k2) - TA(k3-1) + TA(k3-k2)]
    {
        const double TL = pa.T[nL - 1];
        double s = 0.0;
        for (std::size_t k2 = 1; k2 < nL; ++k2) {
            const double w1 = TL - pa.T[nL - k2];
            double row = 0.0;
            for (std::size_t k3 = k2 + 1; k3 <= nL; ++k3) {
                const std::size_t g = k3 - k2;
                row += b[g] * (w1 - pa.T[k3 - 1] + pa.T[g]);
            }
            s += row;
        }
        total += s;
    }
    // k1=k2=s<k3<k4 (1/2): (1/2) sum_s [SB(L-s) SA(L-s) - PBA(L-s)]
    {
        double s = 0.0;
        for (std::size_t ss = 1; ss < nL; ++ss) {
            const std::size_t G = nL - ss;
            s += pb.S[G] * pa.S[G] - PBA[G];
        }
        total += 0.5 * s;
    }
    // k1<k2=k3<k4 (1/2): (B0/2) sum_g a[g] (g-1)(L-g)
    {
        double s = 0.0;
        for (std::size_t g = 2; g < nL; ++g)
            s += a[g] * static_cast<double>(g - 1) * static_cast<double>(nL - g);
        total += 0.5 * B0 * s;
    }
    // k1<k2<k3=k4 (1/2): (1/2) sum_u [SA(u-1) SB(u-1) - PBA(u-1)]
    {
        double s = 0.0;
        for (std::size_t u = 2; u <= nL; ++u) s += pa.S[u - 1] * pb.S[u - 1] - PBA[u - 1];
        total += 0.5 * s;
    }
    // k1=k2<k3=k4 (1/4): (1/4) sum_g (L-g) a[g] b[g]
    {
        double s = 0.0;
        for (std::size_t g = 1; g < nL; ++g) s += static_cast<double>(nL - g) * a[g] * b[g];
        total += 0.25 * s;
    }
    // k1=k2=k3<k4 and k1<k2=k3=k4 (1/6 each): (B0/6) sum_g (L-g) a[g], twice
    {
        double s = 0.0;
        for (std::size_t g = 1; g < nL; ++g) s += static_cast<double>(nL - g) * a[g];
        total += 2.0 * B0 / 6.0 * s;
    }
    total += A0 * B0 * static_cast<double>(L) / 24.0;
    return total;
}

std::vector<double> mesh_increment_covariances(const FouCovariance& cov, double delta, long L,
                                               int threads) {
    const double h = delta / static_cast<double>(L);
    std::vector<double> Dv(static_cast<std::size_t>(L) + 1);
    parallel_for(Dv.size(), threads,
                 [&](std::size_t k) { Dv[k] = cov.D(static_cast<double>(k) * h); });
    std::vector<double> c(static_cast<std::size_t>(L));
    c[0] = 2.0 * Dv[1];
    for (std::size_t g = 1; g < c.size(); ++g) c[g] = Dv[g + 1] + Dv[g - 1] - 2.0 * Dv[g];
    return c;
}

GroundTruth ground_truth_wick_mesh(const FouParams& p, int M, long L, int threads,
                                   double quad_tol) {
    p.validate();
    if (M > 4) throw DomainError("ground_truth_wick_mesh: M <= 4 (no level > 4 ground truth)");
    if (M < 0) throw DomainError("ground_truth_wick_mesh: M must be >= 0");
    if (L < 4) throw DomainError("ground_truth_wick_mesh: L must be >= 4");

    GroundTruth gt;
    gt.params = p;
    gt.M = M;
    gt.method = GtMethod::wick_mesh;
    gt.mesh_L = L;
    gt.quad_tol = quad_tol;
    gt.tensor = TruncatedTensor(p.d, M);
    gt.tensor[0] = 1.0;

    std::vector<std::vector<double>> c(static_cast<std::size_t>(p.d));
    for (int i = 0; i < p.d; ++i) {
        FouCovariance cov(p.H, p.theta[static_cast<std::size_t>(i)],
                          p.sigma[static_cast<std::size_t>(i)], quad_tol);
        c[static_cast<std::size_t>(i)] = mesh_increment_covariances(cov, p.delta, L, threads);
    }

    if (M >= 2) {
        // Level 2: diagonal sum_{k1<=k2} with the 1/2 diagonal weight; this
        // telescopes to v_i = R(0) - R(delta) up to rounding.
        for (int i = 0; i < p.d; ++i) {
            const auto& ci = c[static_cast<std::size_t>(i)];
            double s = 0.5 * static_cast<double>(L) * ci[0];
            for (long g = 1; g < L; ++g)
                s += static_cast<double>(L - g) * ci[static_cast<std::size_t>(g)];
            gt.tensor.at(Word{i + 1, i + 1}) = s;
        }
    }
    if (M >= 4) {
        const auto words4 = level_size(p.d, 4);
        for (std::size_t k = 0; k < words4; ++k) {
            const Word w = word_at(p.d, 4, k);
            const auto& l = w.letters;
            double val = 0.0;
            if (l[0] == l[1] && l[2] == l[3])
                val += wick4_adjacent(c[static_cast<std::size_t>(l[0] - 1)],
                                      c[static_cast<std::size_t>(l[2] - 1)], L);
            if (l[0] == l[2] && l[1] == l[3])
                val += wick4_alternating(c[static_cast<std::size_t>(l[0] - 1)],
                                         c[static_cast<std::size_t>(l[1] - 1)], L);
            if (l[0] == l[3] && l[1] == l[2])
                val += wick4_nested(c[static_cast<std::size_t>(l[0] - 1)],
                                    c[static_cast<std::size_t>(l[1] - 1)], L);
            gt.tensor.at(w) = val;
        }
    }

    const auto words = enumerate_words(p.d, M);
    gt.provenance.reserve(words.size());
    for (const auto& w : words) {
        const int m = w.length();
        if (m == 0)
            gt.provenance.emplace_back("unit");
        else if (m % 2 == 1)
            gt.provenance.emplace_back("odd_level_zero");
        else if (m == 2)
            gt.provenance.emplace_back(w.letters[0] == w.letters[1] ? "wick_mesh_L" +
                                                                          std::to_string(L)
                                                                    : "off_diagonal_zero");
        else
            gt.provenance.emplace_back("wick_mesh_L" + std::to_string(L));
    }
    return gt;
}

GroundTruth make_ground_truth(const FouParams& p, int M, long wick_L, int threads) {
    p.validate();
    if (M > 4) throw DomainError("make_ground_truth: M <= 4 (no level > 4 ground truth)");
    if (p.H < 0.5) {
        // The mesh limit is the definition of the level-4 target here.
        return ground_truth_wick_mesh(p, M, wick_L, threads);
    }
    GroundTruth gt;
    gt.params = p;
    gt.M = M;
    gt.method = p.H == 0.5 ? GtMethod::boundary_form : GtMethod::closed_form;
    gt.quad_tol = 1e-9;
    gt.tensor = TruncatedTensor(p.d, M);
    gt.tensor[0] = 1.0;
    if (M >= 2)
        for (int i = 0; i < p.d; ++i)
            gt.tensor.at(Word{i + 1, i + 1}) = ground_truth_level2(p, i);
    if (M >= 4) {
        const auto words4 = level_size(p.d, 4);
        std::vector<Word> ws;
        for (std::size_t k = 0; k < words4; ++k) ws.push_back(word_at(p.d, 4, k));
        std::vector<double> vals(ws.size(), 0.0);
        parallel_for(ws.size(), threads, [&](std::size_t k) {
            vals[k] = ground_truth_level4_closed(p, ws[k], gt.quad_tol);
        });
        for (std::size_t k = 0; k < ws.size(); ++k) gt.tensor.at(ws[k]) = vals[k];
    }
    const char* tag = p.H == 0.5 ? "boundary_form" : "closed_form";
    const auto words = enumerate_words(p.d, M);
    for (const auto& w : words) {
        const int m = w.length();
        if (m == 0)
            gt.provenance.emplace_back("unit");
        else if (m % 2 == 1)
            gt.provenance.emplace_back("odd_level_zero");
        else if (m == 2)
            gt.provenance.emplace_back(w.letters[0] == w.letters[1] ? "level2_closed"
                                                                    : "off_diagonal_zero");
        else
            gt.provenance.emplace_back(tag);
    }
    return gt;
}

double shuffle_consistency(const GroundTruth& gt, int i, int j) {
    if (i == j) throw DomainError("shuffle_consistency: coordinates must differ");
    const int d = gt.tensor.d();
    if (d < 2 || gt.M < 4) throw DomainError("shuffle_consistency: needs d >= 2 and M >= 4");
    if (i < 1 || i > d || j < 1 || j > d) throw DomainError("shuffle_consistency: coordinate out of range");

    const Word uii{i, i}, vjj{j, j};
    const TruncatedTensor sh = shuffle(uii, vjj, d, gt.M);
    const double lhs = hs_inner(sh, gt.tensor);
    const double rhs = gt.tensor.at(uii) * gt.tensor.at(vjj);
    if (rhs == 0.0) throw DomainError("shuffle_consistency: degenerate parameters (v_i v_j = 0)");
    return std::abs(lhs - rhs) / std::abs(rhs);
}

double wick_mesh_stability(const FouParams& p, int M, long L, int threads) {
    const GroundTruth g1 = ground_truth_wick_mesh(p, M, L, threads);
    const GroundTruth g2 = ground_truth_wick_mesh(p, M, 2 * L, threads);
    double sup = 0.0;
    for (std::size_t k = 0; k < g1.tensor.size(); ++k)
        sup = std::max(sup, std::abs(g1.tensor[k] - g2.tensor[k]));
    return sup;
}

}  // namespace sigest
