#pragma once

#include <string>
#include <vector>

#include "sigest/fou.hpp"
#include "sigest/tensor.hpp"

namespace sigest {

enum class GtMethod { closed_form, boundary_form, wick_mesh };

const char* gt_method_name(GtMethod m);

// Deterministic target E[S^(M)] for one fOU block of length delta, with
// per-word provenance.  Level 0 is 1, odd levels vanish, level 2 is diagonal
// with entries v_i = R_i(0) - R_i(delta), and level 4 carries the Wick
// pairing values.
struct GroundTruth {
    TruncatedTensor tensor;
    GtMethod method = GtMethod::wick_mesh;
    long mesh_L = 0;        // mesh count when method == wick_mesh
    double quad_tol = 0.0;
    std::vector<std::string> provenance;  // per word, canonical order
    FouParams params;
    int M = 0;
};

// Level-2 diagonal entry: v_i = R_i(0) - R_i(delta) > 0.
double ground_truth_level2(const FouParams& p, int i);

// Level-4 coefficient from the regularized pairing formulas.  Valid for
// H >= 1/2 only (H < 1/2 must go through the mesh construction); words in
// which some letter appears an odd number of times give exactly 0.
double ground_truth_level4_closed(const FouParams& p, const Word& w, double quad_tol = 1e-9);

// Exact expected truncated signature of the piecewise-linear Gaussian
// interpolation on the uniform L-cell mesh of [0, delta]: every level-m word
// coefficient is expanded over mesh segments with 1/(run length)! simplex
// weights and the expectation taken by Isserlis pairing of increment
// covariances.  O(L^2) per level-4 pairing via prefix-sum factorization.
GroundTruth ground_truth_wick_mesh(const FouParams& p, int M, long L, int threads = 1,
                                   double quad_tol = 1e-10);

// Production ground truth: closed forms where the regime admits them
// (H > 1/2 closed, H = 1/2 boundary), the mesh limit otherwise.
GroundTruth make_ground_truth(const FouParams& p, int M, long wick_L = 1024, int threads = 1);

// |sum_{w in (ii) shuffle (jj)} gt[w] - gt[ii] gt[jj]| / |gt[ii] gt[jj]|,
// for distinct coordinates i, j (1-based letters).
double shuffle_consistency(const GroundTruth& gt, int i, int j);

// sup-norm distance between wick_mesh(L) and wick_mesh(2L) level-4 blocks;
// the mesh-stability diagnostic.
double wick_mesh_stability(const FouParams& p, int M, long L, int threads = 1);

// --- exposed internals (shared with tests) ---------------------------------

// Increment covariance array c[lag] for one coordinate on an L-cell mesh of
// [0, delta], lag = 0..L-1.
std::vector<double> mesh_increment_covariances(const FouCovariance& cov, double delta, long L,
                                               int threads = 1);

// Weighted simplex sums over 1 <= k1 <= k2 <= k3 <= k4 <= L with
// 1/(run length)! weights; a and b are the lag-covariance arrays of the two
// Wick pairs.
double wick4_adjacent(const std::vector<double>& a, const std::vector<double>& b, long L);
double wick4_alternating(const std::vector<double>& a, const std::vector<double>& b, long L);
double wick4_nested(const std::vector<double>& a, const std::vector<double>& b, long L);

// Regularized pairing integrals (coordinates a, b are covariance engines).
double pairing1(const FouCovariance& a, const FouCovariance& b, double delta, double tol);
double pairing2(const FouCovariance& a, const FouCovariance& b, double delta, double tol);
double pairing3(const FouCovariance& a, const FouCovariance& b, double delta, double tol);

}  // namespace sigest
