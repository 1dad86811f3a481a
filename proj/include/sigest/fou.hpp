#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sigest/errors.hpp"

namespace sigest {

// Parameters of a d-coordinate stationary fractional Ornstein-Uhlenbeck
// process with independent coordinates and zero mean, plus the block length
// used by the estimation pipeline.
struct FouParams {
    double H = 0.5;               // Hurst, in (1/4, 1)
    std::vector<double> theta;    // per-coordinate mean reversion, > 0
    std::vector<double> sigma;    // per-coordinate volatility, > 0
    int d = 1;
    double delta = 1.0;           // block length, > 0

    void validate() const;

    static FouParams uniform(double H, double theta, double sigma, int d, double delta);
};

// Scalar stationary fOU covariance engine for one coordinate.
//
// R(tau) = 2 zeta * int_0^inf cos(lambda tau) f(lambda) dlambda,
// f(lambda) = lambda^{1-2H} / (theta^2 + lambda^2),
// zeta = sigma^2 Gamma(2H+1) sin(pi H) / (2 pi), so that
// R(0) = sigma^2 Gamma(2H+1) / (2 theta^{2H}).
//
// Evaluation strategy: closed forms at H = 1/2; a local expansion for tiny
// tau; the split oscillatory quadrature (adaptive head, zero-to-zero lobes
// with series acceleration) for moderate tau; and the Watson large-tau
// expansion once theta*tau is large enough for it to beat the tolerance.
class FouCovariance {
  public:
    FouCovariance(double H, double theta, double sigma, double quad_tol = 1e-10);

    double H() const { return H_; }
    double theta() const { return theta_; }
    double sigma() const { return sigma_; }
    double quad_tol() const { return quad_tol_; }

    // sigma^2 Gamma(2H+1) / (2 theta^{2H})
    double variance() const { return r0_; }
    // sigma^2 Gamma(2H+1) sin(pi H) / (2 pi)
    double zeta() const { return zeta_; }

    double R(double tau) const;
    double Rprime(double tau) const;

    // R(0) - R(tau), computed through the (1 - cos) spectral integral to
    // avoid cancellation at small tau.
    double D(double tau) const;

    // Cov(X_{(a+1)h} - X_{ah}, X_{(b+1)h} - X_{bh}) with lag = b - a >= 0.
    double increment_cov(double h, long lag) const;

    // Quadrature-only evaluation paths (no H = 1/2 closed-form dispatch, no
    // small/large-tau expansions).  Used by the verification suite.
    double R_spectral(double tau) const;
    double Rprime_spectral(double tau) const;

    // int_0^inf f(lambda) dlambda, computed numerically.  Test oracle for the
    // closed-form zeta.
    double spectral_density_integral() const;

  private:
    double H_, theta_, sigma_, quad_tol_;
    double r0_, zeta_;
    double tau_series_;  // below: local expansion
    double tau_asym_;    // above: Watson expansion

    double cos_integral(double tau) const;        // int f cos
    double one_minus_cos_integral(double tau) const;
    double sin_integral(double tau) const;        // int lambda f sin
    double tail_f_series(double from) const;      // int_from^inf f, from > theta
    bool asym_R(double tau, double& out) const;
    bool asym_Rprime(double tau, double& out) const;
};

// Per-coordinate covariance model for a FouParams set.
class FouCovarianceSet {
  public:
    explicit FouCovarianceSet(const FouParams& p, double quad_tol = 1e-10);
    const FouCovariance& coord(int i) const { return coords_.at(static_cast<std::size_t>(i)); }
    int d() const { return static_cast<int>(coords_.size()); }

  private:
    std::vector<FouCovariance> coords_;
};

// --- spec-level operations -------------------------------------------------

double stationary_variance(const FouParams& p, int i);
double autocovariance(const FouParams& p, int i, double tau);
double autocov_derivative(const FouParams& p, int i, double tau);
double increment_covariance(const FouParams& p, int i, double h, long lag);

// Generic second difference of an autocovariance function; shared by the fOU
// path above and usable with synthetic kernels in tests.
double increment_cov_from_R(const std::function<double(double)>& R, double h, long lag);

struct TheoryExponents {
    double gamma;     // discretization-bias rate, min(4H-1, 2H)
    double eta;       // fluctuation-variance rate
    double nu;        // covariance-decay exponent 2 - 2H
    double combined;  // gamma * eta / (gamma + eta)
};

TheoryExponents theory_exponents(double H);

struct Allocation {
    long n_star;
    long K_star;
};

// n* = ceil(N^{eta/(gamma+eta)}) clamped to >= 2; K* = floor(N/n*) clamped to >= 1.
Allocation optimal_allocation(double N, double gamma, double eta);

// Memoized grid covariances R(lag * h) for every coordinate, built once per
// simulation spec and then shared read-only.
class CovarianceTable {
  public:
    CovarianceTable() = default;
    CovarianceTable(const FouParams& p, double h, std::size_t lags, int threads,
                    double quad_tol = 1e-10);

    double h() const { return h_; }
    std::size_t lags() const { return lags_; }
    double quad_tol() const { return quad_tol_; }
    double at(int coord, std::size_t lag) const {
        return values_[static_cast<std::size_t>(coord) * lags_ + lag];
    }
    const double* row(int coord) const {
        return values_.data() + static_cast<std::size_t>(coord) * lags_;
    }
    int d() const { return d_; }

    // Extends the table in place to at least `lags` lags (used by embedding
    // retries).  Not thread-safe; call before sharing.
    void extend(const FouParams& p, std::size_t lags, int threads);

    std::string csv() const;  // columns: lag, tau, R1..Rd

  private:
    double h_ = 0.0;
    std::size_t lags_ = 0;
    int d_ = 0;
    double quad_tol_ = 0.0;
    std::vector<double> values_;  // d x lags, row-major
};

}  // namespace sigest
