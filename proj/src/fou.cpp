#include "sigest/fou.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "sigest/parallel.hpp"
#include "sigest/quadrature.hpp"

namespace sigest {

namespace {
constexpr double kPi = std::numbers::pi;
}

void FouParams::validate() const {
    if (!(H > 0.25 && H < 1.0)) throw DomainError("FouParams: H must lie in (1/4, 1)");
    if (d < 1) throw DomainError("FouParams: d must be >= 1");
    if (static_cast<int>(theta.size()) != d || static_cast<int>(sigma.size()) != d)
        throw ShapeError("FouParams: theta/sigma must have d entries");
    for (double t : theta)
        if (!(t > 0.0)) throw DomainError("FouParams: theta must be > 0");
    for (double s : sigma)
        if (!(s > 0.0)) throw DomainError("FouParams: sigma must be > 0");
    if (!(delta > 0.0)) throw DomainError("FouParams: delta must be > 0");
}

FouParams FouParams::uniform(double H, double theta, double sigma, int d, double delta) {
    FouParams p;
    p.H = H;
    p.d = d;
    p.delta = delta;
    p.theta.assign(static_cast<std::size_t>(d), theta);
    p.sigma.assign(static_cast<std::size_t>(d), sigma);
    p.validate();
    return p;
}

FouCovariance::FouCovariance(double H, double theta, double sigma, double quad_tol)
    : H_(H), theta_(theta), sigma_(sigma), quad_tol_(quad_tol) {
    if (!(H > 0.0 && H < 1.0)) throw DomainError("FouCovariance: H must lie in (0, 1)");
    if (!(theta > 0.0) || !(sigma > 0.0)) throw DomainError("FouCovariance: theta, sigma > 0");
    r0_ = sigma_ * sigma_ * std::tgamma(2.0 * H_ + 1.0) / (2.0 * std::pow(theta_, 2.0 * H_));
    zeta_ = sigma_ * sigma_ * std::tgamma(2.0 * H_ + 1.0) * std::sin(kPi * H_) / (2.0 * kPi);
    tau_series_ = 1e-5 / std::max(1.0, theta_);
    tau_asym_ = 25.0 / theta_;
}

// ---------------------------------------------------------------------------
// Spectral quadrature: split int_0^inf at the first cosine (resp. sine) zero
// past max(c * theta, pi / tau); head by tanh-sinh plus adaptive
// Gauss-Kronrod, tail lobe-by-lobe with series acceleration.
// ---------------------------------------------------------------------------

namespace {

struct SplitSpec {
    double first_zero;   // z_0 (cos) or z_1 (sin)
    double split;        // zero of the oscillator where the tail starts
    double zero_spacing; // pi / tau
    double zero_origin;  // z_k = zero_origin + k * zero_spacing
};

// cos(lambda tau) zeros: (k + 1/2) pi / tau.  sin: k pi / tau.
SplitSpec make_split(double tau, double theta_min_scale, bool cosine) {
    SplitSpec s;
    s.zero_spacing = kPi / tau;
    s.zero_origin = cosine ? 0.5 * s.zero_spacing : s.zero_spacing;
    s.first_zero = s.zero_origin;
    const double want = std::max(theta_min_scale, kPi / tau);
    const double k = std::ceil((want - s.zero_origin) / s.zero_spacing);
    s.split = s.zero_origin + std::max(0.0, k) * s.zero_spacing;
    return s;
}

double head_plus_tail(const std::function<double(double)>& integrand, const SplitSpec& sp,
                      double rel_tol, double abs_tol, const char* what) {
    const double head_ts = quad::ts(integrand, 0.0, sp.first_zero, 1e-11);
    double head_gk = 0.0;
    if (sp.split > sp.first_zero)
        head_gk = quad::gk(integrand, sp.first_zero, sp.split, rel_tol, 17);
    auto lobe = [&](int j) {
        const double a = sp.split + j * sp.zero_spacing;
        return quad::gk(integrand, a, a + sp.zero_spacing, 1e-12, 4);
    };
    const double tail = quad::accelerated_lobe_sum(lobe, abs_tol, 400, what);
    return head_ts + head_gk + tail;
}

}  // namespace

double FouCovariance::cos_integral(double tau) const {
    const double t2 = theta_ * theta_;
    const double e = 1.0 - 2.0 * H_;
    auto f = [&](double l) { return std::pow(l, e) / (t2 + l * l) * std::cos(l * tau); };
    const SplitSpec sp = make_split(tau, 2.0 * theta_, true);
    const double abs_tol = 0.1 * quad_tol_ * r0_ / std::max(2.0 * zeta_, 1e-300);
    return head_plus_tail(f, sp, quad_tol_, abs_tol, "fOU R quadrature");
}

double FouCovariance::one_minus_cos_integral(double tau) const {
    const double t2 = theta_ * theta_;
    const double e = 1.0 - 2.0 * H_;
    auto f_flat = [&](double l) { return std::pow(l, e) / (t2 + l * l); };
    auto f_head = [&](double l) {
        const double x = l * tau;
        // 1 - cos(x), stable for small x
        const double omc = (x < 1e-4) ? 0.5 * x * x * (1.0 - x * x / 12.0)
                                      : 1.0 - std::cos(x);
        return f_flat(l) * omc;
    };
    const SplitSpec sp = make_split(tau, 2.0 * theta_, true);
    const double abs_tol = 0.1 * quad_tol_ * r0_ / std::max(2.0 * zeta_, 1e-300);

    const double head_ts = quad::ts(f_head, 0.0, sp.first_zero, 1e-11);
    double head_gk = 0.0;
    if (sp.split > sp.first_zero) head_gk = quad::gk(f_head, sp.first_zero, sp.split, quad_tol_, 17);
    // Beyond the split: int f - int f cos.
    const double flat_tail = quad::gk(f_flat, sp.split, std::max(4.0 * theta_, 2.0 * sp.split),
                                      1e-12, 12) +
                             tail_f_series(std::max(4.0 * theta_, 2.0 * sp.split));
    auto lobe = [&](int j) {
        const double a = sp.split + j * sp.zero_spacing;
        auto f_cos = [&](double l) { return f_flat(l) * std::cos(l * tau); };
        return quad::gk(f_cos, a, a + sp.zero_spacing, 1e-12, 4);
    };
    const double cos_tail = quad::accelerated_lobe_sum(lobe, abs_tol, 400, "fOU D quadrature");
    return head_ts + head_gk + flat_tail - cos_tail;
}

double FouCovariance::sin_integral(double tau) const {
    const double t2 = theta_ * theta_;
    const double e = 2.0 - 2.0 * H_;
    auto f = [&](double l) { return std::pow(l, e) / (t2 + l * l) * std::sin(l * tau); };
    // lambda f(lambda) is monotone decreasing past theta * sqrt((1-H)/H).
    const double mono = theta_ * std::sqrt(std::max(1.0, (1.0 - H_) / H_));
    const SplitSpec sp = make_split(tau, 2.0 * mono, false);
    const double abs_tol = 0.1 * quad_tol_ * theta_ * r0_ / std::max(2.0 * zeta_, 1e-300);
    return head_plus_tail(f, sp, quad_tol_, abs_tol, "fOU R' quadrature");
}

double FouCovariance::tail_f_series(double from) const {
    // int_from^inf lambda^{1-2H} / (theta^2 + lambda^2) dlambda expanded in
    // (theta/from)^2; requires from > theta (callers use from >= 2 theta).
    const double ratio2 = (theta_ / from) * (theta_ / from);
    double term = std::pow(from, -2.0 * H_);
    double sum = 0.0;
    for (int j = 0; j < 60; ++j) {
        const double contrib = term / (2.0 * H_ + 2.0 * j);
        sum += (j % 2 == 0) ? contrib : -contrib;
        term *= ratio2;
        if (term / (2.0 * H_ + 2.0 * j + 2.0) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

namespace {

// Shared driver for the Watson large-tau expansions.  Accumulates
// pref * sum_j term(j) until the terms stop decreasing (asymptotic divergence
// onset) or fall below the tolerance; succeeds only when the truncation error
// plus the exponentially small pole contribution clears abs_tol.  The
// (-1)^j of the spectral-density expansion cancels against the phase of the
// cosine transform, so the terms carry no extra alternation.
bool watson_sum(const std::function<double(int)>& term, double pref, double pole_part,
                double abs_tol, double& out) {
    double sum = 0.0;
    double last = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int j = 0; j < 40; ++j) {
        const double t = term(j);
        if (std::abs(t) >= last) break;
        sum += t;
        last = std::abs(t);
        if (std::abs(pref) * last < 0.25 * abs_tol) {
            converged = true;
            break;
        }
    }
    const bool exp_only = std::abs(pref) < 1e-300 && pole_part < abs_tol;
    if (!exp_only && !(converged && std::abs(pref) * last + pole_part < abs_tol)) return false;
    out = pref * sum;
    return true;
}

}  // namespace

bool FouCovariance::asym_R(double tau, double& out) const {
    // Watson expansion of the cosine transform around lambda = 0:
    // R(tau) ~ -2 zeta cos(pi H) sum_j (-1)^j Gamma(2-2H+2j) theta^{-2j-2} tau^{2H-2-2j}.
    const double pref = -2.0 * zeta_ * std::cos(kPi * H_);
    auto term = [&](int j) {
        return std::tgamma(2.0 - 2.0 * H_ + 2.0 * j) * std::pow(theta_, -2.0 - 2.0 * j) *
               std::pow(tau, 2.0 * H_ - 2.0 - 2.0 * j);
    };
    return watson_sum(term, pref, r0_ * std::exp(-theta_ * tau), quad_tol_ * r0_, out);
}

bool FouCovariance::asym_Rprime(double tau, double& out) const {
    const double pref = -2.0 * zeta_ * std::cos(kPi * H_);
    auto term = [&](int j) {
        return std::tgamma(2.0 - 2.0 * H_ + 2.0 * j) * (2.0 * H_ - 2.0 - 2.0 * j) *
               std::pow(theta_, -2.0 - 2.0 * j) * std::pow(tau, 2.0 * H_ - 3.0 - 2.0 * j);
    };
    return watson_sum(term, pref, theta_ * r0_ * std::exp(-theta_ * tau),
                      quad_tol_ * theta_ * r0_, out);
}

double FouCovariance::D(double tau) const {
    if (tau < 0.0) tau = -tau;
    if (tau == 0.0) return 0.0;
    if (H_ == 0.5) return r0_ * (1.0 - std::exp(-theta_ * tau));
    if (tau < tau_series_) {
        // R(0) - R(tau) = (sigma^2/2) tau^{2H}
        //                 - (sigma^2 Gamma(2H+1) theta^{2-2H}/4) tau^2 + O(tau^{2+2H})
        const double s2 = sigma_ * sigma_;
        return 0.5 * s2 * std::pow(tau, 2.0 * H_) -
               0.25 * s2 * std::tgamma(2.0 * H_ + 1.0) * std::pow(theta_, 2.0 - 2.0 * H_) * tau * tau;
    }
    if (tau >= tau_asym_) {
        double r;
        if (asym_R(tau, r)) return r0_ - r;
    }
    return 2.0 * zeta_ * one_minus_cos_integral(tau);
}

double FouCovariance::R(double tau) const {
    if (tau < 0.0) tau = -tau;
    if (H_ == 0.5) return r0_ * std::exp(-theta_ * tau);
    if (tau == 0.0) return r0_;
    if (tau < tau_series_) return r0_ - D(tau);
    if (tau >= tau_asym_) {
        double r;
        if (asym_R(tau, r)) return r;
    }
    return 2.0 * zeta_ * cos_integral(tau);
}

double FouCovariance::Rprime(double tau) const {
    if (tau < 0.0) throw DomainError("autocov_derivative: tau must be > 0");
    if (tau == 0.0) {
        if (H_ > 0.5) return 0.0;  // R'(0+) = 0 in the long-range regime
        throw DomainError("autocov_derivative: derivative singular or nonzero at tau = 0 for H <= 1/2");
    }
    if (H_ == 0.5) return -0.5 * sigma_ * sigma_ * std::exp(-theta_ * tau);
    if (tau < tau_series_) {
        const double s2 = sigma_ * sigma_;
        return -H_ * s2 * std::pow(tau, 2.0 * H_ - 1.0) +
               0.5 * s2 * std::tgamma(2.0 * H_ + 1.0) * std::pow(theta_, 2.0 - 2.0 * H_) * tau;
    }
    if (tau >= tau_asym_) {
        double r;
        if (asym_Rprime(tau, r)) return r;
    }
    return -2.0 * zeta_ * sin_integral(tau);
}

double FouCovariance::R_spectral(double tau) const {
    if (tau < 0.0) tau = -tau;
    if (tau == 0.0) return 2.0 * zeta_ * spectral_density_integral();
    return 2.0 * zeta_ * cos_integral(tau);
}

double FouCovariance::Rprime_spectral(double tau) const {
    if (!(tau > 0.0)) throw DomainError("Rprime_spectral: tau must be > 0");
    return -2.0 * zeta_ * sin_integral(tau);
}

double FouCovariance::spectral_density_integral() const {
    const double t2 = theta_ * theta_;
    const double e = 1.0 - 2.0 * H_;
    auto f = [&](double l) { return std::pow(l, e) / (t2 + l * l); };
    const double mid = 4.0 * theta_;
    return quad::ts(f, 0.0, theta_, 1e-13) + quad::gk(f, theta_, mid, 1e-13, 12) +
           tail_f_series(mid);
}

double FouCovariance::increment_cov(double h, long lag) const {
    if (!(h > 0.0)) throw DomainError("increment_cov: h must be > 0");
    if (lag < 0) lag = -lag;
    if (lag == 0) return 2.0 * D(h);
    // 2R(kh) - R((k-1)h) - R((k+1)h) = D((k+1)h) + D((k-1)h) - 2 D(kh)
    return D((lag + 1) * h) + D((lag - 1) * h) - 2.0 * D(lag * h);
}

FouCovarianceSet::FouCovarianceSet(const FouParams& p, double quad_tol) {
    p.validate();
    coords_.reserve(static_cast<std::size_t>(p.d));
    for (int i = 0; i < p.d; ++i)
        coords_.emplace_back(p.H, p.theta[static_cast<std::size_t>(i)],
                             p.sigma[static_cast<std::size_t>(i)], quad_tol);
}

double stationary_variance(const FouParams& p, int i) {
    p.validate();
    return FouCovariance(p.H, p.theta.at(static_cast<std::size_t>(i)),
                         p.sigma.at(static_cast<std::size_t>(i)))
        .variance();
}

double autocovariance(const FouParams& p, int i, double tau) {
    p.validate();
    if (tau < 0.0) throw DomainError("autocovariance: tau must be >= 0");
    return FouCovariance(p.H, p.theta.at(static_cast<std::size_t>(i)),
                         p.sigma.at(static_cast<std::size_t>(i)))
        .R(tau);
}

double autocov_derivative(const FouParams& p, int i, double tau) {
    p.validate();
    return FouCovariance(p.H, p.theta.at(static_cast<std::size_t>(i)),
                         p.sigma.at(static_cast<std::size_t>(i)))
        .Rprime(tau);
}

double increment_covariance(const FouParams& p, int i, double h, long lag) {
    p.validate();
    return FouCovariance(p.H, p.theta.at(static_cast<std::size_t>(i)),
                         p.sigma.at(static_cast<std::size_t>(i)))
        .increment_cov(h, lag);
}

double increment_cov_from_R(const std::function<double(double)>& R, double h, long lag) {
    if (!(h > 0.0)) throw DomainError("increment_cov_from_R: h must be > 0");
    if (lag < 0) lag = -lag;
    return 2.0 * R(lag * h) - R((lag - 1) * h) - R((lag + 1) * h);
}

TheoryExponents theory_exponents(double H) {
    if (!(H > 0.25 && H < 1.0)) throw DomainError("theory_exponents: H must lie in (1/4, 1)");
    TheoryExponents e{};
    e.gamma = std::min(4.0 * H - 1.0, 2.0 * H);
    e.nu = 2.0 - 2.0 * H;
    e.eta = (e.nu > 1.0 || H == 0.5) ? 1.0 : e.nu;
    e.combined = e.gamma * e.eta / (e.gamma + e.eta);
    return e;
}

Allocation optimal_allocation(double N, double gamma, double eta) {
    if (!(N >= 4.0)) throw DomainError("optimal_allocation: N must be >= 4");
    if (!(gamma > 0.0) || !(eta > 0.0)) throw DomainError("optimal_allocation: gamma, eta > 0");
    const double expo = eta / (gamma + eta);
    long n_star = static_cast<long>(std::ceil(std::pow(N, expo)));
    n_star = std::max<long>(n_star, 2);
    long K_star = static_cast<long>(std::floor(N / static_cast<double>(n_star)));
    K_star = std::max<long>(K_star, 1);
    return {n_star, K_star};
}

CovarianceTable::CovarianceTable(const FouParams& p, double h, std::size_t lags, int threads,
                                 double quad_tol)
    : h_(h), lags_(0), d_(p.d), quad_tol_(quad_tol) {
    p.validate();
    if (!(h > 0.0)) throw DomainError("CovarianceTable: h must be > 0");
    extend(p, lags, threads);
}

void CovarianceTable::extend(const FouParams& p, std::size_t lags, int threads) {
    if (lags <= lags_) return;
    const std::size_t old = lags_;
    std::vector<double> next(static_cast<std::size_t>(d_) * lags);
    for (int i = 0; i < d_; ++i) {
        std::copy(values_.begin() + static_cast<long>(i * old),
                  values_.begin() + static_cast<long>(i * old + old),
                  next.begin() + static_cast<long>(static_cast<std::size_t>(i) * lags));
    }
    values_ = std::move(next);
    lags_ = lags;
    for (int i = 0; i < d_; ++i) {
        FouCovariance cov(p.H, p.theta[static_cast<std::size_t>(i)],
                          p.sigma[static_cast<std::size_t>(i)], quad_tol_);
        double* row_i = values_.data() + static_cast<std::size_t>(i) * lags_;
        parallel_for(lags - old, threads,
                     [&](std::size_t j) { row_i[old + j] = cov.R((old + j) * h_); });
    }
}

std::string CovarianceTable::csv() const {
    std::string out = "lag,tau";
    for (int i = 1; i <= d_; ++i) out += ",R" + std::to_string(i);
    out += "\n";
    char buf[48];
    for (std::size_t k = 0; k < lags_; ++k) {
        std::snprintf(buf, sizeof buf, "%zu", k);
        out += buf;
        std::snprintf(buf, sizeof buf, ",%.17g", static_cast<double>(k) * h_);
        out += buf;
        for (int i = 0; i < d_; ++i) {
            std::snprintf(buf, sizeof buf, ",%.17g", at(i, k));
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace sigest
