#include "sigest/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace sigest::quad {

double gk(const std::function<double(double)>& f, double a, double b, double rel_tol,
          int max_depth) {
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, static_cast<unsigned>(max_depth), rel_tol);
}

double ts(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, a, b, tol);
}

double crvz(const double* a, int n) {
    double d = std::pow(3.0 + std::sqrt(8.0), n);
    d = (d + 1.0 / d) / 2.0;
    double b = -1.0, c = -d, s = 0.0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        s += c * a[k];
        b *= (static_cast<double>(k) + n) * (static_cast<double>(k) - n) /
             ((k + 0.5) * (k + 1.0));
    }
    return s / d;
}

double accelerated_lobe_sum(const std::function<double(int)>& lobe, double abs_tol,
                            int max_lobes, const char* what) {
    std::vector<double> terms;
    terms.reserve(32);

    // Once individual lobes are far below tolerance, their alternating
    // remainder is bounded by the first omitted term.
    auto direct_done = [&](double t) { return std::abs(t) < 0.02 * abs_tol; };

    double prev_est = 0.0;
    bool have_prev = false;
    for (int block = 0;; ++block) {
        const int target = 6 + 4 * block;
        while (static_cast<int>(terms.size()) < target) {
            if (static_cast<int>(terms.size()) >= max_lobes)
                throw NumericError(std::string(what) +
                                   ": oscillatory tail did not converge within " +
                                   std::to_string(max_lobes) + " lobes (abs_tol=" +
                                   std::to_string(abs_tol) + ")");
            double t = lobe(static_cast<int>(terms.size()));
            terms.push_back(t);
            if (direct_done(t)) {
                double s = 0.0;
                for (double x : terms) s += x;
                return s;
            }
        }
        // crvz expects strictly alternating positive magnitudes; truncate at
        // the first sign irregularity (only ever seen at negligible sizes).
        const double s0 = terms[0] >= 0.0 ? 1.0 : -1.0;
        std::vector<double> mags;
        mags.reserve(terms.size());
        for (std::size_t j = 0; j < terms.size(); ++j) {
            const double expect = (j % 2 == 0) ? s0 : -s0;
            if (terms[j] * expect <= 0.0) break;
            mags.push_back(std::abs(terms[j]));
        }
        if (mags.size() < 4) {
            double s = 0.0;
            for (double x : terms) s += x;
            if (std::abs(terms.back()) < abs_tol) return s;
            throw NumericError(std::string(what) + ": tail lobes are not alternating");
        }
        const double est = s0 * crvz(mags.data(), static_cast<int>(mags.size()));
        if (have_prev && std::abs(est - prev_est) < abs_tol) return est;
        prev_est = est;
        have_prev = true;
    }
}

}  // namespace sigest::quad
