#include "sigest/davies_harte.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "sigest/parallel.hpp"
#include "sigest/rng.hpp"

namespace sigest {

namespace {
// FFTW plan creation is not thread-safe; execution on distinct arrays is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

void SimSpec::validate() const {
    fou.validate();
    if (n < 2) throw DomainError("SimSpec: n must be >= 2");
    if (K < 1) throw DomainError("SimSpec: K must be >= 1");
}

std::size_t next_fast_fft_size(std::size_t x) {
    if (x <= 2) return 2;
    for (std::size_t s = x;; ++s) {
        std::size_t r = s;
        for (std::size_t p : {2UL, 3UL, 5UL, 7UL})
            while (r % p == 0) r /= p;
        if (r == 1) return s;
    }
}

EmbeddingSpectrum embedding_spectrum(std::span<const double> r) {
    const std::size_t L = r.size();
    if (L < 2) throw DomainError("embedding_spectrum: need at least 2 lags");
    const double r0 = r[0];

    // DCT-I of r gives the distinct eigenvalues of the symmetric circulant:
    // lambda_k = r_0 + (-1)^k r_{L-1} + 2 sum_{j=1}^{L-2} r_j cos(pi j k / (L-1)).
    EmbeddingSpectrum out;
    out.circulant_size = 2 * (L - 1);
    out.eigenvalues.resize(L);
    {
        std::vector<double> in(r.begin(), r.end());
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(L), in.data(), out.eigenvalues.data(),
                                          FFTW_REDFT00, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    double min_eig = out.eigenvalues[0];
    for (double v : out.eigenvalues) min_eig = std::min(min_eig, v);
    out.min_eigenvalue = min_eig;

    const double clip = -1e-9 * r0;
    if (min_eig < clip)
        throw EmbeddingError("circulant embedding failed: min eigenvalue " +
                                 std::to_string(min_eig) + " < " + std::to_string(clip) +
                                 " (= -1e-9 * r0)",
                             min_eig);
    for (double& v : out.eigenvalues)
        if (v < 0.0) v = 0.0;
    return out;
}

struct FouSampler::Plan {
    fftw_plan c2r = nullptr;
    std::size_t n_complex = 0;
    ~Plan() {
        if (c2r) {
            std::lock_guard<std::mutex> lock(fftw_mutex());
            fftw_destroy_plan(c2r);
        }
    }
};

FouSampler::FouSampler(const SimSpec& spec, int threads, double quad_tol) : spec_(spec) {
    spec_.validate();
    const std::size_t npts = spec_.grid_points();
    const double h = spec_.grid_h();

    // Embedding length: smallest highly composite 2G >= 2(npts - 1); padding
    // lags carry the true covariance.  On failure retry with doubled G, up to
    // 8x the minimum.
    std::size_t G = next_fast_fft_size(std::max<std::size_t>(npts - 1, 2));
    if (G % 2 != 0) G = next_fast_fft_size(G + 1);
    const std::size_t G_min = G;
    std::string last_error;
    for (;;) {
        if (table_.h() == 0.0)
            table_ = CovarianceTable(spec_.fou, h, G + 1, threads, quad_tol);
        else
            table_.extend(spec_.fou, G + 1, threads);
        spectra_.clear();
        bool ok = true;
        for (int i = 0; i < spec_.fou.d; ++i) {
            try {
                spectra_.push_back(
                    embedding_spectrum(std::span<const double>(table_.row(i), G + 1)));
            } catch (const EmbeddingError& e) {
                ok = false;
                last_error = e.what();
                break;
            }
        }
        if (ok) break;
        if (G >= 8 * G_min)
            throw SimulationError("embedding failed up to 8x the minimal length: " + last_error);
        G = next_fast_fft_size(2 * G);
    }
    fft_size_ = 2 * G;

    plan_ = std::make_unique<Plan>();
    plan_->n_complex = G + 1;
    {
        std::vector<std::complex<double>> in(plan_->n_complex);
        std::vector<double> out(fft_size_);
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan_->c2r = fftw_plan_dft_c2r_1d(static_cast<int>(fft_size_),
                                          reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                                          FFTW_ESTIMATE);
    }
}

FouSampler::~FouSampler() = default;

SampledPath FouSampler::sample(long replication) const {
    const std::size_t npts = spec_.grid_points();
    const std::size_t G = fft_size_ / 2;
    const int d = spec_.fou.d;

    SampledPath path;
    path.K = spec_.K;
    path.n = spec_.n;
    path.d = d;
    path.h = spec_.grid_h();
    path.data.resize(npts * static_cast<std::size_t>(d));

    std::vector<std::complex<double>> spec_in(plan_->n_complex);
    std::vector<double> out(fft_size_);
    const double norm = 1.0 / std::sqrt(static_cast<double>(fft_size_));

    for (int i = 0; i < d; ++i) {
        const auto& lam = spectra_[static_cast<std::size_t>(i)].eigenvalues;
        NormalStream rng(stream_seed(spec_.master_seed, static_cast<std::uint64_t>(replication),
                                     static_cast<std::uint64_t>(i)));
        // Hermitian half-spectrum: a_0, a_G real; a_k complex for 0 < k < G.
        spec_in[0] = {std::sqrt(lam[0]) * rng.next_normal(), 0.0};
        for (std::size_t k = 1; k < G; ++k) {
            const double s = std::sqrt(0.5 * lam[k]);
            const double re = s * rng.next_normal();
            const double im = s * rng.next_normal();
            spec_in[k] = {re, im};
        }
        spec_in[G] = {std::sqrt(lam[G]) * rng.next_normal(), 0.0};

        fftw_execute_dft_c2r(plan_->c2r, reinterpret_cast<fftw_complex*>(spec_in.data()),
                             out.data());

        double* dst = path.data.data();
        for (std::size_t t = 0; t < npts; ++t)
            dst[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] = out[t] * norm;
    }
    return path;
}

}  // namespace sigest
