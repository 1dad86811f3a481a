#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sigest/fou.hpp"

namespace sigest {

// One simulation campaign: process parameters, block geometry, and the master
// seed from which all replication streams derive.
struct SimSpec {
    FouParams fou;
    long K = 1;           // blocks
    long n = 2;           // points per block
    std::uint64_t master_seed = 0;

    std::size_t grid_points() const {
        return static_cast<std::size_t>(K) * static_cast<std::size_t>(n - 1) + 1;
    }
    double grid_h() const { return fou.delta / static_cast<double>(n - 1); }
    void validate() const;
};

// K*(n-1)+1 equally spaced observations of a d-coordinate path, row-major
// (point, coordinate); block k of n points starts at index (k-1)(n-1), so
// adjacent blocks share an endpoint.
struct SampledPath {
    long K = 0;
    long n = 0;
    int d = 0;
    double h = 0.0;
    std::vector<double> data;

    std::size_t points() const { return data.size() / static_cast<std::size_t>(d); }
    double value(std::size_t t, int i) const {
        return data[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
    }
    const double* block(long k) const {  // k in [0, K)
        return data.data() +
               static_cast<std::size_t>(k) * static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(d);
    }
};

// Eigenvalues of the 2(L-1)-circulant embedding of the Toeplitz covariance
// with first column r(0..L-1), computed by one real FFT (DCT-I).  Throws
// EmbeddingError when the minimum eigenvalue falls below -1e-9 * r0; values
// in [-1e-9 * r0, 0) are clipped to zero.
struct EmbeddingSpectrum {
    std::vector<double> eigenvalues;  // the L distinct values, k = 0..L-1
    double min_eigenvalue = 0.0;      // pre-clip diagnostic
    std::size_t circulant_size = 0;   // 2(L-1)
};

EmbeddingSpectrum embedding_spectrum(std::span<const double> r);

// Exact stationary Gaussian path sampler: one circulant embedding per
// SimSpec covering the whole K(n-1)+1 grid (cross-block dependence
// preserved), then one inverse FFT per (replication, coordinate).  The
// covariance table and spectrum are built once and shared read-only;
// sample() is safe to call concurrently.
class FouSampler {
  public:
    FouSampler(const SimSpec& spec, int threads, double quad_tol = 1e-10);
    ~FouSampler();

    FouSampler(const FouSampler&) = delete;
    FouSampler& operator=(const FouSampler&) = delete;

    SampledPath sample(long replication) const;

    const CovarianceTable& covariance() const { return table_; }
    const EmbeddingSpectrum& spectrum(int coord) const {
        return spectra_[static_cast<std::size_t>(coord)];
    }
    std::size_t fft_size() const { return fft_size_; }

  private:
    SimSpec spec_;
    CovarianceTable table_;
    std::vector<EmbeddingSpectrum> spectra_;  // per coordinate
    std::size_t fft_size_ = 0;                // 2G, highly composite
    struct Plan;
    std::unique_ptr<Plan> plan_;
};

// Smallest 2^a 3^b 5^c 7^d >= x.
std::size_t next_fast_fft_size(std::size_t x);

}  // namespace sigest
