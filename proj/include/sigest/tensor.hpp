#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sigest/errors.hpp"
#include "sigest/word.hpp"

namespace sigest {

// An element of the degree-M truncated tensor algebra over R^d, stored as a
// dense level-blocked coefficient vector in canonical word order.  Value
// semantics; all operations are pure, so instances can be shared read-only
// across threads.
class TruncatedTensor {
  public:
    TruncatedTensor() : d_(1), M_(0), c_(1, 0.0) {}
    TruncatedTensor(int d, int M) : d_(d), M_(M), c_(tensor_dim(d, M), 0.0) {
        if (d < 1) throw DomainError("alphabet size d must be >= 1");
        if (M < 0) throw DomainError("truncation level M must be >= 0");
    }

    static TruncatedTensor unit(int d, int M) {
        TruncatedTensor t(d, M);
        t.c_[0] = 1.0;
        return t;
    }

    int d() const { return d_; }
    int truncation() const { return M_; }
    std::size_t size() const { return c_.size(); }

    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }

    double at(const Word& w) const { return c_[word_index(w, d_)]; }
    double& at(const Word& w) { return c_[word_index(w, d_)]; }

    std::span<const double> level(int m) const {
        return {c_.data() + level_offset(d_, m), level_size(d_, m)};
    }
    std::span<double> level(int m) {
        return {c_.data() + level_offset(d_, m), level_size(d_, m)};
    }

    std::span<const double> coeffs() const { return c_; }
    std::span<double> coeffs() { return c_; }

    bool same_shape(const TruncatedTensor& o) const { return d_ == o.d_ && M_ == o.M_; }

    TruncatedTensor& operator+=(const TruncatedTensor& o);
    TruncatedTensor& operator-=(const TruncatedTensor& o);
    TruncatedTensor& operator*=(double s);

    friend TruncatedTensor operator+(TruncatedTensor a, const TruncatedTensor& b) { return a += b; }
    friend TruncatedTensor operator-(TruncatedTensor a, const TruncatedTensor& b) { return a -= b; }
    friend TruncatedTensor operator*(TruncatedTensor a, double s) { return a *= s; }
    friend TruncatedTensor operator*(double s, TruncatedTensor a) { return a *= s; }

  private:
    int d_;
    int M_;
    std::vector<double> c_;
};

// out = a (x) b in the truncated algebra; levels above M are discarded.
// out must not alias a or b.
void tensor_mul_into(const TruncatedTensor& a, const TruncatedTensor& b, TruncatedTensor& out);

TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b);

// Hilbert-Schmidt inner product: sum over all words of a[w] * b[w].
double hs_inner(const TruncatedTensor& a, const TruncatedTensor& b);

inline double hs_norm(const TruncatedTensor& a) { return std::sqrt(hs_inner(a, a)); }

// Squared HS norm of the level-m block only.
double hs_level_sq(const TruncatedTensor& a, int m);

// Shuffle product of two words: the formal sum over all interleavings that
// preserve the internal order of u and v, with multiplicity.  The result
// lives in the level-(|u|+|v|) block of a (d, M) tensor.
TruncatedTensor shuffle(const Word& u, const Word& v, int d, int M);

// Serialization: one CSV header row of word labels in canonical order, one
// row of coefficients ("%.17g", so values round-trip exactly).
std::string tensor_csv(const TruncatedTensor& t);
TruncatedTensor tensor_from_csv(const std::string& csv);

}  // namespace sigest
