#include "sigest/tensor.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace sigest {

std::vector<Word> enumerate_words(int d, int M) {
    if (d < 1) throw DomainError("enumerate_words: d must be >= 1");
    if (M < 0) throw DomainError("enumerate_words: M must be >= 0");
    std::vector<Word> out;
    out.reserve(tensor_dim(d, M));
    for (int m = 0; m <= M; ++m) {
        const std::size_t count = level_size(d, m);
        for (std::size_t k = 0; k < count; ++k) out.push_back(word_at(d, m, k));
    }
    return out;
}

std::string word_label(const Word& w) {
    if (w.empty()) return "e";
    std::string s;
    for (int l : w.letters) s += std::to_string(l);
    return s;
}

TruncatedTensor& TruncatedTensor::operator+=(const TruncatedTensor& o) {
    if (!same_shape(o)) throw ShapeError("tensor +=: shape mismatch");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

TruncatedTensor& TruncatedTensor::operator-=(const TruncatedTensor& o) {
    if (!same_shape(o)) throw ShapeError("tensor -=: shape mismatch");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

TruncatedTensor& TruncatedTensor::operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
}

void tensor_mul_into(const TruncatedTensor& a, const TruncatedTensor& b, TruncatedTensor& out) {
    if (!a.same_shape(b)) throw ShapeError("tensor_mul: shape mismatch between operands");
    if (!a.same_shape(out)) throw ShapeError("tensor_mul: output shape mismatch");
    const int d = a.d();
    const int M = a.truncation();

    for (double& x : out.coeffs()) x = 0.0;
    // Coefficient of word w in a(x)b is the sum over splittings w = u.v of
    // a[u]*b[v].  In the level-blocked layout, the in-level index of w with
    // |u| = p, |v| = q is idx(u)*d^q + idx(v).
    for (int m = 0; m <= M; ++m) {
        auto om = out.level(m);
        for (int p = 0; p <= m; ++p) {
            const int q = m - p;
            auto ap = a.level(p);
            auto bq = b.level(q);
            const std::size_t dq = level_size(d, q);
            for (std::size_t i = 0; i < ap.size(); ++i) {
                const double ai = ap[i];
                if (ai == 0.0) continue;
                double* dst = om.data() + i * dq;
                for (std::size_t j = 0; j < dq; ++j) dst[j] += ai * bq[j];
            }
        }
    }
}

TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b) {
    TruncatedTensor out(a.d(), a.truncation());
    tensor_mul_into(a, b, out);
    return out;
}

double hs_inner(const TruncatedTensor& a, const TruncatedTensor& b) {
    if (!a.same_shape(b)) throw ShapeError("hs_inner: shape mismatch");
    double s = 0.0;
    auto ca = a.coeffs();
    auto cb = b.coeffs();
    for (std::size_t i = 0; i < ca.size(); ++i) s += ca[i] * cb[i];
    return s;
}

double hs_level_sq(const TruncatedTensor& a, int m) {
    double s = 0.0;
    for (double x : a.level(m)) s += x * x;
    return s;
}

namespace {

void shuffle_rec(const Word& u, const Word& v, std::size_t iu, std::size_t iv,
                 std::vector<int>& scratch, int d, TruncatedTensor& acc) {
    if (iu == u.letters.size() && iv == v.letters.size()) {
        acc.at(Word(scratch)) += 1.0;
        return;
    }
    if (iu < u.letters.size()) {
        scratch.push_back(u.letters[iu]);
        shuffle_rec(u, v, iu + 1, iv, scratch, d, acc);
        scratch.pop_back();
    }
    if (iv < v.letters.size()) {
        scratch.push_back(v.letters[iv]);
        shuffle_rec(u, v, iu, iv + 1, scratch, d, acc);
        scratch.pop_back();
    }
}

}  // namespace

TruncatedTensor shuffle(const Word& u, const Word& v, int d, int M) {
    if (u.length() + v.length() > M)
        throw TruncationError("shuffle: |u| + |v| exceeds the truncation level");
    TruncatedTensor acc(d, M);
    std::vector<int> scratch;
    scratch.reserve(static_cast<std::size_t>(u.length() + v.length()));
    shuffle_rec(u, v, 0, 0, scratch, d, acc);
    return acc;
}

std::string tensor_csv(const TruncatedTensor& t) {
    std::string header;
    std::string row;
    const auto words = enumerate_words(t.d(), t.truncation());
    char buf[40];
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) {
            header += ',';
            row += ',';
        }
        header += word_label(words[i]);
        std::snprintf(buf, sizeof buf, "%.17g", t[i]);
        row += buf;
    }
    return header + "\n" + row + "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

TruncatedTensor tensor_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string header, row;
    if (!std::getline(in, header) || !std::getline(in, row))
        throw DataError("tensor_from_csv: expected a header and a coefficient row");
    const auto labels = split_csv_line(header);
    const auto values = split_csv_line(row);
    if (labels.size() != values.size())
        throw DataError("tensor_from_csv: header/row column count mismatch");

    // Infer (d, M) from the label set: d = number of length-1 labels, M = max length.
    int d = 0, M = 0;
    for (const auto& l : labels) {
        if (l == "e") continue;
        if (l.size() == 1) ++d;
        M = std::max<int>(M, static_cast<int>(l.size()));
    }
    if (d == 0) throw DataError("tensor_from_csv: no level-1 columns found");
    TruncatedTensor t(d, M);
    if (labels.size() != t.size()) throw DataError("tensor_from_csv: column count does not match (d, M)");
    for (std::size_t i = 0; i < values.size(); ++i) {
        double x = 0.0;
        const auto& s = values[i];
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc() || p != s.data() + s.size())
            throw DataError("tensor_from_csv: bad numeric field '" + s + "'");
        t[i] = x;
    }
    return t;
}

}  // namespace sigest
