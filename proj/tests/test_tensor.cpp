#include <doctest.h>

#include <cmath>

#include "sigest/pl_signature.hpp"
#include "sigest/rng.hpp"
#include "sigest/tensor.hpp"

using namespace sigest;

namespace {

TruncatedTensor random_tensor(int d, int M, NormalStream& rng, double scale = 1.0) {
    TruncatedTensor t(d, M);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = scale * (2.0 * rng.next_uniform() - 1.0);
    return t;
}

}  // namespace

TEST_CASE("word enumeration counts and canonical order") {
    const auto w22 = enumerate_words(2, 2);
    REQUIRE(w22.size() == 7);
    CHECK(w22[0] == Word{});
    CHECK(w22[1] == Word{1});
    CHECK(w22[2] == Word{2});
    CHECK(w22[3] == Word{1, 1});
    CHECK(w22[4] == Word{1, 2});
    CHECK(w22[5] == Word{2, 1});
    CHECK(w22[6] == Word{2, 2});

    CHECK(enumerate_words(2, 4).size() == 31);  // dim T^(4)(R^2)
    CHECK(enumerate_words(1, 3).size() == 4);

    // index round trip and stability
    const auto words = enumerate_words(3, 3);
    for (std::size_t i = 0; i < words.size(); ++i) CHECK(word_index(words[i], 3) == i);
}

TEST_CASE("word labels") {
    CHECK(word_label(Word{}) == "e");
    CHECK(word_label(Word{1, 2}) == "12");
}

TEST_CASE("tensor_mul: unit-plus-letter expansion") {
    TruncatedTensor a(2, 2), b(2, 2);
    a[0] = 1.0;
    a.at(Word{1}) = 1.0;  // 1 + e1
    b[0] = 1.0;
    b.at(Word{2}) = 1.0;  // 1 + e2
    const auto c = tensor_mul(a, b);
    CHECK(c[0] == 1.0);
    CHECK(c.at(Word{1}) == 1.0);
    CHECK(c.at(Word{2}) == 1.0);
    CHECK(c.at(Word{1, 2}) == 1.0);
    CHECK(c.at(Word{2, 1}) == 0.0);
    CHECK(c.at(Word{1, 1}) == 0.0);
}

TEST_CASE("tensor_mul: unit is the identity") {
    NormalStream rng(11);
    const auto a = random_tensor(2, 3, rng);
    const auto u = TruncatedTensor::unit(2, 3);
    const auto ua = tensor_mul(u, a);
    const auto au = tensor_mul(a, u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(ua[i] == a[i]);
        CHECK(au[i] == a[i]);
    }
}

TEST_CASE("tensor_mul: exp(v) (x) exp(v) = exp(2v) at all levels") {
    const std::vector<double> v{0.7, -0.3};
    const std::vector<double> v2{1.4, -0.6};
    const auto e1 = segment_signature(v, 5);
    const auto e2 = segment_signature(v2, 5);
    const auto prod = tensor_mul(e1, e1);
    for (std::size_t i = 0; i < prod.size(); ++i)
        CHECK(prod[i] == doctest::Approx(e2[i]).epsilon(1e-12));
}

TEST_CASE("tensor_mul is associative and unital on random tensors") {
    NormalStream rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_tensor(2, 4, rng);
        const auto b = random_tensor(2, 4, rng);
        const auto c = random_tensor(2, 4, rng);
        const auto l = tensor_mul(tensor_mul(a, b), c);
        const auto r = tensor_mul(a, tensor_mul(b, c));
        for (std::size_t i = 0; i < l.size(); ++i)
            CHECK(std::abs(l[i] - r[i]) <= 1e-12);
    }
}

TEST_CASE("tensor_mul shape errors") {
    TruncatedTensor a(2, 2), b(3, 2), c(2, 3);
    CHECK_THROWS_AS(tensor_mul(a, b), ShapeError);
    CHECK_THROWS_AS(tensor_mul(a, c), ShapeError);
}

TEST_CASE("hs_inner: orthonormal word basis") {
    TruncatedTensor a(2, 2), b(2, 2);
    a.at(Word{1, 2}) = 1.0;
    b.at(Word{1, 2}) = 1.0;
    CHECK(hs_inner(a, b) == 1.0);
    TruncatedTensor c(2, 2);
    c.at(Word{2, 1}) = 1.0;
    CHECK(hs_inner(a, c) == 0.0);

    TruncatedTensor d(2, 2);
    d[0] = 1.0;
    d.at(Word{1}) = 1.0;
    CHECK(hs_inner(d, d) == 2.0);  // ||1 + e1||^2
}

TEST_CASE("hs norm decomposes over level blocks; cross-level inner is exactly zero") {
    NormalStream rng(23);
    const auto a = random_tensor(2, 4, rng);
    double by_level = 0.0;
    for (int m = 0; m <= 4; ++m) by_level += hs_level_sq(a, m);
    CHECK(hs_inner(a, a) == doctest::Approx(by_level).epsilon(1e-15));

    TruncatedTensor l1(2, 4), l2(2, 4);
    l1.at(Word{1}) = 3.0;
    l2.at(Word{1, 2}) = 5.0;
    CHECK(hs_inner(l1, l2) == 0.0);
}

TEST_CASE("shuffle: basic words") {
    const auto s = shuffle(Word{1}, Word{2}, 2, 2);
    CHECK(s.at(Word{1, 2}) == 1.0);
    CHECK(s.at(Word{2, 1}) == 1.0);
    CHECK(s.at(Word{1, 1}) == 0.0);

    const auto m = shuffle(Word{1}, Word{1}, 2, 2);
    CHECK(m.at(Word{1, 1}) == 2.0);
}

TEST_CASE("shuffle: (i,i) with (j,j) gives the six level-4 words with coefficient 1") {
    const auto s = shuffle(Word{1, 1}, Word{2, 2}, 2, 4);
    CHECK(s.at(Word{1, 1, 2, 2}) == 1.0);
    CHECK(s.at(Word{1, 2, 1, 2}) == 1.0);
    CHECK(s.at(Word{1, 2, 2, 1}) == 1.0);
    CHECK(s.at(Word{2, 1, 1, 2}) == 1.0);
    CHECK(s.at(Word{2, 1, 2, 1}) == 1.0);
    CHECK(s.at(Word{2, 2, 1, 1}) == 1.0);
    double total = 0.0;
    for (double x : s.level(4)) total += x;
    CHECK(total == 6.0);  // C(4,2) interleavings
}

TEST_CASE("shuffle: commutative, and truncation overflow throws") {
    const auto ab = shuffle(Word{1, 2}, Word{2}, 2, 3);
    const auto ba = shuffle(Word{2}, Word{1, 2}, 2, 3);
    for (std::size_t i = 0; i < ab.size(); ++i) CHECK(ab[i] == ba[i]);
    CHECK_THROWS_AS(shuffle(Word{1, 1, 1}, Word{2, 2}, 2, 4), TruncationError);
}

TEST_CASE("shuffle identity for PL path signatures") {
    NormalStream rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        PiecewiseLinearPath p;
        p.d = 2;
        for (int i = 0; i <= 5; ++i) {
            p.times.push_back(i);
            p.points.push_back(rng.next_normal());
            p.points.push_back(rng.next_normal());
        }
        const auto S = signature_of_path(p, 4);
        const auto words = enumerate_words(2, 4);
        for (const auto& u : words) {
            if (u.length() < 1 || u.length() > 3) continue;
            for (const auto& v : words) {
                if (v.length() < 1 || u.length() + v.length() > 4) continue;
                const double lhs = S.at(u) * S.at(v);
                const double rhs = hs_inner(shuffle(u, v, 2, 4), S);
                CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
            }
        }
    }
}

TEST_CASE("tensor CSV round trip with canonical header") {
    NormalStream rng(37);
    const auto t = random_tensor(2, 3, rng, 2.0);
    const auto csv = tensor_csv(t);
    CHECK(csv.substr(0, 9) == "e,1,2,11,");
    const auto back = tensor_from_csv(csv);
    REQUIRE(back.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(back[i] == t[i]);
}
