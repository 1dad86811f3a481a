#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sigest/errors.hpp"

namespace sigest {

// A word over the alphabet {1..d}: a multi-index into tensor coefficients.
// The empty word indexes the level-0 (scalar) slot.
struct Word {
    std::vector<int> letters;

    Word() = default;
    explicit Word(std::vector<int> ls) : letters(std::move(ls)) {}
    Word(std::initializer_list<int> ls) : letters(ls) {}

    int length() const { return static_cast<int>(letters.size()); }
    bool empty() const { return letters.empty(); }

    bool operator==(const Word&) const = default;

    // Canonical total order: by length, then lexicographic.
    bool operator<(const Word& o) const {
        if (letters.size() != o.letters.size()) return letters.size() < o.letters.size();
        return letters < o.letters;
    }
};

// Number of words of length exactly m: d^m.
inline std::size_t level_size(int d, int m) {
    std::size_t s = 1;
    for (int i = 0; i < m; ++i) s *= static_cast<std::size_t>(d);
    return s;
}

// Number of words of length <= M: sum_{m=0}^{M} d^m.
inline std::size_t tensor_dim(int d, int M) {
    std::size_t total = 0;
    for (int m = 0; m <= M; ++m) total += level_size(d, m);
    return total;
}

// Offset of the level-m block in the level-blocked coefficient layout.
inline std::size_t level_offset(int d, int m) {
    std::size_t off = 0;
    for (int j = 0; j < m; ++j) off += level_size(d, j);
    return off;
}

// Index of a word within its level block: base-d positional encoding of
// (letters - 1).  Deterministic and documented so CSV columns are stable.
inline std::size_t word_level_index(const Word& w, int d) {
    std::size_t idx = 0;
    for (int l : w.letters) {
        if (l < 1 || l > d) throw DomainError("word letter outside [1, d]");
        idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(l - 1);
    }
    return idx;
}

// Global index: level offset plus in-level index.
inline std::size_t word_index(const Word& w, int d) {
    return level_offset(d, w.length()) + word_level_index(w, d);
}

// Inverse of word_index restricted to a level: k-th word of length m.
inline Word word_at(int d, int m, std::size_t k) {
    Word w;
    w.letters.assign(static_cast<std::size_t>(m), 1);
    for (int pos = m - 1; pos >= 0; --pos) {
        w.letters[static_cast<std::size_t>(pos)] = static_cast<int>(k % static_cast<std::size_t>(d)) + 1;
        k /= static_cast<std::size_t>(d);
    }
    return w;
}

// All words of length 0..M in canonical order.  Stable across runs.
std::vector<Word> enumerate_words(int d, int M);

// Text label used in CSV headers: "e" for the empty word, else the
// concatenated letters, e.g. "12" for (1,2).
std::string word_label(const Word& w);

}  // namespace sigest
