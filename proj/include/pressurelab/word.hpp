#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pressurelab/errors.hpp"

namespace pressurelab {

/// A finite word over the alphabet {1, ..., |I|}. The empty word is allowed
/// and has length zero. Symbols are 1-based to match the usual coding
/// conventions for full shifts.
using Word = std::vector<int>;

inline void validate_word(const Word& word, int alphabet_size,
                          const char* module, const char* operation) {
    for (int s : word) {
        if (s < 1 || s > alphabet_size) {
            throw RangeError(module, operation,
                             "word symbol " + std::to_string(s) +
                                 " outside alphabet [1, " +
                                 std::to_string(alphabet_size) + "]");
        }
    }
}

/// Linear index of a word of fixed length over {1..alphabet}: base-|I| digits,
/// most significant first. Length-k words enumerate 0 .. |I|^k - 1.
inline std::size_t word_index(const Word& word, int alphabet_size) {
    std::size_t idx = 0;
    for (int s : word) idx = idx * static_cast<std::size_t>(alphabet_size) +
                             static_cast<std::size_t>(s - 1);
    return idx;
}

inline Word word_from_index(std::size_t idx, int length, int alphabet_size) {
    Word w(static_cast<std::size_t>(length));
    for (int j = length - 1; j >= 0; --j) {
        w[static_cast<std::size_t>(j)] =
            static_cast<int>(idx % static_cast<std::size_t>(alphabet_size)) + 1;
        idx /= static_cast<std::size_t>(alphabet_size);
    }
    return w;
}

inline std::size_t pow_size(int base, int exponent) {
    std::size_t r = 1;
    for (int i = 0; i < exponent; ++i) r *= static_cast<std::size_t>(base);
    return r;
}

}  // namespace pressurelab
