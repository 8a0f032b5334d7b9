#pragma once

// Every CodeTree a test builds goes through audit(), which checks Kraft and
// prefix-freeness independently of the library and counts the trees seen.

#include <string>
#include <vector>

#include "ait/mdl.hpp"

namespace audit {

struct Tally {
    std::size_t trees = 0;
    std::size_t violations = 0;
};

inline Tally& tally() {
    static Tally t;
    return t;
}

inline bool independent_check(const ait::CodeTree& t) {
    const auto& es = t.entries();
    // Kraft with integer arithmetic over a common denominator.
    std::size_t maxlen = 0;
    for (const auto& e : es) maxlen = std::max(maxlen, e.codeword.size());
    if (maxlen > 60) return false;
    unsigned long long sum = 0;
    for (const auto& e : es) sum += 1ULL << (maxlen - e.codeword.size());
    if (sum > (1ULL << maxlen)) return false;
    for (std::size_t i = 0; i < es.size(); ++i) {
        for (std::size_t j = 0; j < es.size(); ++j) {
            if (i != j && es[i].codeword.is_prefix_of(es[j].codeword)) return false;
        }
    }
    return t.kind() != ait::CodeTree::Kind::Table || ait::check_kraft(t) <= 1;
}

inline const ait::CodeTree& check(const ait::CodeTree& t) {
    ++tally().trees;
    if (!independent_check(t)) ++tally().violations;
    return t;
}

}  // namespace audit
