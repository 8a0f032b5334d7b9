#pragma once

// Independent brute-force reference: decodes every raw bit string of each
// length and runs it without target pruning.

#include <map>
#include <optional>

#include "ait/machine.hpp"

namespace oracle {

struct Best {
    ait::BitString code;
    std::uint64_t steps = 0;
};

// Shortlex-first program of at most max_bits bits whose tape equals target.
inline std::optional<Best> shortest(const ait::Machine& m, const ait::Tape& target, const ait::BitString& aux,
                                    unsigned max_bits, std::uint64_t steps) {
    for (unsigned n = 1; n <= max_bits; ++n) {
        for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
            const auto bits = ait::BitString::from_uint(v, n);
            auto p = m.decode(bits);
            if (!p) continue;
            const auto out = m.run(*p, aux, steps);
            if (out.status == ait::RunStatus::Halted && out.tape == target) return Best{bits, out.steps_used};
        }
    }
    return std::nullopt;
}

// Shortest program length for every output produced by some program of at
// most max_bits bits (aux empty). Keyed by tape.
inline std::map<ait::Tape, ait::BitString> all_minimal(const ait::Machine& m, unsigned max_bits,
                                                       std::uint64_t steps) {
    std::map<ait::Tape, ait::BitString> best;
    for (unsigned n = 1; n <= max_bits; ++n) {
        for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
            const auto bits = ait::BitString::from_uint(v, n);
            auto p = m.decode(bits);
            if (!p) continue;
            const auto out = m.run(*p, {}, steps);
            if (out.status == ait::RunStatus::Halted) best.emplace(out.tape, bits);
        }
    }
    return best;
}

}  // namespace oracle
