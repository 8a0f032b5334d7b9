#pragma once

// Incremental recognition of program codes, used to walk the space of valid
// programs of a given length in lexicographic order without decoding every
// bit string.

#include <array>
#include <cstdint>
#include <vector>

#include "ait/bits.hpp"

namespace ait {

struct OpcodeTrie {
    std::vector<std::array<std::int32_t, 2>> next;  // -1 when absent
    std::vector<std::int16_t> leaf;                 // Op index at leaves, -1 elsewhere
};
const OpcodeTrie& opcode_trie();

class PrefixParser {
public:
    enum class State : std::uint8_t { Open, Complete, Invalid };

    explicit PrefixParser(unsigned symbol_width);
    PrefixParser(const PrefixParser& other) { *this = other; }
    PrefixParser& operator=(const PrefixParser& other);

    State feed(std::uint8_t bit);
    State state() const noexcept { return state_; }
    // Lower bound on the bits still needed to complete a program.
    std::uint64_t min_remaining() const noexcept;
    std::uint64_t consumed() const noexcept { return consumed_; }

private:
    enum Kind : std::uint8_t { kBlock, kRaw, kGammaZeros, kGammaBits };
    struct Item {
        Kind kind = kBlock;
        bool literal = false;
        std::int32_t node = 0;     // opcode trie node for kBlock
        std::uint64_t count = 0;   // raw bits left, zeros seen, or gamma bits left
        std::uint64_t value = 0;   // gamma value so far
    };
    static constexpr std::size_t kCapacity = 160;

    void push(const Item& item);
    void push_operands(int op_index);

    std::array<Item, kCapacity> stack_{};
    std::uint32_t size_ = 0;
    unsigned width_;
    State state_ = State::Open;
    std::uint64_t consumed_ = 0;
};

namespace detail {
template <class Visit>
bool walk_programs(const PrefixParser& parser, std::vector<std::uint8_t>& bits, std::size_t length,
                   Visit& visit) {
    for (std::uint8_t bit = 0; bit < 2; ++bit) {
        PrefixParser next = parser;
        const auto st = next.feed(bit);
        bits.push_back(bit);
        if (st == PrefixParser::State::Complete) {
            if (bits.size() == length && !visit(bits)) return false;
        } else if (st == PrefixParser::State::Open && bits.size() + next.min_remaining() <= length) {
            if (!walk_programs(next, bits, length, visit)) return false;
        }
        bits.pop_back();
    }
    return true;
}
}  // namespace detail

// Calls visit(bits) for every valid program code of exactly `length` bits that
// starts with `prefix`, in lexicographic order. `visit` takes a
// std::vector<uint8_t> of bits and returns false to stop. Returns false when
// stopped early.
template <class Visit>
bool for_each_program(unsigned symbol_width, std::size_t length, Visit&& visit,
                      const BitString& prefix = {}) {
    PrefixParser parser(symbol_width);
    std::vector<std::uint8_t> bits;
    bits.reserve(length);
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        const auto st = parser.feed(prefix[i]);
        bits.push_back(prefix[i]);
        if (st == PrefixParser::State::Invalid) return true;
        if (st == PrefixParser::State::Complete) {
            return bits.size() == length ? visit(bits) : true;
        }
    }
    if (bits.size() + parser.min_remaining() > length) return true;
    return detail::walk_programs(parser, bits, length, visit);
}

// Prefixes of `depth` bits (or complete programs shorter than that) that can
// still extend to a valid program of exactly `length` bits, in lexicographic
// order. Together they partition the programs of that length.
std::vector<BitString> program_prefixes(unsigned symbol_width, std::size_t length, std::size_t depth);

std::uint64_t count_programs(unsigned symbol_width, std::size_t length);

}  // namespace ait
