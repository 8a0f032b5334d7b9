#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ait {

// Ordered sequence of bits. Ordering is shortlex: shorter strings first, then
// lexicographic on the bits.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::vector<std::uint8_t> bits);
    BitString(std::initializer_list<int> bits);

    // Accepts "0b0101", "0101" or "" (the empty string).
    static BitString parse(std::string_view text);
    // Most-significant-bit-first expansion of `hex`, truncated to `bit_count`
    // bits when given.
    static BitString from_hex(std::string_view hex, std::size_t bit_count = SIZE_MAX);
    static BitString from_bytes(std::span<const std::uint8_t> bytes);
    // Fixed-width big-endian encoding of `value`.
    static BitString from_uint(std::uint64_t value, unsigned width);

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    void push_back(bool bit) { bits_.push_back(bit ? 1 : 0); }
    BitString& append(const BitString& other);
    BitString slice(std::size_t begin, std::size_t end) const;
    bool is_prefix_of(const BitString& other) const;
    std::uint64_t to_uint() const;

    // "0b" followed by the bits; "0b" alone for the empty string.
    std::string to_string() const;
    // Hex digits (MSB first, zero padded on the right) with the bit count,
    // e.g. "a8:5".
    std::string to_hex() const;
    std::uint64_t hash() const noexcept;

    friend bool operator==(const BitString&, const BitString&) = default;
    friend std::strong_ordering operator<=>(const BitString& a, const BitString& b);

private:
    std::vector<std::uint8_t> bits_;
};

BitString operator+(BitString a, const BitString& b);

// Number of bits used to store one symbol of an alphabet of size m.
unsigned bits_per_symbol(unsigned alphabet_size);

// Sequence of symbols over {0, ..., alphabet_size - 1}.
class SymbolString {
public:
    SymbolString() = default;
    explicit SymbolString(std::vector<std::uint32_t> symbols, unsigned alphabet_size = 2);

    // Each character is one digit symbol ("0101", "012"); an optional "0b"
    // prefix is accepted for binary text.
    static SymbolString parse(std::string_view digits, unsigned alphabet_size = 2);
    // Binary view of a bit string (one symbol per bit).
    static SymbolString from_bits(const BitString& bits);

    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    unsigned alphabet_size() const noexcept { return alphabet_; }
    std::uint32_t operator[](std::size_t i) const { return symbols_[i]; }
    std::span<const std::uint32_t> symbols() const noexcept { return symbols_; }

    SymbolString prefix(std::size_t n) const;
    SymbolString concat(const SymbolString& tail) const;
    bool starts_with(const SymbolString& prefix) const;

    // Packs each symbol into bits_per_symbol(alphabet) bits, MSB first.
    BitString to_bits() const;
    std::string to_string() const;
    std::uint64_t hash() const noexcept;

    friend bool operator==(const SymbolString&, const SymbolString&) = default;
    friend std::strong_ordering operator<=>(const SymbolString& a, const SymbolString& b);

private:
    std::vector<std::uint32_t> symbols_;
    unsigned alphabet_ = 2;
};

// Convenience generators used across tests and experiments.
SymbolString alternating(std::size_t n, std::uint32_t first = 0);
SymbolString constant(std::size_t n, std::uint32_t value = 0);

}  // namespace ait
