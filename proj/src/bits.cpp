#include "ait/bits.hpp"

#include <algorithm>
#include <stdexcept>

namespace ait {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= kFnvPrime;
    }
    return h;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) {
        if (b > 1) throw std::invalid_argument("BitString: bit value out of range");
    }
}

BitString::BitString(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("BitString: bit value out of range");
        bits_.push_back(static_cast<std::uint8_t>(b));
    }
}

BitString BitString::parse(std::string_view text) {
    if (text.starts_with("0b") || text.starts_with("0B")) text.remove_prefix(2);
    BitString out;
    out.bits_.reserve(text.size());
    for (char c : text) {
        if (c == '0' || c == '1') {
            out.bits_.push_back(static_cast<std::uint8_t>(c - '0'));
        } else if (c != '_') {
            throw std::invalid_argument("BitString: not a binary digit: '" + std::string(1, c) + "'");
        }
    }
    return out;
}

BitString BitString::from_hex(std::string_view hex, std::size_t bit_count) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    BitString out;
    for (char c : hex) {
        int v = hex_value(c);
        if (v < 0) throw std::invalid_argument("BitString: not a hex digit: '" + std::string(1, c) + "'");
        for (int i = 3; i >= 0; --i) out.bits_.push_back(static_cast<std::uint8_t>((v >> i) & 1));
    }
    if (bit_count != SIZE_MAX) {
        if (bit_count > out.size()) throw std::invalid_argument("BitString: bit count exceeds hex payload");
        out.bits_.resize(bit_count);
    }
    return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes) {
    BitString out;
    out.bits_.reserve(bytes.size() * 8);
    for (std::uint8_t byte : bytes) {
        for (int i = 7; i >= 0; --i) out.bits_.push_back(static_cast<std::uint8_t>((byte >> i) & 1));
    }
    return out;
}

BitString BitString::from_uint(std::uint64_t value, unsigned width) {
    if (width < 64 && (value >> width) != 0) throw std::invalid_argument("BitString: value does not fit width");
    BitString out;
    out.bits_.reserve(width);
    for (unsigned i = width; i-- > 0;) {
        out.bits_.push_back(i < 64 ? static_cast<std::uint8_t>((value >> i) & 1) : 0);
    }
    return out;
}

BitString& BitString::append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
    return *this;
}

BitString BitString::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > bits_.size()) throw std::out_of_range("BitString::slice");
    return BitString(std::vector<std::uint8_t>(bits_.begin() + begin, bits_.begin() + end));
}

bool BitString::is_prefix_of(const BitString& other) const {
    return size() <= other.size() && std::equal(bits_.begin(), bits_.end(), other.bits_.begin());
}

std::uint64_t BitString::to_uint() const {
    if (size() > 64) throw std::overflow_error("BitString::to_uint: more than 64 bits");
    std::uint64_t v = 0;
    for (auto b : bits_) v = (v << 1) | b;
    return v;
}

std::string BitString::to_string() const {
    std::string s = "0b";
    s.reserve(2 + bits_.size());
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
}

std::string BitString::to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    for (std::size_t i = 0; i < bits_.size(); i += 4) {
        int v = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            v = (v << 1) | (i + j < bits_.size() ? bits_[i + j] : 0);
        }
        s.push_back(kDigits[v]);
    }
    return s + ":" + std::to_string(bits_.size());
}

std::uint64_t BitString::hash() const noexcept {
    std::uint64_t h = fnv_mix(kFnvOffset, bits_.size());
    for (auto b : bits_) {
        h ^= b;
        h *= kFnvPrime;
    }
    return h;
}

std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    return std::lexicographical_compare_three_way(a.bits_.begin(), a.bits_.end(), b.bits_.begin(),
                                                  b.bits_.end());
}

BitString operator+(BitString a, const BitString& b) {
    a.append(b);
    return a;
}

unsigned bits_per_symbol(unsigned alphabet_size) {
    if (alphabet_size < 2) throw std::invalid_argument("alphabet size must be at least 2");
    unsigned w = 0;
    while ((1ULL << w) < alphabet_size) ++w;
    return w;
}

SymbolString::SymbolString(std::vector<std::uint32_t> symbols, unsigned alphabet_size)
    : symbols_(std::move(symbols)), alphabet_(alphabet_size) {
    bits_per_symbol(alphabet_size);
    for (auto s : symbols_) {
        if (s >= alphabet_) throw std::invalid_argument("SymbolString: symbol outside alphabet");
    }
}

SymbolString SymbolString::parse(std::string_view digits, unsigned alphabet_size) {
    if (digits.starts_with("0b") || digits.starts_with("0B")) {
        if (alphabet_size != 2) throw std::invalid_argument("SymbolString: 0b prefix requires a binary alphabet");
        digits.remove_prefix(2);
    }
    std::vector<std::uint32_t> out;
    out.reserve(digits.size());
    for (char c : digits) {
        int v = hex_value(c);
        if (v < 0 || static_cast<unsigned>(v) >= alphabet_size) {
            throw std::invalid_argument("SymbolString: invalid symbol '" + std::string(1, c) + "'");
        }
        out.push_back(static_cast<std::uint32_t>(v));
    }
    return SymbolString(std::move(out), alphabet_size);
}

SymbolString SymbolString::from_bits(const BitString& bits) {
    std::vector<std::uint32_t> out(bits.bits().begin(), bits.bits().end());
    return SymbolString(std::move(out), 2);
}

SymbolString SymbolString::prefix(std::size_t n) const {
    n = std::min(n, symbols_.size());
    return SymbolString(std::vector<std::uint32_t>(symbols_.begin(), symbols_.begin() + n), alphabet_);
}

SymbolString SymbolString::concat(const SymbolString& tail) const {
    if (tail.alphabet_ != alphabet_) throw std::invalid_argument("SymbolString::concat: alphabet mismatch");
    auto v = symbols_;
    v.insert(v.end(), tail.symbols_.begin(), tail.symbols_.end());
    return SymbolString(std::move(v), alphabet_);
}

bool SymbolString::starts_with(const SymbolString& p) const {
    return p.size() <= size() && std::equal(p.symbols_.begin(), p.symbols_.end(), symbols_.begin());
}

BitString SymbolString::to_bits() const {
    const unsigned w = bits_per_symbol(alphabet_);
    std::vector<std::uint8_t> out;
    out.reserve(symbols_.size() * w);
    for (auto s : symbols_) {
        for (unsigned i = w; i-- > 0;) out.push_back(static_cast<std::uint8_t>((s >> i) & 1));
    }
    return BitString(std::move(out));
}

std::string SymbolString::to_string() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(symbols_.size());
    for (auto v : symbols_) {
        s.push_back(v < 16 ? kDigits[v] : '?');
    }
    return s;
}

std::uint64_t SymbolString::hash() const noexcept {
    std::uint64_t h = fnv_mix(kFnvOffset, alphabet_);
    h = fnv_mix(h, symbols_.size());
    for (auto s : symbols_) h = fnv_mix(h, s);
    return h;
}

std::strong_ordering operator<=>(const SymbolString& a, const SymbolString& b) {
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    return std::lexicographical_compare_three_way(a.symbols_.begin(), a.symbols_.end(),
                                                  b.symbols_.begin(), b.symbols_.end());
}

SymbolString alternating(std::size_t n, std::uint32_t first) {
    std::vector<std::uint32_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (first + i) & 1;
    return SymbolString(std::move(v), 2);
}

SymbolString constant(std::size_t n, std::uint32_t value) {
    return SymbolString(std::vector<std::uint32_t>(n, value), 2);
}

}  // namespace ait
