#include "ait/program_space.hpp"

#include "ait/machine.hpp"

namespace ait {

PrefixParser::PrefixParser(unsigned symbol_width) : width_(symbol_width) {
    push(Item{});
}

PrefixParser& PrefixParser::operator=(const PrefixParser& other) {
    if (this == &other) return *this;
    size_ = other.size_;
    width_ = other.width_;
    state_ = other.state_;
    consumed_ = other.consumed_;
    std::copy(other.stack_.begin(), other.stack_.begin() + size_, stack_.begin());
    return *this;
}

void PrefixParser::push(const Item& item) {
    if (size_ >= kCapacity) {
        state_ = State::Invalid;
        return;
    }
    stack_[size_++] = item;
}

void PrefixParser::push_operands(int op_index) {
    const auto operands = opcode_table()[static_cast<std::size_t>(op_index)].operands;
    for (auto it = operands.rbegin(); it != operands.rend(); ++it) {
        Item item;
        switch (*it) {
            case 'w':
                if (width_ == 0) continue;
                item.kind = kRaw;
                item.count = width_;
                break;
            case 'g':
                item.kind = kGammaZeros;
                break;
            case 'L':
                item.kind = kGammaZeros;
                item.literal = true;
                break;
            default:
                item.kind = kBlock;
                break;
        }
        push(item);
    }
}

PrefixParser::State PrefixParser::feed(std::uint8_t bit) {
    if (state_ != State::Open) return state_ = State::Invalid;
    ++consumed_;
    Item& top = stack_[size_ - 1];
    bool finished_gamma = false;
    switch (top.kind) {
        case kBlock: {
            const auto& trie = opcode_trie();
            top.node = trie.next[static_cast<std::size_t>(top.node)][bit];
            const int leaf = trie.leaf[static_cast<std::size_t>(top.node)];
            if (leaf < 0) break;
            const Op op = opcode_table()[static_cast<std::size_t>(leaf)].op;
            if (op == Op::Bad) return state_ = State::Invalid;
            top.node = 0;
            if (op == Op::End) {
                --size_;
            } else {
                push_operands(leaf);
            }
            break;
        }
        case kRaw:
            if (--top.count == 0) --size_;
            break;
        case kGammaZeros:
            if (bit == 0) {
                if (++top.count > 62) return state_ = State::Invalid;
            } else if (top.count == 0) {
                top.value = 1;
                finished_gamma = true;
            } else {
                top.kind = kGammaBits;
                top.value = 1;
            }
            break;
        case kGammaBits:
            top.value = (top.value << 1) | bit;
            if (--top.count == 0) finished_gamma = true;
            break;
    }
    if (finished_gamma) {
        if (top.literal && top.value > 1) {
            top.kind = kRaw;
            top.count = (top.value - 1) * width_;
            top.literal = false;
        } else {
            --size_;
        }
    }
    if (state_ == State::Invalid) return state_;
    if (size_ == 0) state_ = State::Complete;
    return state_;
}

std::uint64_t PrefixParser::min_remaining() const noexcept {
    std::uint64_t total = 0;
    for (std::uint32_t i = 0; i < size_; ++i) {
        const Item& it = stack_[i];
        switch (it.kind) {
            case kBlock: total += it.node == 0 ? 1 : 2; break;
            case kRaw: total += it.count; break;
            case kGammaZeros: total += it.count + 1; break;
            case kGammaBits: total += it.count; break;
        }
    }
    return total;
}

std::vector<BitString> program_prefixes(unsigned symbol_width, std::size_t length, std::size_t depth) {
    std::vector<BitString> out;
    std::vector<std::uint8_t> bits;
    auto walk = [&](auto&& self, const PrefixParser& parser) -> void {
        for (std::uint8_t bit = 0; bit < 2; ++bit) {
            PrefixParser next = parser;
            const auto st = next.feed(bit);
            bits.push_back(bit);
            if (st == PrefixParser::State::Complete) {
                if (bits.size() == length) out.emplace_back(bits);
            } else if (st == PrefixParser::State::Open && bits.size() + next.min_remaining() <= length) {
                if (bits.size() >= depth) {
                    out.emplace_back(bits);
                } else {
                    self(self, next);
                }
            }
            bits.pop_back();
        }
    };
    walk(walk, PrefixParser(symbol_width));
    return out;
}

std::uint64_t count_programs(unsigned symbol_width, std::size_t length) {
    std::uint64_t n = 0;
    for_each_program(symbol_width, length, [&](const std::vector<std::uint8_t>&) {
        ++n;
        return true;
    });
    return n;
}

}  // namespace ait
