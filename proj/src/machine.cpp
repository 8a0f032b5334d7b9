#include "ait/machine.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "ait/program_space.hpp"
#include "json.hpp"

namespace ait {

namespace {

constexpr OpcodeInfo kOpcodes[] = {
    {Op::End, "END", "0", "", "close the current block; HALT at top level"},
    {Op::Sym, "SYM", "10", "w", "emit one symbol followed by a delimiter"},
    {Op::Repeat, "REPEAT", "110", "gB", "run the block count times"},
    {Op::Literal, "LITERAL", "1110", "L", "emit n literal symbols (length coded as gamma(n+1))"},
    {Op::Read, "READ", "11110", "BB",
     "consume an aux bit and run the first (0) or second (1) block; on exhausted aux, break the "
     "innermost LOOP or do nothing outside one"},
    {Op::CopyAux, "COPYAUX", "111110", "", "copy the remaining aux tape to the output as symbols"},
    {Op::ExecAux, "EXECAUX", "1111110", "",
     "decode a program from the aux tape and run it on the rest of the aux tape"},
    {Op::Loop, "LOOP", "111111100", "B", "run the block forever (until a READ breaks it)"},
    {Op::Pipe, "PIPE", "111111101", "BB",
     "run the first block with output captured, then the second with that output ahead of aux"},
    {Op::Chain, "CHAIN", "111111110", "BB",
     "run the first block, emit a separator, then run the second with the first block's code "
     "ahead of aux"},
    {Op::Search, "SEARCH", "1111111110", "g",
     "dovetail all programs of exactly k bits and emit the code of the first to halt with the "
     "aux tape (read as symbols) as output"},
    {Op::Emit0, "EMIT0", "11111111110", "", "emit a raw 0 bit"},
    {Op::Emit1, "EMIT1", "111111111110", "", "emit a raw 1 bit"},
    {Op::Enum, "ENUM", "1111111111110", "gB",
     "for every l-bit codeword in order, run the block with the codeword as aux and emit a "
     "separator (l coded as gamma(l+1))"},
    {Op::Delim, "DELIM", "11111111111110", "", "emit a raw delimiter"},
    {Op::Bad, "(invalid)", "11111111111111", "", "reserved; never decodes"},
};

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return a > UINT64_MAX - b ? UINT64_MAX : a + b;
}
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    return a > UINT64_MAX / b ? UINT64_MAX : a * b;
}

}  // namespace

std::span<const OpcodeInfo> opcode_table() { return kOpcodes; }

const OpcodeInfo& opcode_info(Op op) {
    for (const auto& info : kOpcodes) {
        if (info.op == op) return info;
    }
    throw std::logic_error("unknown opcode");
}

const OpcodeTrie& opcode_trie() {
    static const OpcodeTrie trie = [] {
        OpcodeTrie t;
        t.next.push_back({-1, -1});
        t.leaf.push_back(-1);
        for (std::size_t i = 0; i < std::size(kOpcodes); ++i) {
            std::int32_t node = 0;
            for (char c : kOpcodes[i].code) {
                const int b = c - '0';
                if (t.next[node][b] < 0) {
                    t.next[node][b] = static_cast<std::int32_t>(t.next.size());
                    t.next.push_back({-1, -1});
                    t.leaf.push_back(-1);
                }
                node = t.next[node][b];
            }
            t.leaf[node] = static_cast<std::int16_t>(i);
        }
        return t;
    }();
    return trie;
}

std::string_view to_string(DecodeErrorKind kind) {
    switch (kind) {
        case DecodeErrorKind::Truncated: return "Truncated";
        case DecodeErrorKind::Overrun: return "Overrun";
        case DecodeErrorKind::BadOpcode: return "BadOpcode";
    }
    return "?";
}

std::string DecodeError::describe() const {
    return std::string(to_string(kind)) + " at bit " + std::to_string(position);
}

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Halted: return "Halted";
        case RunStatus::OutOfBudget: return "OutOfBudget";
        case RunStatus::DecodeError: return "DecodeError";
    }
    return "?";
}

unsigned gamma_length(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("gamma code needs n >= 1");
    unsigned z = 0;
    while ((n >> (z + 1)) != 0) ++z;
    return 2 * z + 1;
}

unsigned ceil_log2(std::uint64_t n) {
    unsigned k = 0;
    while (k < 64 && (1ULL << k) < n) ++k;
    return k;
}

std::span<const std::uint32_t> Program::block_instrs(std::uint32_t block) const {
    const auto& b = blocks_.at(block);
    return std::span<const std::uint32_t>(order_).subspan(b.instr_begin, b.instr_end - b.instr_begin);
}

// Recursive-descent decoder over the opcode trie.
class ProgramDecoder {
public:
    ProgramDecoder(const BitString& bits, std::size_t pos, unsigned width)
        : bits_(bits), pos_(pos), start_(pos), width_(width) {}

    // Decodes one program starting at the initial position.
    std::optional<Program> run() {
        prog_.width_ = width_;
        if (!decode_block()) return std::nullopt;
        prog_.code_ = bits_.slice(start_, pos_);
        return std::move(prog_);
    }
    std::size_t position() const { return pos_; }
    const DecodeError& error() const { return *error_; }

private:
    bool fail(DecodeErrorKind kind) {
        error_ = DecodeError{kind, pos_ - start_};
        return false;
    }
    bool read_bit(std::uint8_t& bit) {
        if (pos_ >= bits_.size()) return fail(DecodeErrorKind::Truncated);
        bit = bits_[pos_++];
        return true;
    }
    bool read_opcode(Op& op) {
        const auto& trie = opcode_trie();
        std::int32_t node = 0;
        while (trie.leaf[node] < 0) {
            std::uint8_t b;
            if (!read_bit(b)) return false;
            node = trie.next[node][b];
        }
        op = kOpcodes[trie.leaf[node]].op;
        if (op == Op::Bad) return fail(DecodeErrorKind::BadOpcode);
        return true;
    }
    bool read_gamma(std::uint64_t& value) {
        unsigned zeros = 0;
        std::uint8_t b;
        for (;;) {
            if (!read_bit(b)) return false;
            if (b == 1) break;
            if (++zeros > 62) return fail(DecodeErrorKind::BadOpcode);
        }
        value = 1;
        for (unsigned i = 0; i < zeros; ++i) {
            if (!read_bit(b)) return false;
            value = (value << 1) | b;
        }
        return true;
    }
    bool read_uint(unsigned width, std::uint64_t& value) {
        value = 0;
        for (unsigned i = 0; i < width; ++i) {
            std::uint8_t b;
            if (!read_bit(b)) return false;
            value = (value << 1) | b;
        }
        return true;
    }

    // Returns the new block's index through `index`.
    bool decode_block(std::uint32_t* index = nullptr) {
        const auto self = static_cast<std::uint32_t>(prog_.blocks_.size());
        prog_.blocks_.emplace_back();
        prog_.blocks_[self].code_begin = static_cast<std::uint32_t>(pos_ - start_);
        std::vector<std::uint32_t> mine;
        std::uint64_t cost = 1;
        for (;;) {
            Op op;
            if (!read_opcode(op)) return false;
            if (op == Op::End) break;
            Program::Instr ins;
            ins.op = op;
            switch (op) {
                case Op::Sym:
                    if (!read_uint(width_, ins.arg)) return false;
                    break;
                case Op::Repeat:
                    if (!read_gamma(ins.arg) || !decode_block(&ins.first)) return false;
                    break;
                case Op::Literal: {
                    std::uint64_t n1;
                    if (!read_gamma(n1)) return false;
                    ins.arg = n1 - 1;
                    ins.first = static_cast<std::uint32_t>(pos_ - start_);
                    const std::uint64_t payload = sat_mul(ins.arg, width_);
                    if (payload > bits_.size() - pos_) {
                        pos_ = bits_.size();
                        return fail(DecodeErrorKind::Truncated);
                    }
                    pos_ += payload;
                    break;
                }
                case Op::Read:
                case Op::Pipe:
                case Op::Chain:
                    if (!decode_block(&ins.first) || !decode_block(&ins.second)) return false;
                    break;
                case Op::Loop:
                    if (!decode_block(&ins.first)) return false;
                    break;
                case Op::Search:
                    if (!read_gamma(ins.arg)) return false;
                    break;
                case Op::Enum: {
                    std::uint64_t l1;
                    if (!read_gamma(l1) || !decode_block(&ins.first)) return false;
                    ins.arg = l1 - 1;
                    break;
                }
                default:
                    break;
            }
            if (cost != Program::kNotStatic) {
                if (op == Op::Repeat && prog_.blocks_[ins.first].static_cost != Program::kNotStatic) {
                    cost = sat_add(cost, sat_add(1, sat_mul(ins.arg, prog_.blocks_[ins.first].static_cost)));
                    if (cost == UINT64_MAX) cost = UINT64_MAX - 1;
                } else {
                    cost = Program::kNotStatic;
                }
            }
            mine.push_back(static_cast<std::uint32_t>(prog_.instrs_.size()));
            prog_.instrs_.push_back(ins);
        }
        auto& blk = prog_.blocks_[self];
        blk.code_end = static_cast<std::uint32_t>(pos_ - start_);
        blk.instr_begin = static_cast<std::uint32_t>(prog_.order_.size());
        prog_.order_.insert(prog_.order_.end(), mine.begin(), mine.end());
        blk.instr_end = static_cast<std::uint32_t>(prog_.order_.size());
        blk.static_cost = cost;
        if (index) *index = self;
        return true;
    }

    const BitString& bits_;
    std::size_t pos_;
    std::size_t start_;
    unsigned width_;
    Program prog_;
    std::optional<DecodeError> error_;
};

std::string Program::disassemble() const {
    std::ostringstream os;
    auto emit_block = [&](auto&& self, std::uint32_t b, bool top) -> void {
        for (auto idx : block_instrs(b)) {
            const auto& in = instrs_[idx];
            os << opcode_info(in.op).name;
            switch (in.op) {
                case Op::Sym: os << ' ' << in.arg; break;
                case Op::Repeat: os << ' ' << in.arg << " { "; self(self, in.first, false); os << '}'; break;
                case Op::Literal:
                    os << " \"";
                    for (std::uint64_t i = 0; i < in.arg; ++i) {
                        std::uint64_t v = 0;
                        for (unsigned j = 0; j < width_; ++j) v = (v << 1) | code_[in.first + i * width_ + j];
                        os << v;
                    }
                    os << '"';
                    break;
                case Op::Read:
                case Op::Pipe:
                case Op::Chain:
                    os << " { "; self(self, in.first, false); os << "} { "; self(self, in.second, false); os << '}';
                    break;
                case Op::Loop: os << " { "; self(self, in.first, false); os << '}'; break;
                case Op::Search: os << ' ' << in.arg; break;
                case Op::Enum: os << ' ' << in.arg << " { "; self(self, in.first, false); os << '}'; break;
                default: break;
            }
            os << ' ';
        }
        if (top) os << "HALT";
    };
    emit_block(emit_block, kRoot, true);
    return os.str();
}

std::optional<SymbolString> ExecutionOutcome::output(unsigned alphabet_size) const {
    if (status != RunStatus::Halted) return std::nullopt;
    const unsigned w = bits_per_symbol(alphabet_size);
    std::vector<std::uint32_t> out;
    std::size_t i = 0;
    while (i < tape.size()) {
        if (i + w >= tape.size()) return std::nullopt;
        std::uint32_t v = 0;
        for (unsigned j = 0; j < w; ++j) {
            if (tape[i + j] == kDelim) return std::nullopt;
            v = (v << 1) | tape[i + j];
        }
        if (tape[i + w] != kDelim || v >= alphabet_size) return std::nullopt;
        out.push_back(v);
        i += w + 1;
    }
    return SymbolString(std::move(out), alphabet_size);
}

// ---------------------------------------------------------------------------
// Interpreter

namespace {

struct AuxTape {
    std::vector<std::uint8_t> bits;
    std::size_t pos = 0;
    std::size_t remaining() const { return bits.size() - pos; }
};

struct Sink {
    Tape tape;
    const Tape* target = nullptr;

    bool put(std::uint8_t token) {
        if (target && (tape.size() >= target->size() || (*target)[tape.size()] != token)) return false;
        tape.push_back(token);
        return true;
    }
};

enum class Stop : std::uint8_t { None, Budget, Diverged, Decode };
enum class Flow : std::uint8_t { Normal, Break, Halt };

class Interpreter {
public:
    Interpreter(unsigned width, std::uint64_t budget) : width_(width), budget_(budget) {}

    // Runs `p` from its root block.
    void run(const Program& p, AuxTape& aux, Sink& sink, unsigned depth) {
        exec_block(p, Program::kRoot, aux, sink, false, depth);
    }

    Stop stop() const { return stop_; }
    std::uint64_t steps() const { return steps_; }

private:
    bool tick(std::uint64_t n = 1) {
        steps_ = sat_add(steps_, n);
        if (steps_ > budget_) {
            stop_ = Stop::Budget;
            return false;
        }
        return true;
    }
    bool put(Sink& sink, std::uint8_t token) {
        if (!sink.put(token)) {
            stop_ = Stop::Diverged;
            return false;
        }
        return true;
    }
    bool put_symbol(Sink& sink, std::uint64_t value) {
        for (unsigned i = width_; i-- > 0;) {
            if (!put(sink, static_cast<std::uint8_t>((value >> i) & 1))) return false;
        }
        return put(sink, kDelim);
    }
    void exhaust() {
        steps_ = budget_ == UINT64_MAX ? UINT64_MAX : budget_ + 1;
        stop_ = Stop::Budget;
    }

    Flow exec_block(const Program& p, std::uint32_t b, AuxTape& aux, Sink& sink, bool in_loop,
                    unsigned depth) {
        for (auto idx : p.block_instrs(b)) {
            const Flow f = exec(p, p.instrs()[idx], aux, sink, in_loop, depth);
            if (f != Flow::Normal) return f;
        }
        return tick() ? Flow::Normal : Flow::Halt;
    }

    // Runs a nested block as its own sub-machine with the given aux tape, and
    // advances `outer` past whatever part of it the sub-machine consumed.
    Flow exec_with_prefixed_aux(const Program& p, std::uint32_t b, std::vector<std::uint8_t> prefix,
                                AuxTape& outer, Sink& sink, unsigned depth) {
        const std::size_t prefix_len = prefix.size();
        AuxTape inner;
        inner.bits = std::move(prefix);
        inner.bits.insert(inner.bits.end(), outer.bits.begin() + static_cast<std::ptrdiff_t>(outer.pos),
                          outer.bits.end());
        const Flow f = exec_block(p, b, inner, sink, false, depth);
        if (inner.pos > prefix_len) outer.pos += inner.pos - prefix_len;
        return f == Flow::Halt ? Flow::Halt : Flow::Normal;
    }

    Flow exec(const Program& p, const Program::Instr& in, AuxTape& aux, Sink& sink, bool in_loop,
              unsigned depth) {
        if (!tick()) return Flow::Halt;
        switch (in.op) {
            case Op::Sym:
                return put_symbol(sink, in.arg) ? Flow::Normal : Flow::Halt;
            case Op::Emit0:
                return put(sink, 0) ? Flow::Normal : Flow::Halt;
            case Op::Emit1:
                return put(sink, 1) ? Flow::Normal : Flow::Halt;
            case Op::Delim:
                return put(sink, kDelim) ? Flow::Normal : Flow::Halt;
            case Op::Repeat: {
                const auto cost = p.blocks()[in.first].static_cost;
                if (cost != Program::kNotStatic) {
                    return tick(sat_mul(in.arg, cost)) ? Flow::Normal : Flow::Halt;
                }
                for (std::uint64_t i = 0; i < in.arg; ++i) {
                    const Flow f = exec_block(p, in.first, aux, sink, in_loop, depth);
                    if (f != Flow::Normal) return f;
                }
                return Flow::Normal;
            }
            case Op::Literal:
                for (std::uint64_t i = 0; i < in.arg; ++i) {
                    if (!tick()) return Flow::Halt;
                    std::uint64_t v = 0;
                    for (unsigned j = 0; j < width_; ++j) v = (v << 1) | p.code()[in.first + i * width_ + j];
                    if (!put_symbol(sink, v)) return Flow::Halt;
                }
                return Flow::Normal;
            case Op::Read:
                if (aux.remaining() == 0) return in_loop ? Flow::Break : Flow::Normal;
                return exec_block(p, aux.bits[aux.pos++] ? in.second : in.first, aux, sink, in_loop, depth);
            case Op::CopyAux:
                while (aux.remaining() >= width_) {
                    if (!tick()) return Flow::Halt;
                    std::uint64_t v = 0;
                    for (unsigned j = 0; j < width_; ++j) v = (v << 1) | aux.bits[aux.pos++];
                    if (!put_symbol(sink, v)) return Flow::Halt;
                }
                return Flow::Normal;
            case Op::ExecAux: {
                if (depth >= Machine::kMaxNesting) {
                    exhaust();
                    return Flow::Halt;
                }
                BitString rest(std::vector<std::uint8_t>(aux.bits.begin() + static_cast<std::ptrdiff_t>(aux.pos),
                                                         aux.bits.end()));
                ProgramDecoder dec(rest, 0, width_);
                auto sub = dec.run();
                if (!sub) {
                    stop_ = Stop::Decode;
                    return Flow::Halt;
                }
                aux.pos += dec.position();
                const Flow f = exec_block(*sub, Program::kRoot, aux, sink, false, depth + 1);
                return f == Flow::Halt ? Flow::Halt : Flow::Normal;
            }
            case Op::Loop: {
                if (p.blocks()[in.first].static_cost != Program::kNotStatic) {
                    exhaust();
                    return Flow::Halt;
                }
                for (;;) {
                    const Flow f = exec_block(p, in.first, aux, sink, true, depth);
                    if (f == Flow::Break) return Flow::Normal;
                    if (f == Flow::Halt) return f;
                }
            }
            case Op::Pipe: {
                Sink captured;
                if (exec_block(p, in.first, aux, captured, false, depth) == Flow::Halt) return Flow::Halt;
                std::vector<std::uint8_t> bits;
                bits.reserve(captured.tape.size());
                for (auto t : captured.tape) {
                    if (t != kDelim) bits.push_back(t);
                }
                return exec_with_prefixed_aux(p, in.second, std::move(bits), aux, sink, depth);
            }
            case Op::Chain: {
                if (exec_block(p, in.first, aux, sink, false, depth) == Flow::Halt) return Flow::Halt;
                if (!put(sink, kDelim)) return Flow::Halt;
                const auto& blk = p.blocks()[in.first];
                const auto bits = p.code().bits().subspan(blk.code_begin, blk.code_end - blk.code_begin);
                return exec_with_prefixed_aux(p, in.second, std::vector<std::uint8_t>(bits.begin(), bits.end()),
                                              aux, sink, depth);
            }
            case Op::Search:
                return exec_search(in.arg, aux, sink, depth);
            case Op::Enum: {
                for (std::uint64_t r = 0;; ++r) {
                    if (in.arg < 64 && (r >> in.arg) != 0) break;
                    if (!tick()) return Flow::Halt;
                    AuxTape codeword;
                    for (std::uint64_t j = in.arg; j-- > 0;) {
                        codeword.bits.push_back(j < 64 ? static_cast<std::uint8_t>((r >> j) & 1) : 0);
                    }
                    if (exec_block(p, in.first, codeword, sink, false, depth) == Flow::Halt) return Flow::Halt;
                    if (!put(sink, kDelim)) return Flow::Halt;
                    if (r == UINT64_MAX) {
                        exhaust();
                        return Flow::Halt;
                    }
                }
                return Flow::Normal;
            }
            case Op::End:
            case Op::Bad:
                break;
        }
        return Flow::Normal;
    }

    Flow exec_search(std::uint64_t k, AuxTape& aux, Sink& sink, unsigned depth) {
        if (depth >= Machine::kMaxNesting) {
            exhaust();
            return Flow::Halt;
        }
        Tape target;
        while (aux.remaining() >= width_) {
            for (unsigned j = 0; j < width_; ++j) target.push_back(aux.bits[aux.pos++]);
            target.push_back(kDelim);
        }
        aux.pos = aux.bits.size();
        for (unsigned round = 0;; ++round) {
            const std::uint64_t allowance = round >= 63 ? UINT64_MAX : (1ULL << round);
            bool starved = false;
            std::optional<std::vector<std::uint8_t>> found;
            bool outer_exhausted = false;
            for_each_program(width_, k, [&](const std::vector<std::uint8_t>& bits) {
                if (!tick()) {
                    outer_exhausted = true;
                    return false;
                }
                const std::uint64_t remaining = budget_ - steps_;
                const std::uint64_t inner_budget = std::min(allowance, remaining);
                BitString code(bits);
                ProgramDecoder dec(code, 0, width_);
                auto sub = dec.run();
                if (!sub) return true;
                Interpreter inner(width_, inner_budget);
                AuxTape empty;
                Sink inner_sink;
                inner_sink.target = &target;
                inner.run(*sub, empty, inner_sink, depth + 1);
                steps_ = sat_add(steps_, std::min(inner.steps(), inner_budget));
                if (inner.stop() == Stop::Budget) {
                    if (inner_budget < allowance) {
                        outer_exhausted = true;
                        return false;
                    }
                    starved = true;
                    return true;
                }
                if (inner.stop() == Stop::None && inner_sink.tape.size() == target.size()) {
                    found = bits;
                    return false;
                }
                return true;
            });
            if (outer_exhausted) {
                exhaust();
                return Flow::Halt;
            }
            if (found) {
                for (auto b : *found) {
                    if (!put_symbol(sink, b)) return Flow::Halt;
                }
                return Flow::Normal;
            }
            if (!starved) {
                // Every candidate has settled without a match: the search never ends.
                exhaust();
                return Flow::Halt;
            }
        }
    }

    unsigned width_;
    std::uint64_t budget_;
    std::uint64_t steps_ = 0;
    Stop stop_ = Stop::None;
};

}  // namespace

// ---------------------------------------------------------------------------
// Builders

namespace code {

BitString gamma(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("gamma code needs n >= 1");
    unsigned z = 0;
    while ((n >> (z + 1)) != 0) ++z;
    BitString out = BitString::from_uint(0, z);
    out.append(BitString::from_uint(n, z + 1));
    return out;
}

BitString opcode(Op op) { return BitString::parse(opcode_info(op).code); }
BitString end() { return opcode(Op::End); }

BitString block(std::initializer_list<BitString> instrs) {
    return block(std::vector<BitString>(instrs));
}

BitString block(const std::vector<BitString>& instrs) {
    BitString out;
    for (const auto& i : instrs) out.append(i);
    return out.append(end());
}

BitString sym(std::uint32_t value, unsigned width) {
    return opcode(Op::Sym) + BitString::from_uint(value, width);
}

BitString repeat(std::uint64_t count, const BitString& body) {
    return opcode(Op::Repeat) + gamma(count) + body;
}

BitString literal(const SymbolString& x, unsigned width) {
    BitString out = opcode(Op::Literal) + gamma(x.size() + 1);
    for (auto s : x.symbols()) out.append(BitString::from_uint(s, width));
    return out;
}

BitString read(const BitString& on_zero, const BitString& on_one) {
    return opcode(Op::Read) + on_zero + on_one;
}

BitString copy_aux() { return opcode(Op::CopyAux); }
BitString exec_aux() { return opcode(Op::ExecAux); }
BitString loop(const BitString& body) { return opcode(Op::Loop) + body; }
BitString pipe(const BitString& first, const BitString& second) { return opcode(Op::Pipe) + first + second; }
BitString chain(const BitString& first, const BitString& second) { return opcode(Op::Chain) + first + second; }
BitString search(std::uint64_t k) { return opcode(Op::Search) + gamma(k); }
BitString emit(bool bit) { return opcode(bit ? Op::Emit1 : Op::Emit0); }
BitString delim() { return opcode(Op::Delim); }
BitString enum_codes(std::uint64_t codeword_bits, const BitString& body) {
    return opcode(Op::Enum) + gamma(codeword_bits + 1) + body;
}

BitString emit_string(const SymbolString& x, unsigned width) {
    BitString syms;
    for (auto s : x.symbols()) syms.append(sym(s, width));
    BitString lit = x.empty() ? BitString{} : literal(x, width);
    return (x.empty() || syms.size() <= lit.size()) ? syms : lit;
}

}  // namespace code

// ---------------------------------------------------------------------------
// Machine

Machine::Machine(unsigned alphabet_size) : alphabet_(alphabet_size), width_(bits_per_symbol(alphabet_size)) {
    std::ostringstream os;
    os << kIsaVersion << "|m=" << alphabet_ << "|w=" << width_;
    for (const auto& op : kOpcodes) os << '|' << op.name << '=' << op.code << ':' << op.operands;
    const std::string s = os.str();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    hash_ = h;

    // Self-test: measure the framing constants from the builders.
    unsigned c_lit = 0;
    for (std::size_t n = 0; n <= 4096; ++n) {
        const auto len = literal_program(SymbolString(std::vector<std::uint32_t>(n, 0), alphabet_)).size();
        const auto overhead = len - n * width_;
        const auto allowance = 2 * ceil_log2(n + 1);
        c_lit = std::max<unsigned>(c_lit, static_cast<unsigned>(overhead > allowance ? overhead - allowance : 0));
    }
    unsigned c_pair = 0;
    const std::vector<Program> sample = {halt_program(), copy_aux_program(), exec_aux_program(),
                                         literal_program(SymbolString(std::vector<std::uint32_t>(5, 1), alphabet_))};
    for (const auto& p : sample) {
        for (const auto& q : sample) {
            c_pair = std::max<unsigned>(c_pair, static_cast<unsigned>(compose(p, q).size() - p.size() - q.size()));
            c_pair = std::max<unsigned>(c_pair, static_cast<unsigned>(chain(p, q).size() - p.size() - q.size()));
        }
    }
    constants_.c_lit = c_lit;
    constants_.c_pair = c_pair;
    constants_.copy_bits = static_cast<unsigned>(copy_aux_program().size());
    constants_.exec_bits = static_cast<unsigned>(exec_aux_program().size());
    constants_.halt_bits = static_cast<unsigned>(halt_program().size());
}

Expected<Program, DecodeError> Machine::decode(const BitString& bits) const {
    ProgramDecoder dec(bits, 0, width_);
    auto p = dec.run();
    if (!p) return dec.error();
    if (dec.position() != bits.size()) return DecodeError{DecodeErrorKind::Overrun, dec.position()};
    return std::move(*p);
}

Program Machine::decode_or_throw(const BitString& bits) const {
    auto r = decode(bits);
    if (!r) throw std::invalid_argument("program does not decode: " + r.error().describe());
    return std::move(r).value();
}

BitString Machine::encode(const Program& p) const {
    auto enc_block = [&](auto&& self, std::uint32_t b) -> BitString {
        BitString out;
        for (auto idx : p.block_instrs(b)) {
            const auto& in = p.instrs()[idx];
            out.append(code::opcode(in.op));
            switch (in.op) {
                case Op::Sym: out.append(BitString::from_uint(in.arg, p.symbol_width())); break;
                case Op::Repeat: out.append(code::gamma(in.arg)).append(self(self, in.first)); break;
                case Op::Literal:
                    out.append(code::gamma(in.arg + 1));
                    out.append(p.code().slice(in.first, in.first + in.arg * p.symbol_width()));
                    break;
                case Op::Read:
                case Op::Pipe:
                case Op::Chain:
                    out.append(self(self, in.first)).append(self(self, in.second));
                    break;
                case Op::Loop: out.append(self(self, in.first)); break;
                case Op::Search: out.append(code::gamma(in.arg)); break;
                case Op::Enum: out.append(code::gamma(in.arg + 1)).append(self(self, in.first)); break;
                default: break;
            }
        }
        return out.append(code::end());
    };
    return enc_block(enc_block, Program::kRoot);
}

ExecutionOutcome Machine::run(const Program& program, const BitString& aux, std::uint64_t step_budget) const {
    if (step_budget < 1) throw std::invalid_argument("run: step budget must be at least 1");
    if (program.symbol_width() != width_) throw std::invalid_argument("run: program built for another machine");
    Interpreter in(width_, step_budget);
    AuxTape tape;
    tape.bits.assign(aux.bits().begin(), aux.bits().end());
    Sink sink;
    in.run(program, tape, sink, 0);
    ExecutionOutcome out;
    out.steps_used = std::min(in.steps(), step_budget);
    out.aux_bits_read = tape.pos;
    switch (in.stop()) {
        case Stop::None:
            out.status = RunStatus::Halted;
            out.tape = std::move(sink.tape);
            break;
        case Stop::Decode: out.status = RunStatus::DecodeError; break;
        default: out.status = RunStatus::OutOfBudget; break;
    }
    return out;
}

bool Machine::produces(const Program& program, const BitString& aux, const Tape& target,
                       std::uint64_t step_budget, std::uint64_t* steps_used) const {
    Interpreter in(width_, step_budget);
    AuxTape tape;
    tape.bits.assign(aux.bits().begin(), aux.bits().end());
    Sink sink;
    sink.target = &target;
    in.run(program, tape, sink, 0);
    if (steps_used) *steps_used = std::min(in.steps(), step_budget);
    return in.stop() == Stop::None && sink.tape.size() == target.size();
}

Tape Machine::tape_of(const SymbolString& x) const {
    Tape t;
    t.reserve(x.size() * (width_ + 1));
    for (auto s : x.symbols()) {
        if (width_ < 32 && (s >> width_) != 0) throw std::invalid_argument("symbol does not fit the machine's symbol width");
        for (unsigned i = width_; i-- > 0;) t.push_back(static_cast<std::uint8_t>((s >> i) & 1));
        t.push_back(kDelim);
    }
    return t;
}

Tape Machine::joint_tape(const SymbolString& x, const SymbolString& w) const {
    Tape t = tape_of(x);
    t.push_back(kDelim);
    const Tape tw = tape_of(w);
    t.insert(t.end(), tw.begin(), tw.end());
    return t;
}

std::optional<std::vector<SymbolString>> Machine::split_tape(const Tape& tape) const {
    std::vector<SymbolString> parts;
    std::vector<std::uint32_t> cur;
    std::size_t i = 0;
    while (i < tape.size()) {
        if (tape[i] == kDelim) {
            parts.emplace_back(std::move(cur), alphabet_);
            cur.clear();
            ++i;
            continue;
        }
        if (i + width_ >= tape.size()) return std::nullopt;
        std::uint32_t v = 0;
        for (unsigned j = 0; j < width_; ++j) {
            if (tape[i + j] == kDelim) return std::nullopt;
            v = (v << 1) | tape[i + j];
        }
        if (tape[i + width_] != kDelim || v >= alphabet_) return std::nullopt;
        cur.push_back(v);
        i += width_ + 1;
    }
    parts.emplace_back(std::move(cur), alphabet_);
    return parts;
}

Program Machine::halt_program() const { return decode_or_throw(code::end()); }

Program Machine::literal_program(const SymbolString& x) const {
    for (auto s : x.symbols()) {
        if (width_ < 32 && (s >> width_) != 0) throw std::invalid_argument("literal_program: symbol too wide");
    }
    return decode_or_throw(code::block({code::literal(x, width_)}));
}

Program Machine::copy_aux_program() const { return decode_or_throw(code::block({code::copy_aux()})); }
Program Machine::exec_aux_program() const { return decode_or_throw(code::block({code::exec_aux()})); }

Program Machine::compose(const Program& p, const Program& q) const {
    return decode_or_throw(code::block({code::pipe(p.code(), q.code())}));
}

Program Machine::chain(const Program& p, const Program& q) const {
    return decode_or_throw(code::block({code::chain(p.code(), q.code())}));
}

std::string Machine::version_hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
}

std::string Machine::descriptor_json() const {
    nlohmann::ordered_json j;
    j["isa"] = kIsaVersion;
    j["alphabet_size"] = alphabet_;
    j["symbol_width"] = width_;
    j["integer_code"] = "elias-gamma: floor(log2 n) zeros, then n in binary";
    j["output_tape"] = "each symbol is symbol_width bits closed by a delimiter; a bare delimiter separates parts";
    auto ops = nlohmann::ordered_json::array();
    for (const auto& op : kOpcodes) {
        ops.push_back({{"name", op.name}, {"code", op.code}, {"operands", op.operands}, {"summary", op.summary}});
    }
    j["opcodes"] = ops;
    j["constants"] = {{"c_lit", constants_.c_lit},
                      {"c_pair", constants_.c_pair},
                      {"copy_bits", constants_.copy_bits},
                      {"exec_aux_bits", constants_.exec_bits},
                      {"halt_bits", constants_.halt_bits}};
    j["max_nesting"] = kMaxNesting;
    j["version_hash"] = version_hash_hex();
    return j.dump(2);
}

}  // namespace ait
