#pragma once

// The reference machine: a block-structured, prefix-free instruction set whose
// programs emit delimited symbols onto an output tape and may read a
// read-only auxiliary tape. Every program is a block; a block is a sequence
// of instructions closed by END, so decoding always knows where a program
// stops and no program is a proper prefix of another.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ait/bits.hpp"
#include "ait/expected.hpp"

namespace ait {

enum class Op : std::uint8_t {
    End,
    Sym,
    Repeat,
    Literal,
    Read,
    CopyAux,
    ExecAux,
    Loop,
    Pipe,
    Chain,
    Search,
    Emit0,
    Emit1,
    Enum,
    Delim,
    Bad,
};

struct OpcodeInfo {
    Op op;
    std::string_view name;
    std::string_view code;
    // Operand layout: 'w' symbol payload (bits_per_symbol bits), 'g' Elias
    // gamma integer, 'L' literal length (gamma of n+1) followed by n symbols,
    // 'B' nested block.
    std::string_view operands;
    std::string_view summary;
};

std::span<const OpcodeInfo> opcode_table();
const OpcodeInfo& opcode_info(Op op);

// Output tape alphabet: bit 0, bit 1, and the symbol delimiter.
inline constexpr std::uint8_t kDelim = 2;
using Tape = std::vector<std::uint8_t>;

enum class DecodeErrorKind { Truncated, Overrun, BadOpcode };

struct DecodeError {
    DecodeErrorKind kind;
    std::size_t position = 0;

    std::string describe() const;
    friend bool operator==(const DecodeError&, const DecodeError&) = default;
};

std::string_view to_string(DecodeErrorKind kind);

class Program {
public:
    struct Instr {
        Op op = Op::End;
        std::uint64_t arg = 0;        // symbol value, count, literal length, k, or l
        std::uint32_t first = 0;      // nested block index, or literal payload offset
        std::uint32_t second = 0;     // second nested block index
    };
    struct Block {
        std::uint32_t instr_begin = 0;  // range into instr_order()
        std::uint32_t instr_end = 0;
        std::uint32_t code_begin = 0;   // bit range of the block, END included
        std::uint32_t code_end = 0;
        // Steps one execution of the block costs when it has no observable
        // effect (only END and REPEAT of such blocks); kNotStatic otherwise.
        std::uint64_t static_cost = 0;
    };
    static constexpr std::uint64_t kNotStatic = UINT64_MAX;

    const BitString& code() const noexcept { return code_; }
    std::size_t size() const noexcept { return code_.size(); }
    unsigned symbol_width() const noexcept { return width_; }

    std::span<const Instr> instrs() const noexcept { return instrs_; }
    std::span<const Block> blocks() const noexcept { return blocks_; }
    std::span<const std::uint32_t> block_instrs(std::uint32_t block) const;
    static constexpr std::uint32_t kRoot = 0;

    // Human-readable listing, e.g. "REPEAT 16 { SYM 0 SYM 1 } HALT".
    std::string disassemble() const;

    friend bool operator==(const Program& a, const Program& b) {
        return a.width_ == b.width_ && a.code_ == b.code_;
    }

private:
    friend class ProgramDecoder;
    BitString code_;
    unsigned width_ = 1;
    std::vector<Instr> instrs_;
    std::vector<Block> blocks_;
    std::vector<std::uint32_t> order_;
};

enum class RunStatus { Halted, OutOfBudget, DecodeError };
std::string_view to_string(RunStatus status);

struct ExecutionOutcome {
    RunStatus status = RunStatus::OutOfBudget;
    Tape tape;  // empty unless Halted
    std::uint64_t steps_used = 0;
    std::uint64_t aux_bits_read = 0;

    // The delimited tape read back as symbols; nullopt when not halted or
    // when the tape is not a well-formed symbol sequence for the alphabet.
    std::optional<SymbolString> output(unsigned alphabet_size) const;
    friend bool operator==(const ExecutionOutcome&, const ExecutionOutcome&) = default;
};

// Measured constants of a machine instance.
struct MachineConstants {
    unsigned c_lit = 0;     // literal framing beyond 2*ceil(log2(n+1))
    unsigned c_pair = 0;    // compose/chain framing
    unsigned copy_bits = 0; // COPYAUX HALT
    unsigned exec_bits = 0; // EXECAUX HALT
    unsigned halt_bits = 0; // HALT
};

class Machine {
public:
    static constexpr std::string_view kIsaVersion = "ait-isa-1";
    // Nesting limit for sub-machines (EXECAUX, SEARCH, PIPE, CHAIN, ENUM).
    // Exceeding it ends the run as OutOfBudget regardless of step budget.
    static constexpr unsigned kMaxNesting = 64;

    explicit Machine(unsigned alphabet_size = 2);

    unsigned alphabet_size() const noexcept { return alphabet_; }
    unsigned symbol_width() const noexcept { return width_; }

    Expected<Program, DecodeError> decode(const BitString& code) const;
    Program decode_or_throw(const BitString& code) const;
    // Re-serializes the decoded form; decode(encode(p)) == p.
    BitString encode(const Program& program) const;

    ExecutionOutcome run(const Program& program, const BitString& aux, std::uint64_t step_budget) const;
    // True iff the program halts within budget with exactly `target` on the
    // output tape. Stops early once the output diverges from the target.
    bool produces(const Program& program, const BitString& aux, const Tape& target,
                  std::uint64_t step_budget, std::uint64_t* steps_used = nullptr) const;

    Tape tape_of(const SymbolString& x) const;
    // x, an empty separator symbol, then w.
    Tape joint_tape(const SymbolString& x, const SymbolString& w) const;
    // Splits a tape on empty separators; nullopt if any part is malformed.
    std::optional<std::vector<SymbolString>> split_tape(const Tape& tape) const;

    Program halt_program() const;
    Program literal_program(const SymbolString& x) const;
    Program copy_aux_program() const;
    Program exec_aux_program() const;
    // Runs p with its output captured, then q with that output (as symbol
    // bits) ahead of the remaining aux tape.
    Program compose(const Program& p, const Program& q) const;
    // Runs p, emits a separator, then runs q with p's code ahead of the
    // remaining aux tape.
    Program chain(const Program& p, const Program& q) const;

    const MachineConstants& constants() const noexcept { return constants_; }
    std::uint64_t version_hash() const noexcept { return hash_; }
    std::string version_hash_hex() const;
    // JSON descriptor: opcode table, encodings, constants, version hash.
    std::string descriptor_json() const;

private:
    unsigned alphabet_;
    unsigned width_;
    MachineConstants constants_;
    std::uint64_t hash_ = 0;
};

// Bit-level builders for program code. Block arguments are complete blocks
// (END included); `block` closes a list of instructions with END.
namespace code {
BitString gamma(std::uint64_t n);
BitString opcode(Op op);
BitString end();
BitString block(std::initializer_list<BitString> instrs);
BitString block(const std::vector<BitString>& instrs);
BitString sym(std::uint32_t value, unsigned width);
BitString repeat(std::uint64_t count, const BitString& body);
BitString literal(const SymbolString& x, unsigned width);
BitString read(const BitString& on_zero, const BitString& on_one);
BitString copy_aux();
BitString exec_aux();
BitString loop(const BitString& body);
BitString pipe(const BitString& first, const BitString& second);
BitString chain(const BitString& first, const BitString& second);
BitString search(std::uint64_t k);
BitString emit(bool bit);
BitString delim();
BitString enum_codes(std::uint64_t codeword_bits, const BitString& body);
// Shortest of a SYM sequence and a LITERAL emitting x.
BitString emit_string(const SymbolString& x, unsigned width);
}  // namespace code

// Length of the Elias gamma code of n >= 1.
unsigned gamma_length(std::uint64_t n);
unsigned ceil_log2(std::uint64_t n);

}  // namespace ait
