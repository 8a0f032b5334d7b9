#pragma once

// Budget-bounded search for short programs. Every estimate is an upper bound
// certified by a witness program that replays to the subject.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ait/bits.hpp"
#include "ait/expected.hpp"
#include "ait/machine.hpp"

namespace ait {

struct SearchBudget {
    unsigned max_program_bits = 24;    // L
    std::uint64_t max_steps = 100000;  // S, per program
    // Optional wall-clock cap. When it fires the search stops early and the
    // estimate's exhausted_below records how far it got.
    std::optional<std::chrono::milliseconds> wall_clock;
    unsigned jobs = 1;  // worker threads; does not affect results

    void validate() const;
    friend bool operator==(const SearchBudget& a, const SearchBudget& b) {
        return a.max_program_bits == b.max_program_bits && a.max_steps == b.max_steps &&
               a.wall_clock == b.wall_clock;
    }
};

enum class EstimateKind : std::uint8_t { Plain, Conditional, Joint };
std::string_view to_string(EstimateKind kind);

struct ComplexityEstimate {
    EstimateKind kind = EstimateKind::Plain;
    SymbolString subject;       // x, a, or the first string of a joint pair
    SymbolString second;        // w for Joint, empty otherwise
    BitString conditioning;     // aux tape for Conditional, empty otherwise
    std::uint64_t value_bits = 0;
    Program witness;
    std::uint64_t witness_steps = 0;  // steps the witness needs to halt
    SearchBudget budget;
    // Every program shorter than this was run to S steps without success.
    std::uint64_t exhausted_below = 0;
    // "search", "literal", or a construction name for joint bounds.
    std::string method;

    // Output tape the witness must leave.
    Tape target(const Machine& m) const;
};

// Replays the witness under the estimate's conditioning.
bool verify(const Machine& m, const ComplexityEstimate& e);

struct SearchHit {
    Program program;
    std::uint64_t steps = 0;
};

struct SearchResult {
    std::optional<SearchHit> hit;
    std::uint64_t exhausted_below = 0;
    std::uint64_t programs_tried = 0;
};

// Shortlex-first program of at most L bits that leaves exactly `target` on
// the tape within S steps, given the aux tape.
SearchResult search_shortest(const Machine& m, const Tape& target, const BitString& aux,
                             const SearchBudget& budget);

ComplexityEstimate estimate_K(const Machine& m, const SymbolString& x, const SearchBudget& budget);
ComplexityEstimate estimate_K_cond(const Machine& m, const SymbolString& a, const BitString& b_aux,
                                   const SearchBudget& budget);
// Best of a direct search for the joint tape and the chained bound
// chain(x̂*, witness of w given x̂*).
ComplexityEstimate estimate_K_joint(const Machine& m, const SymbolString& x, const SymbolString& w,
                                    const SearchBudget& budget);

struct StepSchedule {
    std::uint64_t initial_steps = 1;
    std::chrono::milliseconds wall_clock{10000};
};

struct NotFound {
    std::uint64_t rounds_completed = 0;
};

// Dovetails the programs of exactly target_bits bits with a doubling step
// allowance until one halts with output x or the wall clock runs out.
Expected<Program, NotFound> find_with_target_length(const Machine& m, const SymbolString& x,
                                                     unsigned target_bits, const StepSchedule& schedule);

unsigned kstar_hint_width(const Machine& m, const SymbolString& x);
// ceil(log2(len(literal_program(x)) + 1)) bits, fixed for a given x.
BitString encode_kstar_hint(const Machine& m, const SymbolString& x, std::uint64_t k_bits);
std::uint64_t decode_kstar_hint(const BitString& hint);

}  // namespace ait
