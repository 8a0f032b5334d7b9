#pragma once

// Computable models: prefix-free code trees with a decoder program, two-part
// description lengths, finite-set models and randomness deficiency, the
// structure sweep, and hillclimbing over a parameterized model family.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ait/enumerator.hpp"
#include "ait/rational.hpp"

namespace ait {

enum class CodeTreeError { NotPrefixFree, KraftViolation, NotBijective, NotCompact, DecoderMismatch };
std::string_view to_string(CodeTreeError e);

struct CodeTreeEntry {
    BitString codeword;
    SymbolString value;
};

class CodeTree {
public:
    enum class Kind : std::uint8_t {
        Table,    // explicit entries; decoder is a READ tree
        Uniform,  // every codeword of a fixed width is valid; decoder computes the value
        Literal,  // fallback: codeword is literal_program(x), decoder is EXECAUX
    };
    using Encoder = std::function<std::optional<BitString>(const SymbolString&)>;

    // Builds a table tree. Codewords must be prefix-free, Kraft-admissible,
    // bijective and, unless allow_sparse, compact (no single-child nodes).
    static Expected<CodeTree, CodeTreeError> from_table(const Machine& m, std::string name,
                                                        std::vector<CodeTreeEntry> entries,
                                                        bool allow_sparse = false);
    // A complete code of `width` bits; `encode` maps covered strings to their
    // codeword. The decoder must realize the inverse; checked on use.
    static CodeTree uniform(std::string name, Program decoder, unsigned width, Encoder encode);
    static CodeTree literal(const Machine& m);

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    const Program& decoder() const noexcept { return decoder_; }
    std::uint64_t description_bits() const noexcept { return decoder_.size(); }
    const std::vector<CodeTreeEntry>& entries() const noexcept { return entries_; }
    unsigned uniform_width() const noexcept { return width_; }
    bool compact() const noexcept { return compact_; }

    // Codeword for x, or nullopt when x is outside the tree's image.
    std::optional<BitString> encode(const Machine& m, const SymbolString& x) const;
    // Runs the decoder on the codeword.
    std::optional<SymbolString> decode(const Machine& m, const BitString& r) const;
    // Same entries with every single-child node collapsed.
    CodeTree compacted(const Machine& m) const;

private:
    Kind kind_ = Kind::Table;
    std::string name_;
    Program decoder_;
    std::vector<CodeTreeEntry> entries_;
    unsigned width_ = 0;
    Encoder encode_;
    bool compact_ = true;
};

// Exact Kraft sum. For the literal tree this is the closed form over all
// strings, exact for power-of-two alphabets and an upper bound otherwise.
Rational check_kraft(const CodeTree& tree);
// Throws KraftViolation-style std::domain_error when the sum exceeds one.
void require_kraft(const CodeTree& tree);

// Decoder for a prefix-free table, as nested READ branches.
BitString read_tree_decoder(const Machine& m, const std::vector<CodeTreeEntry>& entries);

struct NotCovered {};
Expected<BitString, NotCovered> encode_with_model(const Machine& m, const CodeTree& tree, const SymbolString& x);

struct TwoPartDescription {
    std::string model;
    std::uint64_t model_bits = 0;
    std::uint64_t data_bits = 0;
    std::uint64_t total_bits = 0;
    BitString codeword;
    bool fallback = false;  // the tree did not cover x; literal tree used
    // Set when the codeword itself compresses by more than the margin, which
    // means the model is not the only compressive part.
    std::optional<bool> data_compressible;
};

// Falls back to the literal tree when x is not covered. Verifies that the
// decoder reproduces x from the codeword.
TwoPartDescription two_part_length(const Machine& m, const CodeTree& tree, const SymbolString& x);

struct Ranking {
    std::size_t best = 0;  // index into the candidate list
    std::vector<std::size_t> order;
    std::vector<TwoPartDescription> descriptions;  // by candidate index
};

struct CompressibilityCheck {
    SearchBudget budget;
    std::uint64_t margin_bits = 2;
};

Ranking select_mdl(const Machine& m, const std::vector<CodeTree>& candidates, const SymbolString& x,
                   const std::optional<CompressibilityCheck>& check = std::nullopt);

// --- Finite-set models -----------------------------------------------------

struct FiniteSetModel {
    std::string name;
    Program enumerator;
    std::uint64_t cardinality = 0;
    // Members in enumeration order; left empty for sets too large to list,
    // which then rely on `membership`.
    std::vector<SymbolString> members;
    std::function<bool(const SymbolString&)> membership;
    std::uint64_t model_bits = 0;  // K̂ of the enumeration

    // log2|S| when |S| is a power of two.
    std::optional<Rational> log_cardinality_exact() const;
    // ceil(log2|S|), the integer data-to-model code length.
    std::uint64_t log_cardinality_bits() const;
    double log_cardinality() const;
    bool contains(const SymbolString& x) const;
};

// Runs the enumerator and reads back the members; throws if they repeat or
// the enumeration does not halt within the budget. model_bits is the shorter
// of the enumerator itself and any program of at most L bits found for the
// same enumeration.
FiniteSetModel finite_set_from_enumerator(const Machine& m, std::string name, const Program& enumerator,
                                          const SearchBudget& budget);
FiniteSetModel cube_model(const Machine& m, std::size_t n, const SearchBudget& budget);
FiniteSetModel singleton_model(const Machine& m, const SymbolString& x, const SearchBudget& budget);
// {a, b} enumerated as two chained descriptions.
FiniteSetModel pair_model(const Machine& m, const SymbolString& a, const SymbolString& b, const SearchBudget& budget);

struct DeficiencyReport {
    std::uint64_t cardinality = 0;
    double log_cardinality = 0;
    std::optional<Rational> log_cardinality_exact;
    ComplexityEstimate k_cond;  // K̂(x | enumerator code)
    double deficiency = 0;      // log2|S| - K̂(x|S)
    std::optional<Rational> deficiency_exact;
    // K̂ overestimates K, so the reported value is a lower bound on the truth.
    static constexpr std::string_view kOrientation = "lower_bound";
};

struct NotMember {};
Expected<DeficiencyReport, NotMember> randomness_deficiency(const Machine& m, const SymbolString& x,
                                                            const FiniteSetModel& S, const SearchBudget& budget);

struct SweepPoint {
    std::uint64_t alpha_bits = 0;
    std::uint64_t log_cardinality_bits = 0;
    double log_cardinality = 0;
    std::string model;
    std::uint64_t total_bits = 0;  // model_bits + log_cardinality_bits
};

struct SweepReport {
    std::vector<SweepPoint> curve;
    std::uint64_t k_hat = 0;
    std::uint64_t slack_bits = 4;
    std::optional<SweepPoint> knee;
    bool strictly_decreasing = false;
    bool non_increasing = false;
};

SweepReport structure_sweep(const Machine& m, const SymbolString& x, const std::vector<FiniteSetModel>& family,
                            const SearchBudget& budget, std::uint64_t slack_bits = 4);

// --- Hillclimbing ----------------------------------------------------------

using ModelKey = std::vector<int>;

struct HillclimbProblem {
    std::function<std::uint64_t(const ModelKey&)> objective;
    std::function<std::vector<ModelKey>(const ModelKey&)> neighbors;
};

struct HillclimbStep {
    ModelKey key;
    std::uint64_t total_bits = 0;
};

struct HillclimbResult {
    ModelKey best;
    std::uint64_t total_bits = 0;
    std::vector<HillclimbStep> trace;
    bool local_optimum = false;  // every neighbor of `best` is at least as long
    std::size_t iterations = 0;
};

// Steepest descent; equal-valued neighbors are ordered by a seeded shuffle.
HillclimbResult hillclimb(const HillclimbProblem& problem, const ModelKey& initial, const SymbolString& x,
                          std::size_t max_iters, std::uint64_t seed);

// Periodic template family: key {p, k} with period p and the first k
// positions of each period fixed to x's pattern; the remaining positions are
// read from the codeword.
class PeriodicFamily {
public:
    PeriodicFamily(const Machine& m, SymbolString x, int max_period);

    std::vector<ModelKey> grid() const;
    std::vector<ModelKey> neighbors(const ModelKey& key) const;
    CodeTree tree(const ModelKey& key) const;
    std::uint64_t total_bits(const ModelKey& key) const;
    HillclimbProblem problem() const;

private:
    const Machine& m_;
    SymbolString x_;
    int max_period_;
};

// --- Approximation bound ---------------------------------------------------

struct ApproximationBound {
    std::uint64_t total_bits = 0;      // model_bits + data_bits of the approximation
    double bound = 0;                  // log2(total_bits)
    std::optional<std::uint64_t> measured;  // K̂(f | f̃) between decoder codes
    std::uint64_t slack_bits = 0;
    std::optional<bool> within;        // measured <= bound + slack
    std::string witness_method;
};

// Fixed framing of PIPE { EXECAUX } { SEARCH k } plus the excess of the gamma
// code of k over log2 of the total: F + floor(log2 total) + 1.
std::uint64_t approximation_slack(const Machine& m, std::uint64_t total_bits);

// The bound log2(len(f̃) + len(r̃_x)) for the approximation's two-part
// description of x. With a reference model, also measures K̂(f | f̃ r̃_x):
// the reference decoder's code given the approximation's decoder code
// followed by its codeword for x. The measurement is the better of a
// budgeted search and the constructed witness PIPE { EXECAUX } { SEARCH k },
// which rebuilds x from the two-part description and searches the k-bit
// programs for it.
ApproximationBound approximation_error_bound(const Machine& m, const CodeTree& approx, const SymbolString& x,
                                             const std::optional<CodeTree>& reference,
                                             const SearchBudget& budget);

// --- Model packages --------------------------------------------------------

void save_model_package(const CodeTree& tree, const std::filesystem::path& stem);

}  // namespace ait
