#pragma once

// Universal-prior weights, conditional prediction over supplied
// continuations, and the expected-error functional over candidate sets.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ait/enumerator.hpp"
#include "ait/rational.hpp"

namespace ait {

struct PriorWeight {
    ComplexityEstimate estimate;
    Rational weight;  // 2^-value_bits
};

PriorWeight universal_prior_weight(const Machine& m, const SymbolString& alpha, const SearchBudget& budget);

struct CoinflipReport {
    Rational mass;             // fraction of n-bit strings whose program prefix outputs alpha
    std::uint64_t n = 0;
    bool exhaustive = true;
    std::uint64_t samples = 0;  // sampling mode only
    std::uint64_t hits = 0;     // sampling mode only
    Rational prior;            // 2^-K̂(alpha)
    std::uint64_t witness_bits = 0;
    // mass - prior, meaningful when the witness fits in n bits.
    std::optional<Rational> surplus;
    bool prior_dominated = true;  // mass >= prior whenever the witness fits
};

inline constexpr unsigned kExhaustiveCoinflipBits = 24;

// Exhaustive for n <= kExhaustiveCoinflipBits; above that a seed is required
// and `samples` uniformly random n-bit strings are drawn.
CoinflipReport coinflip_mass(const Machine& m, const SymbolString& alpha, unsigned n, const SearchBudget& budget,
                             std::optional<std::uint64_t> seed = std::nullopt, std::uint64_t samples = 100000);

struct CandidatePrediction {
    SymbolString w;
    ComplexityEstimate estimate;  // K̂(w | x̂*)
    Rational raw_weight;
    Rational probability;
};

struct PredictionReport {
    SymbolString x;
    ComplexityEstimate x_star;
    SearchBudget budget;
    std::vector<CandidatePrediction> candidates;

    Rational probability_sum() const;
};

// Throws std::invalid_argument on an empty or duplicated continuation list.
PredictionReport predict(const Machine& m, const SymbolString& x, const std::vector<SymbolString>& continuations,
                         const SearchBudget& budget);

struct Candidate {
    Program program;
    SymbolString generated;
};

struct CandidateSet {
    std::vector<Candidate> members;
    SearchBudget budget;  // every program of at most L bits was run for S steps
};

// All programs of at most L bits that halt within S steps with an output
// starting with x, in shortlex order.
CandidateSet enumerate_candidates(const Machine& m, const SymbolString& x, const SearchBudget& budget);

// max(K̂(y|z), K̂(z|y)) over the program codes as binary strings.
std::uint64_t pairwise_error(const Machine& m, const Program& y, const Program& z, const SearchBudget& budget);

// Memoizes the estimates behind expected_error so rankings stay affordable.
class ErrorTable {
public:
    ErrorTable(const Machine& m, SearchBudget budget) : m_(m), budget_(std::move(budget)) {}
    std::uint64_t error(const Program& y, const Program& z);
    std::uint64_t complexity(const Program& y);

private:
    std::uint64_t cond(const Program& a, const Program& b);
    const Machine& m_;
    SearchBudget budget_;
    std::map<std::pair<BitString, BitString>, std::uint64_t> cond_;
    std::map<BitString, std::uint64_t> plain_;
};

Rational expected_error(const Machine& m, const Program& z, const CandidateSet& Y, const SearchBudget& budget);
Rational expected_error(ErrorTable& table, const Program& z, const CandidateSet& Y);

struct RankedCandidate {
    Program z;
    Rational expected_error;
};

// Ranks each z by expected error over Y, ascending; ties keep shortlex order.
std::vector<RankedCandidate> rank_by_expected_error(ErrorTable& table, const std::vector<Program>& zs,
                                                    const CandidateSet& Y);

}  // namespace ait
