#pragma once

// Probability models over symbols: empirical distributions, entropy, the
// entropy-complexity viability bound and Shannon codes as code trees.

#include <stdexcept>
#include <string>
#include <vector>

#include "ait/mdl.hpp"
#include "ait/rational.hpp"

namespace ait {

class Distribution {
public:
    // Throws std::invalid_argument unless every p_i >= 0 and the sum is 1.
    explicit Distribution(std::vector<Rational> p);
    static Distribution uniform(unsigned m);
    // {"m": 2, "p": ["1/2", "1/2"]}
    static Distribution from_json(const std::string& text);
    std::string to_json() const;

    unsigned alphabet_size() const noexcept { return static_cast<unsigned>(p_.size()); }
    const Rational& operator[](std::size_t i) const { return p_.at(i); }
    const std::vector<Rational>& probabilities() const noexcept { return p_; }

private:
    std::vector<Rational> p_;
};

// Rational enclosure [lo, hi] of a real quantity; the fractional precision
// is 64 bits, rounded outward.
struct Interval {
    Rational lo;
    Rational hi;
    double mid() const;
};

inline constexpr unsigned kFractionBits = 64;

// log2(r) for r > 0, enclosed.
Interval log2_interval(const Rational& r);

Distribution empirical(const SymbolString& x, unsigned m);
std::vector<std::uint64_t> symbol_counts(const SymbolString& x, unsigned m);

struct EntropyReport {
    double bits = 0;                // per symbol
    std::optional<Rational> exact;  // when every nonzero p_i is a power of two
    Interval enclosure;
    double divergence_from_uniform = 0;  // log2 m - H
    std::uint64_t n = 0;                 // sample size, 0 for a bare distribution
};

EntropyReport entropy(const Distribution& d);
// Entropy of the empirical distribution of x.
EntropyReport entropy(const SymbolString& x, unsigned m);

struct BudgetReport {
    double bits = 0;
    Interval enclosure;
};

// n (log2 m - H(p)).
BudgetReport model_complexity_budget(std::uint64_t n, unsigned m, const Distribution& p);

struct InfiniteCodeLength : std::domain_error {
    using std::domain_error::domain_error;
};

enum class Verdict { Viable, NotViable };
std::string_view to_string(Verdict v);

struct ViabilityReport {
    Verdict verdict = Verdict::NotViable;
    std::uint64_t n = 0;
    std::uint64_t model_bits = 0;
    Interval codelength;        // sum of log2(1/q(x_i))
    double uniform_bits = 0;    // n log2 m
    double total_bits = 0;      // model_bits + codelength
    BudgetReport budget;        // n (log2 m - H(p)) for the empirical p
    bool within_budget = false; // model_bits < budget (exact)
    Interval gibbs_gap;         // H(p, q) - H(p) per symbol, never negative
    bool gibbs_holds = false;   // exact comparison
};

// Throws InfiniteCodeLength when q gives zero probability to a symbol of x.
ViabilityReport check_model_viability(const Distribution& q, const SymbolString& x, std::uint64_t q_model_bits);

// Exact test of model_bits + sum log2(1/q(x_i)) >= bits.
bool two_part_at_least(const Distribution& q, const SymbolString& x, std::uint64_t model_bits, std::uint64_t bits);

// Exact Gibbs comparison: sum p_i log(p_i/q_i) >= 0 for p, q with q_i > 0
// wherever p_i > 0.
bool gibbs_inequality_holds(const Distribution& p, const Distribution& q);

struct PerSymbolBound {
    std::vector<Interval> bounds;  // K̂(alpha_i) - log2(1/q_i)
    std::size_t argmax = 0;
    Interval max;
    // K̂ overestimates K(alpha), so each bound overestimates the true
    // requirement on the model's complexity.
    static constexpr std::string_view kOrientation = "upper_estimate_of_lower_bound";
};

PerSymbolBound per_symbol_bound(const Distribution& q, const std::vector<std::uint64_t>& symbol_complexities);

// Shannon code: codeword i has ceil(log2(1/q_i)) bits; canonical assignment.
std::vector<unsigned> shannon_lengths(const Distribution& q);
CodeTree codetree_from_distribution(const Machine& m, const Distribution& q, const std::vector<SymbolString>& labels);

}  // namespace ait
