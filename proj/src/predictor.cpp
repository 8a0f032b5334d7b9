#include "ait/predictor.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "ait/program_space.hpp"

namespace ait {

PriorWeight universal_prior_weight(const Machine& m, const SymbolString& alpha, const SearchBudget& budget) {
    auto e = estimate_K(m, alpha, budget);
    Rational w = dyadic(e.value_bits);
    return {std::move(e), std::move(w)};
}

CoinflipReport coinflip_mass(const Machine& m, const SymbolString& alpha, unsigned n, const SearchBudget& budget,
                             std::optional<std::uint64_t> seed, std::uint64_t samples) {
    if (n < 1) throw std::invalid_argument("coinflip_mass: n must be at least 1");
    if (n > kExhaustiveCoinflipBits && !seed) {
        throw std::invalid_argument("coinflip_mass: n above the exhaustive threshold needs a sampling seed");
    }
    CoinflipReport rep;
    rep.n = n;
    const Tape target = m.tape_of(alpha);
    const auto prior = universal_prior_weight(m, alpha, budget);
    rep.prior = prior.weight;
    rep.witness_bits = prior.estimate.value_bits;

    if (n <= kExhaustiveCoinflipBits) {
        // Prefix-freeness: each program of length l owns exactly 2^(n-l) of the n-bit strings.
        for (unsigned len = 1; len <= n; ++len) {
            std::uint64_t count = 0;
            for_each_program(m.symbol_width(), len, [&](const std::vector<std::uint8_t>& bits) {
                if (m.produces(m.decode_or_throw(BitString(bits)), {}, target, budget.max_steps)) ++count;
                return true;
            });
            rep.mass += Rational(count) * dyadic(len);
        }
    } else {
        rep.exhaustive = false;
        rep.samples = samples;
        std::mt19937_64 rng(*seed);
        for (std::uint64_t s = 0; s < samples; ++s) {
            PrefixParser parser(m.symbol_width());
            BitString prefix;
            for (unsigned i = 0; i < n; ++i) {
                const auto bit = static_cast<std::uint8_t>(rng() & 1);
                prefix.push_back(bit);
                if (parser.feed(bit) != PrefixParser::State::Open) break;
            }
            if (parser.state() != PrefixParser::State::Complete) continue;
            if (m.produces(m.decode_or_throw(prefix), {}, target, budget.max_steps)) ++rep.hits;
        }
        rep.mass = Rational(BigInt(rep.hits), BigInt(samples));
    }
    if (rep.exhaustive && rep.witness_bits <= n) {
        rep.surplus = rep.mass - rep.prior;
        rep.prior_dominated = rep.mass >= rep.prior;
    }
    return rep;
}

Rational PredictionReport::probability_sum() const {
    Rational s = 0;
    for (const auto& c : candidates) s += c.probability;
    return s;
}

PredictionReport predict(const Machine& m, const SymbolString& x, const std::vector<SymbolString>& continuations,
                         const SearchBudget& budget) {
    if (continuations.empty()) throw std::invalid_argument("predict: no continuations");
    std::set<SymbolString> seen;
    for (const auto& w : continuations) {
        if (!seen.insert(w).second) throw std::invalid_argument("predict: duplicate continuation " + w.to_string());
    }
    PredictionReport rep;
    rep.x = x;
    rep.budget = budget;
    rep.x_star = estimate_K(m, x, budget);
    Rational total = 0;
    for (const auto& w : continuations) {
        CandidatePrediction c;
        c.w = w;
        c.estimate = estimate_K_cond(m, w, rep.x_star.witness.code(), budget);
        c.raw_weight = dyadic(c.estimate.value_bits);
        total += c.raw_weight;
        rep.candidates.push_back(std::move(c));
    }
    for (auto& c : rep.candidates) c.probability = c.raw_weight / total;
    return rep;
}

CandidateSet enumerate_candidates(const Machine& m, const SymbolString& x, const SearchBudget& budget) {
    budget.validate();
    CandidateSet set;
    set.budget = budget;
    for (unsigned n = 1; n <= budget.max_program_bits; ++n) {
        for_each_program(m.symbol_width(), n, [&](const std::vector<std::uint8_t>& bits) {
            Program p = m.decode_or_throw(BitString(bits));
            const auto out = m.run(p, {}, budget.max_steps);
            if (out.status != RunStatus::Halted) return true;
            auto s = out.output(m.alphabet_size());
            if (s && s->starts_with(x)) set.members.push_back({std::move(p), std::move(*s)});
            return true;
        });
    }
    return set;
}

std::uint64_t ErrorTable::cond(const Program& a, const Program& b) {
    auto key = std::make_pair(a.code(), b.code());
    if (auto it = cond_.find(key); it != cond_.end()) return it->second;
    const auto v = estimate_K_cond(m_, SymbolString::from_bits(a.code()), b.code(), budget_).value_bits;
    cond_.emplace(std::move(key), v);
    return v;
}

std::uint64_t ErrorTable::error(const Program& y, const Program& z) { return std::max(cond(y, z), cond(z, y)); }

std::uint64_t ErrorTable::complexity(const Program& y) {
    if (auto it = plain_.find(y.code()); it != plain_.end()) return it->second;
    const auto v = estimate_K(m_, SymbolString::from_bits(y.code()), budget_).value_bits;
    plain_.emplace(y.code(), v);
    return v;
}

std::uint64_t pairwise_error(const Machine& m, const Program& y, const Program& z, const SearchBudget& budget) {
    ErrorTable t(m, budget);
    return t.error(y, z);
}

Rational expected_error(ErrorTable& table, const Program& z, const CandidateSet& Y) {
    if (Y.members.empty()) throw std::invalid_argument("expected_error: empty candidate set");
    Rational sum = 0;
    for (const auto& y : Y.members) {
        sum += Rational(table.error(y.program, z)) * dyadic(table.complexity(y.program));
    }
    return sum;
}

Rational expected_error(const Machine& m, const Program& z, const CandidateSet& Y, const SearchBudget& budget) {
    ErrorTable t(m, budget);
    return expected_error(t, z, Y);
}

std::vector<RankedCandidate> rank_by_expected_error(ErrorTable& table, const std::vector<Program>& zs,
                                                    const CandidateSet& Y) {
    std::vector<RankedCandidate> out;
    for (const auto& z : zs) out.push_back({z, expected_error(table, z, Y)});
    std::stable_sort(out.begin(), out.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.expected_error != b.expected_error) return a.expected_error < b.expected_error;
        return a.z.code() < b.z.code();
    });
    return out;
}

}  // namespace ait
