#include <random>

#include "ait/predictor.hpp"
#include "doctest.h"

using namespace ait;

namespace {

SearchBudget budget(unsigned bits, std::uint64_t steps) {
    SearchBudget b;
    b.max_program_bits = bits;
    b.max_steps = steps;
    return b;
}

// Brute-force coin-flip count: the first prefix of each n-bit string that
// decodes is the program it selects.
std::uint64_t coinflip_count(const Machine& m, const SymbolString& alpha, unsigned n, std::uint64_t steps) {
    const Tape target = m.tape_of(alpha);
    std::uint64_t count = 0;
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
        const auto s = BitString::from_uint(v, n);
        for (unsigned l = 1; l <= n; ++l) {
            auto p = m.decode(s.slice(0, l));
            if (!p) continue;
            const auto out = m.run(*p, {}, steps);
            if (out.status == RunStatus::Halted && out.tape == target) ++count;
            break;
        }
    }
    return count;
}

}  // namespace

TEST_CASE("universal prior weights") {
    Machine m;
    CHECK(universal_prior_weight(m, SymbolString{}, budget(8, 100)).weight == dyadic(1));
    auto x = SymbolString::parse("0110100111");
    auto lit = universal_prior_weight(m, x, budget(2, 10));
    CHECK(lit.weight == dyadic(m.literal_program(x).size()));
    auto alt = universal_prior_weight(m, alternating(32), budget(24, 100000));
    CHECK(alt.weight > dyadic(32));
    CHECK(to_dyadic_string(alt.weight) == "1/2^20");
}

TEST_CASE("coin-flip mass matches brute force") {
    Machine m;
    const auto zero = SymbolString::parse("0");
    auto rep = coinflip_mass(m, zero, 14, budget(14, 500));
    CHECK(rep.exhaustive);
    CHECK(rep.mass == Rational(BigInt(coinflip_count(m, zero, 14, 500)), BigInt(1) << 14));
    CHECK(rep.mass >= rep.prior);
    REQUIRE(rep.surplus);
    CHECK(*rep.surplus >= 0);

    auto empty = coinflip_mass(m, SymbolString{}, 1, budget(4, 100));
    CHECK(empty.mass >= dyadic(1));
    CHECK_THROWS_AS(coinflip_mass(m, zero, 30, budget(14, 500)), std::invalid_argument);
    auto sampled = coinflip_mass(m, zero, 30, budget(14, 500), 42, 2000);
    CHECK_FALSE(sampled.exhaustive);
    CHECK(sampled.samples == 2000);
}

TEST_CASE("prediction normalizes exactly") {
    Machine m;
    auto b = budget(18, 10000);
    auto one = predict(m, alternating(8), {alternating(2)}, b);
    CHECK(one.candidates.at(0).probability == 1);
    auto rep = predict(m, alternating(16), {alternating(2), constant(2), SymbolString::parse("110")}, b);
    CHECK(rep.probability_sum() == 1);
    for (const auto& c : rep.candidates) {
        CHECK(c.raw_weight > 0);
        CHECK(c.raw_weight <= 1);
        CHECK(c.estimate.conditioning == rep.x_star.witness.code());
    }
    CHECK_THROWS_AS(predict(m, alternating(4), {alternating(2), alternating(2)}, b), std::invalid_argument);
    CHECK_THROWS_AS(predict(m, alternating(4), {}, b), std::invalid_argument);
}

TEST_CASE("longer alternating continuations are preferred") {
    Machine m;
    auto b = budget(20, 10000);
    auto rep = predict(m, alternating(16), {alternating(16), SymbolString::parse("0010110111010001")}, b);
    CHECK(rep.candidates[0].probability > rep.candidates[1].probability);
}

TEST_CASE("pairwise error") {
    Machine m;
    auto b = budget(12, 2000);
    auto y = m.literal_program(SymbolString::parse("01101"));
    auto z = m.literal_program(SymbolString::parse("1110"));
    CHECK(pairwise_error(m, y, y, b) == m.copy_aux_program().size());
    CHECK(pairwise_error(m, y, z, b) == pairwise_error(m, z, y, b));
}

TEST_CASE("triangle diagnostic") {
    Machine m;
    auto b = budget(10, 1000);
    std::mt19937_64 rng(3);
    ErrorTable t(m, b);
    std::int64_t worst = 0;
    for (int i = 0; i < 20; ++i) {
        std::vector<Program> p;
        for (int j = 0; j < 3; ++j) {
            std::vector<std::uint32_t> s(1 + rng() % 6);
            for (auto& v : s) v = rng() & 1;
            p.push_back(m.literal_program(SymbolString(s)));
        }
        const auto ac = static_cast<std::int64_t>(t.error(p[0], p[2]));
        const auto ab_bc = static_cast<std::int64_t>(t.error(p[0], p[1]) + t.error(p[1], p[2]));
        worst = std::max(worst, ac - ab_bc);
    }
    // Literal fallbacks bound every term, so the slack stays below one fallback.
    CHECK(worst <= 30);
}

TEST_CASE("expected error over enumerated candidates") {
    Machine m;
    auto b = budget(16, 10000);
    auto Y = enumerate_candidates(m, alternating(8), b);
    REQUIRE_FALSE(Y.members.empty());
    for (const auto& y : Y.members) CHECK(y.generated.starts_with(alternating(8)));
    auto star = estimate_K(m, alternating(8), b);
    ErrorTable t(m, b);
    std::vector<Program> zs;
    for (const auto& y : Y.members) zs.push_back(y.program);
    auto ranking = rank_by_expected_error(t, zs, Y);
    CHECK(expected_error(t, star.witness, Y) == ranking.front().expected_error);

    CandidateSet single;
    single.members.push_back(Y.members.front());
    const auto& z = Y.members.front().program;
    CHECK(expected_error(t, z, single) ==
          Rational(t.error(z, z)) * dyadic(t.complexity(z)));
}
