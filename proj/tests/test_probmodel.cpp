#include <cmath>
#include <random>

#include "ait/enumerator.hpp"
#include "ait/probmodel.hpp"
#include "doctest.h"
#include "support/kraft_audit.hpp"

using namespace ait;

namespace {

// Reference entropy in long double, independent of the library's enclosure.
long double ref_entropy(const std::vector<double>& p) {
    long double h = 0;
    for (double v : p) {
        if (v > 0) h -= static_cast<long double>(v) * std::log2(static_cast<long double>(v));
    }
    return h;
}

Distribution dist(std::initializer_list<const char*> ps) {
    std::vector<Rational> v;
    for (auto s : ps) v.push_back(parse_rational(s));
    return Distribution(std::move(v));
}

Distribution random_distribution(std::mt19937_64& rng, unsigned m) {
    std::uniform_int_distribution<int> w(0, 20);
    std::vector<int> raw(m);
    int total = 0;
    while (total == 0) {
        total = 0;
        for (auto& r : raw) total += (r = w(rng));
    }
    std::vector<Rational> p;
    for (int r : raw) p.emplace_back(r, total);
    return Distribution(std::move(p));
}

// First length from which the periodic model beats n on alternating data.
constexpr unsigned kRepeatThreshold = 22;

}  // namespace

TEST_CASE("distributions") {
    CHECK_THROWS_AS(dist({"1/2", "1/3"}), std::invalid_argument);
    CHECK_THROWS_AS(dist({"3/2", "-1/2"}), std::invalid_argument);
    auto d = Distribution::from_json(R"({"m":2,"p":["1/2","1/2"]})");
    CHECK(d[0] == Rational(1, 2));
    CHECK(Distribution::from_json(d.to_json()).probabilities() == d.probabilities());
    CHECK_THROWS(Distribution::from_json(R"({"m":3,"p":["1/2","1/2"]})"));
    CHECK(Distribution::from_json(R"({"p":[0.25,0.75]})")[1] == Rational(3, 4));
}

TEST_CASE("empirical") {
    auto p = empirical(alternating(32), 2);
    CHECK(p[0] == Rational(1, 2));
    CHECK(p[1] == Rational(1, 2));
    auto z = empirical(SymbolString::parse("0000"), 2);
    CHECK(z[0] == 1);
    CHECK(z[1] == 0);
    auto t = empirical(SymbolString::parse("012012", 3), 3);
    for (unsigned i = 0; i < 3; ++i) CHECK(t[i] == Rational(1, 3));
    CHECK_THROWS_AS(empirical(SymbolString::parse(""), 2), std::invalid_argument);
    CHECK_THROWS_AS(empirical(SymbolString::parse("012", 3), 2), std::invalid_argument);
}

TEST_CASE("entropy") {
    auto half = entropy(dist({"1/2", "1/2"}));
    REQUIRE(half.exact);
    CHECK(*half.exact == 1);
    CHECK(half.bits == 1.0);
    auto zero = entropy(dist({"1", "0"}));
    REQUIRE(zero.exact);
    CHECK(*zero.exact == 0);
    CHECK(entropy(Distribution::uniform(4)).bits == 2.0);
    auto alt = entropy(alternating(32), 2);
    CHECK(alt.n == 32);
    CHECK(*alt.exact == 1);

    auto skew = entropy(dist({"3/4", "1/4"}));
    CHECK_FALSE(skew.exact);
    const long double ref = ref_entropy({0.75, 0.25});
    CHECK(skew.enclosure.lo <= skew.enclosure.hi);
    CHECK(to_double(skew.enclosure.lo) <= static_cast<double>(ref) + 1e-15);
    CHECK(to_double(skew.enclosure.hi) >= static_cast<double>(ref) - 1e-15);
    CHECK(to_double(skew.enclosure.hi - skew.enclosure.lo) < 1e-15);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const unsigned m = 2 + i % 5;
        auto d = random_distribution(rng, m);
        auto e = entropy(d);
        CHECK(e.bits >= 0);
        CHECK(e.bits <= std::log2(static_cast<double>(m)) + 1e-12);
        std::vector<double> pd;
        for (auto& v : d.probabilities()) pd.push_back(to_double(v));
        CHECK(std::abs(e.bits - static_cast<double>(ref_entropy(pd))) < 1e-12);
    }
}

TEST_CASE("model complexity budget") {
    CHECK(model_complexity_budget(32, 2, dist({"1/2", "1/2"})).bits == 0);
    CHECK(model_complexity_budget(100, 2, dist({"1", "0"})).bits == 100);
    auto b = model_complexity_budget(64, 2, dist({"3/4", "1/4"}));
    const double ref = 64.0 * (1.0 - static_cast<double>(ref_entropy({0.75, 0.25})));
    CHECK(b.bits == doctest::Approx(ref).epsilon(1e-12));
    CHECK(b.bits == doctest::Approx(12.07).epsilon(1e-3));
    CHECK_THROWS(model_complexity_budget(0, 2, dist({"1/2", "1/2"})));
}

TEST_CASE("viability") {
    auto skewed = SymbolString::parse("0001000100010001");
    auto p = empirical(skewed, 2);
    auto r = check_model_viability(p, skewed, 0);
    CHECK(r.verdict == Verdict::Viable);
    CHECK(r.within_budget);
    CHECK(r.gibbs_holds);
    CHECK(r.gibbs_gap.lo == 0);

    auto even = SymbolString::parse("0011");
    CHECK(check_model_viability(empirical(even, 2), even, 0).verdict == Verdict::NotViable);

    auto u = Distribution::uniform(2);
    for (std::uint64_t bits : {1, 2, 7}) CHECK(check_model_viability(u, skewed, bits).verdict == Verdict::NotViable);

    CHECK_THROWS_AS(check_model_viability(dist({"1", "0"}), skewed, 0), InfiniteCodeLength);

    // Viable implies model_bits < budget + 1.
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        SymbolString x(std::vector<std::uint32_t>(1 + rng() % 40), 2);
        std::vector<std::uint32_t> s(x.size());
        const unsigned bias = rng() % 8;
        for (auto& v : s) v = (rng() % 8) < bias ? 1 : 0;
        x = SymbolString(s, 2);
        auto q = random_distribution(rng, 2);
        if (q[0] == 0 || q[1] == 0) continue;
        const std::uint64_t bits = rng() % 12;
        auto v = check_model_viability(q, x, bits);
        if (v.verdict == Verdict::Viable) {
            CHECK(v.within_budget);
            CHECK(static_cast<double>(bits) < v.budget.bits + 1);
        }
        CHECK(v.gibbs_holds);
        CHECK(v.gibbs_gap.hi >= 0);
    }
}

TEST_CASE("gibbs exact comparison") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        const unsigned m = 2 + i % 4;
        auto p = random_distribution(rng, m);
        auto q = random_distribution(rng, m);
        bool support = true;
        for (unsigned a = 0; a < m; ++a) support = support && !(p[a] > 0 && q[a] == 0);
        if (!support) continue;
        CHECK(gibbs_inequality_holds(p, q));
        CHECK(gibbs_inequality_holds(p, p));
    }
}

TEST_CASE("alternation: single-symbol models against program models") {
    Machine m;
    for (unsigned n = 2; n <= 64; ++n) {
        auto x = alternating(n);
        // Model bits can only add; check with 0. Odd lengths have a skewed
        // empirical distribution, so the bound is stated for even n.
        std::mt19937_64 rng(n);
        for (int i = 0; i < 50 && n % 2 == 0; ++i) {
            auto q = random_distribution(rng, 2);
            if (q[0] == 0 || q[1] == 0) continue;
            CHECK(two_part_at_least(q, x, 0, n));
            CHECK(check_model_viability(q, x, 0).verdict == Verdict::NotViable);
        }
        CHECK(two_part_at_least(Distribution::uniform(2), x, 0, n));
        PeriodicFamily fam(m, x, 4);
        auto rep = two_part_length(m, fam.tree({2, 2}), x);
        if (n >= kRepeatThreshold) CHECK(rep.total_bits < n);
    }
    auto x = alternating(kRepeatThreshold - 1);
    PeriodicFamily fam(m, x, 4);
    CHECK(two_part_length(m, fam.tree({2, 2}), x).total_bits >= kRepeatThreshold - 1);
}

TEST_CASE("per-symbol bound") {
    auto u = per_symbol_bound(Distribution::uniform(4), {5, 9, 7, 3});
    CHECK(u.argmax == 1);
    CHECK(u.max.lo == 7);
    CHECK(u.max.hi == 7);
    auto one = per_symbol_bound(dist({"1"}), {12});
    CHECK(one.max.lo == 12);
    CHECK_THROWS(per_symbol_bound(Distribution::uniform(2), {1}));

    Machine m;
    SearchBudget b;
    b.max_program_bits = 18;
    b.max_steps = 10000;
    auto k0 = estimate_K(m, SymbolString::parse("0000"), b).value_bits;
    auto k1 = estimate_K(m, SymbolString::parse("1111"), b).value_bits;
    REQUIRE(k0 == k1);
    auto flat = per_symbol_bound(dist({"1/2", "1/2"}), {k0, k1});
    auto skew = per_symbol_bound(dist({"3/4", "1/4"}), {k0, k1});
    CHECK(skew.max.lo > flat.max.hi);
}

TEST_CASE("shannon code trees") {
    Machine m;
    auto labels3 = std::vector<SymbolString>{SymbolString::parse("0"), SymbolString::parse("10"), SymbolString::parse("11")};
    auto t = codetree_from_distribution(m, dist({"1/2", "1/4", "1/4"}), labels3);
    CHECK(shannon_lengths(dist({"1/2", "1/4", "1/4"})) == std::vector<unsigned>{1, 2, 2});
    CHECK(check_kraft(audit::check(t)) == 1);
    auto t3 = codetree_from_distribution(m, dist({"1/3", "1/3", "1/3"}), labels3);
    CHECK(shannon_lengths(dist({"1/3", "1/3", "1/3"})) == std::vector<unsigned>{2, 2, 2});
    CHECK(check_kraft(audit::check(t3)) == Rational(3, 4));
    CHECK_THROWS(codetree_from_distribution(m, dist({"1", "0"}), {SymbolString::parse("0"), SymbolString::parse("1")}));

    // Every entry decodes back to its label.
    for (const auto& e : t.entries()) {
        auto dec = t.decode(m, e.codeword);
        REQUIRE(dec);
        CHECK(*dec == e.value);
    }

    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
        const unsigned k = 2 + i % 7;
        std::vector<Rational> p;
        int total = 0;
        std::vector<int> raw(k);
        for (auto& r : raw) total += (r = 1 + static_cast<int>(rng() % 30));
        for (int r : raw) p.emplace_back(r, total);
        Distribution q(p);
        std::vector<SymbolString> labels;
        for (unsigned j = 0; j < k; ++j) labels.push_back(SymbolString::from_bits(BitString::from_uint(j, 4)));
        auto tree = codetree_from_distribution(m, q, labels);
        CHECK(check_kraft(audit::check(tree)) <= 1);
        auto lens = shannon_lengths(q);
        for (unsigned j = 0; j < k; ++j) CHECK(tree.entries()[j].codeword.size() == lens[j]);
    }
    CHECK(audit::tally().violations == 0);
}
