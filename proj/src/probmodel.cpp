#include "ait/probmodel.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <numeric>
#include <set>

#include "json.hpp"

namespace ait {

namespace {

using Float = boost::multiprecision::cpp_bin_float_50;

BigInt pow_big(const BigInt& b, std::uint64_t e) {
    BigInt r = 1;
    BigInt base = b;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

Float to_float(const Rational& r) {
    return Float(boost::multiprecision::numerator(r)) / Float(boost::multiprecision::denominator(r));
}

// Outward rounding of v to kFractionBits with a margin for the float error.
Interval enclose(const Float& v) {
    const Float scaled = v * pow(Float(2), kFractionBits);
    const BigInt lo = static_cast<BigInt>(floor(scaled)) - 1;
    const BigInt hi = static_cast<BigInt>(ceil(scaled)) + 1;
    const BigInt den = BigInt(1) << kFractionBits;
    return {Rational(lo, den), Rational(hi, den)};
}

Interval add(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
Interval scale(const Interval& a, const Rational& k) {
    return k >= 0 ? Interval{a.lo * k, a.hi * k} : Interval{a.hi * k, a.lo * k};
}

std::optional<std::uint64_t> power_of_two_exponent(const Rational& r) {
    // r = 2^-k for some k >= 0.
    if (boost::multiprecision::numerator(r) != 1) return std::nullopt;
    BigInt d = boost::multiprecision::denominator(r);
    std::uint64_t k = 0;
    while (d > 1) {
        if ((d & 1) != 0) return std::nullopt;
        d >>= 1;
        ++k;
    }
    return k;
}

}  // namespace

double Interval::mid() const { return to_double((lo + hi) / 2); }

Interval log2_interval(const Rational& r) {
    if (r <= 0) throw std::invalid_argument("log2 of a non-positive value");
    if (auto k = power_of_two_exponent(r)) return {Rational(-static_cast<std::int64_t>(*k)), Rational(-static_cast<std::int64_t>(*k))};
    if (boost::multiprecision::denominator(r) == 1) {
        if (auto k = power_of_two_exponent(1 / r)) return {Rational(*k), Rational(*k)};
    }
    return enclose(log(to_float(r)) / log(Float(2)));
}

Distribution::Distribution(std::vector<Rational> p) : p_(std::move(p)) {
    if (p_.empty()) throw std::invalid_argument("distribution over an empty alphabet");
    Rational sum = 0;
    for (const auto& v : p_) {
        if (v < 0) throw std::invalid_argument("negative probability");
        sum += v;
    }
    if (sum != 1) throw std::invalid_argument("probabilities sum to " + to_fraction_string(sum) + ", not 1");
}

Distribution Distribution::uniform(unsigned m) {
    if (m < 1) throw std::invalid_argument("uniform distribution needs m >= 1");
    return Distribution(std::vector<Rational>(m, Rational(1, m)));
}

Distribution Distribution::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("distribution JSON: ") + e.what());
    }
    if (!j.contains("p") || !j["p"].is_array()) throw std::invalid_argument("distribution JSON needs a \"p\" array");
    std::vector<Rational> p;
    for (const auto& v : j["p"]) {
        p.push_back(v.is_string() ? parse_rational(v.get<std::string>()) : parse_rational(v.dump()));
    }
    if (j.contains("m") && j["m"].get<std::size_t>() != p.size()) {
        throw std::invalid_argument("distribution JSON: m does not match the number of probabilities");
    }
    return Distribution(std::move(p));
}

std::string Distribution::to_json() const {
    nlohmann::json j;
    j["m"] = p_.size();
    j["p"] = nlohmann::json::array();
    for (const auto& v : p_) j["p"].push_back(to_fraction_string(v));
    return j.dump();
}

std::vector<std::uint64_t> symbol_counts(const SymbolString& x, unsigned m) {
    std::vector<std::uint64_t> c(m, 0);
    for (auto s : x.symbols()) {
        if (s >= m) throw std::invalid_argument("symbol outside the alphabet");
        ++c[s];
    }
    return c;
}

Distribution empirical(const SymbolString& x, unsigned m) {
    if (x.empty()) throw std::invalid_argument("empirical distribution of an empty string");
    const auto c = symbol_counts(x, m);
    std::vector<Rational> p;
    for (auto v : c) p.emplace_back(BigInt(v), BigInt(x.size()));
    return Distribution(std::move(p));
}

EntropyReport entropy(const Distribution& d) {
    EntropyReport r;
    Rational exact = 0;
    bool all_exact = true;
    Interval h{0, 0};
    for (const auto& p : d.probabilities()) {
        if (p == 0) continue;
        const Interval l = log2_interval(1 / p);
        h = add(h, scale(l, p));
        if (l.lo == l.hi) {
            exact += p * l.lo;
        } else {
            all_exact = false;
        }
    }
    if (all_exact) {
        r.exact = exact;
        h = {exact, exact};
    }
    // Clamp to the known range [0, log2 m].
    const Interval lm = log2_interval(Rational(d.alphabet_size()));
    h.lo = std::max(h.lo, Rational(0));
    h.hi = std::min(h.hi, lm.hi);
    r.enclosure = h;
    r.bits = r.exact ? to_double(*r.exact) : h.mid();
    r.divergence_from_uniform = lm.mid() - r.bits;
    if (r.divergence_from_uniform < 0) r.divergence_from_uniform = 0;
    return r;
}

EntropyReport entropy(const SymbolString& x, unsigned m) {
    EntropyReport r = entropy(empirical(x, m));
    r.n = x.size();
    return r;
}

BudgetReport model_complexity_budget(std::uint64_t n, unsigned m, const Distribution& p) {
    if (n < 1) throw std::invalid_argument("model_complexity_budget: n must be at least 1");
    if (p.alphabet_size() != m) throw std::invalid_argument("model_complexity_budget: alphabet mismatch");
    const Interval lm = log2_interval(Rational(m));
    const Interval h = entropy(p).enclosure;
    BudgetReport b;
    b.enclosure = {Rational(n) * (lm.lo - h.hi), Rational(n) * (lm.hi - h.lo)};
    if (b.enclosure.lo < 0) b.enclosure.lo = 0;
    if (lm.lo == lm.hi && h.lo == h.hi) {
        b.bits = to_double(b.enclosure.lo);
    } else {
        b.bits = b.enclosure.mid();
    }
    return b;
}

std::string_view to_string(Verdict v) { return v == Verdict::Viable ? "Viable" : "NotViable"; }

bool two_part_at_least(const Distribution& q, const SymbolString& x, std::uint64_t model_bits, std::uint64_t bits) {
    // 2^model_bits * prod 1/q(x_i) >= 2^bits.
    const auto c = symbol_counts(x, q.alphabet_size());
    BigInt num = 1, den = 1;
    for (std::size_t a = 0; a < c.size(); ++a) {
        if (c[a] == 0) continue;
        if (q[a] == 0) throw InfiniteCodeLength("model gives zero probability to symbol " + std::to_string(a));
        num *= pow_big(boost::multiprecision::denominator(q[a]), c[a]);
        den *= pow_big(boost::multiprecision::numerator(q[a]), c[a]);
    }
    if (model_bits >= bits) return true;
    return num >= (den << static_cast<unsigned>(bits - model_bits));
}

bool gibbs_inequality_holds(const Distribution& p, const Distribution& q) {
    if (p.alphabet_size() != q.alphabet_size()) throw std::invalid_argument("gibbs: alphabet mismatch");
    // With p_i = c_i / N (common denominator), prod (p_i/q_i)^{c_i} >= 1.
    BigInt common = 1;
    for (const auto& v : p.probabilities()) {
        const BigInt d = boost::multiprecision::denominator(v);
        common = common / boost::multiprecision::gcd(common, d) * d;
    }
    BigInt lhs = 1, rhs = 1;
    for (std::size_t i = 0; i < p.alphabet_size(); ++i) {
        if (p[i] == 0) continue;
        if (q[i] == 0) throw InfiniteCodeLength("q has zero probability where p does not");
        const BigInt ci_big = boost::multiprecision::numerator(p[i] * Rational(common));
        const auto ci = ci_big.convert_to<std::uint64_t>();
        const Rational ratio = p[i] / q[i];
        lhs *= pow_big(boost::multiprecision::numerator(ratio), ci);
        rhs *= pow_big(boost::multiprecision::denominator(ratio), ci);
    }
    return lhs >= rhs;
}

ViabilityReport check_model_viability(const Distribution& q, const SymbolString& x, std::uint64_t q_model_bits) {
    if (x.empty()) throw std::invalid_argument("check_model_viability: empty data");
    const unsigned m = q.alphabet_size();
    const auto c = symbol_counts(x, m);
    ViabilityReport r;
    r.n = x.size();
    r.model_bits = q_model_bits;
    r.codelength = {0, 0};
    for (std::size_t a = 0; a < m; ++a) {
        if (c[a] == 0) continue;
        if (q[a] == 0) throw InfiniteCodeLength("model gives zero probability to symbol " + std::to_string(a));
        r.codelength = add(r.codelength, scale(log2_interval(1 / q[a]), Rational(c[a])));
    }
    r.uniform_bits = static_cast<double>(r.n) * std::log2(static_cast<double>(m));
    r.total_bits = static_cast<double>(q_model_bits) + r.codelength.mid();

    // Viable iff 2^bits * prod 1/q(x_i) < m^n, exactly.
    BigInt num = BigInt(1) << static_cast<unsigned>(q_model_bits), den = 1;
    for (std::size_t a = 0; a < m; ++a) {
        if (c[a] == 0) continue;
        num *= pow_big(boost::multiprecision::denominator(q[a]), c[a]);
        den *= pow_big(boost::multiprecision::numerator(q[a]), c[a]);
    }
    r.verdict = num < den * pow_big(BigInt(m), r.n) ? Verdict::Viable : Verdict::NotViable;

    const Distribution p = empirical(x, m);
    r.budget = model_complexity_budget(r.n, m, p);
    // model_bits < n (log m - H(p))  <=>  2^bits * prod p_a^{-c_a} < m^n.
    BigInt bnum = BigInt(1) << static_cast<unsigned>(q_model_bits), bden = 1;
    for (std::size_t a = 0; a < m; ++a) {
        if (c[a] == 0) continue;
        bnum *= pow_big(boost::multiprecision::denominator(p[a]), c[a]);
        bden *= pow_big(boost::multiprecision::numerator(p[a]), c[a]);
    }
    r.within_budget = bnum < bden * pow_big(BigInt(m), r.n);

    r.gibbs_holds = gibbs_inequality_holds(p, q);
    Interval cross{0, 0}, h{0, 0};
    for (std::size_t a = 0; a < m; ++a) {
        if (p[a] == 0) continue;
        cross = add(cross, scale(log2_interval(1 / q[a]), p[a]));
        h = add(h, scale(log2_interval(1 / p[a]), p[a]));
    }
    r.gibbs_gap = {cross.lo - h.hi, cross.hi - h.lo};
    if (r.gibbs_holds && r.gibbs_gap.lo < 0) r.gibbs_gap.lo = 0;
    return r;
}

PerSymbolBound per_symbol_bound(const Distribution& q, const std::vector<std::uint64_t>& symbol_complexities) {
    if (symbol_complexities.size() != q.alphabet_size()) {
        throw std::invalid_argument("per_symbol_bound: one complexity per symbol expected");
    }
    PerSymbolBound r;
    for (std::size_t a = 0; a < q.alphabet_size(); ++a) {
        if (q[a] == 0) throw InfiniteCodeLength("per_symbol_bound: zero probability symbol");
        const Interval l = log2_interval(1 / q[a]);
        const Rational k(symbol_complexities[a]);
        r.bounds.push_back({k - l.hi, k - l.lo});
        if (a == 0 || r.bounds[a].hi > r.bounds[r.argmax].hi) r.argmax = a;
    }
    r.max = r.bounds[r.argmax];
    return r;
}

std::vector<unsigned> shannon_lengths(const Distribution& q) {
    std::vector<unsigned> out;
    for (const auto& p : q.probabilities()) {
        if (p == 0) throw std::invalid_argument("codetree_from_distribution: zero-probability label");
        out.push_back(static_cast<unsigned>(ceil_log2(Rational(1 / p))));
    }
    return out;
}

CodeTree codetree_from_distribution(const Machine& m, const Distribution& q, const std::vector<SymbolString>& labels) {
    if (labels.size() != q.alphabet_size()) throw std::invalid_argument("codetree_from_distribution: one label per probability");
    const auto lengths = shannon_lengths(q);
    std::vector<std::size_t> order(lengths.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
    std::vector<CodeTreeEntry> entries(lengths.size());
    BigInt next = 0;
    unsigned prev = 0;
    for (std::size_t i : order) {
        next <<= (lengths[i] - prev);
        prev = lengths[i];
        BitString cw;
        for (unsigned b = lengths[i]; b-- > 0;) cw.push_back(bit_test(next, b));
        entries[i] = {cw, labels[i]};
        ++next;
    }
    auto t = CodeTree::from_table(m, "shannon", std::move(entries), /*allow_sparse=*/true);
    if (!t) throw std::invalid_argument(std::string("codetree_from_distribution: ") + std::string(to_string(t.error())));
    return std::move(t).value();
}

}  // namespace ait
