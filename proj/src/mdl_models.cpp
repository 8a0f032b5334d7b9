#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "ait/mdl.hpp"

namespace ait {

namespace {

constexpr std::uint64_t kEnumSteps = 50'000'000;
// Enumerations longer than this are not re-searched for a shorter program.
constexpr std::size_t kSearchableTape = 1u << 20;

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

void require_power_of_two_alphabet(const Machine& m, const char* what) {
    if (!is_power_of_two(m.alphabet_size())) {
        throw std::invalid_argument(std::string(what) + " needs an alphabet whose size is a power of two");
    }
}

// Reads one w-bit symbol from aux: a READ tree of depth w.
BitString read_symbol(unsigned width, unsigned depth = 0, std::uint32_t value = 0) {
    if (depth == width) return code::block({code::sym(value, width)});
    return code::block({code::read(read_symbol(width, depth + 1, value << 1),
                                   read_symbol(width, depth + 1, (value << 1) | 1))});
}

// Instructions of a block, END dropped.
BitString body(const BitString& block) { return block.slice(0, block.size() - 1); }

}  // namespace

std::optional<Rational> FiniteSetModel::log_cardinality_exact() const {
    if (!is_power_of_two(cardinality)) return std::nullopt;
    return Rational(static_cast<std::uint64_t>(std::countr_zero(cardinality)));
}

std::uint64_t FiniteSetModel::log_cardinality_bits() const {
    return cardinality <= 1 ? 0 : ceil_log2(cardinality);
}

double FiniteSetModel::log_cardinality() const {
    return cardinality == 0 ? 0.0 : std::log2(static_cast<double>(cardinality));
}

bool FiniteSetModel::contains(const SymbolString& x) const {
    if (!members.empty()) return std::find(members.begin(), members.end(), x) != members.end();
    return membership && membership(x);
}

FiniteSetModel finite_set_from_enumerator(const Machine& m, std::string name, const Program& enumerator,
                                          const SearchBudget& budget) {
    const auto out = m.run(enumerator, {}, kEnumSteps);
    if (out.status != RunStatus::Halted) throw std::invalid_argument("enumerator does not halt: " + name);
    auto parts = m.split_tape(out.tape);
    if (!parts || parts->empty() || !parts->back().empty()) {
        throw std::invalid_argument("enumerator output is not a separated list: " + name);
    }
    parts->pop_back();
    std::set<SymbolString> seen;
    for (const auto& p : *parts) {
        if (!seen.insert(p).second) throw std::invalid_argument("enumerator repeats a member: " + name);
    }
    FiniteSetModel s;
    s.name = std::move(name);
    s.enumerator = enumerator;
    s.cardinality = parts->size();
    s.members = std::move(*parts);
    s.model_bits = enumerator.size();
    if (out.tape.size() <= kSearchableTape) {
        SearchBudget b = budget;
        b.max_program_bits = std::min<unsigned>(b.max_program_bits, static_cast<unsigned>(enumerator.size() - 1));
        if (b.max_program_bits >= 1) {
            const auto r = search_shortest(m, out.tape, {}, b);
            if (r.hit && r.hit->program.size() < s.model_bits) {
                s.model_bits = r.hit->program.size();
                s.enumerator = r.hit->program;
            }
        }
    }
    return s;
}

FiniteSetModel cube_model(const Machine& m, std::size_t n, const SearchBudget& budget) {
    require_power_of_two_alphabet(m, "cube_model");
    const std::uint64_t bits = n * m.symbol_width();
    const Program e = m.decode_or_throw(code::block({code::enum_codes(bits, code::block({code::copy_aux()}))}));
    const std::string name = "cube(" + std::to_string(n) + ")";
    if (bits <= 16) return finite_set_from_enumerator(m, name, e, budget);
    // Too many members to list: ENUM over every bits-wide codeword with
    // COPYAUX yields exactly the strings of n symbols.
    if (bits >= 64) throw std::invalid_argument("cube_model: set too large");
    FiniteSetModel s;
    s.name = name;
    s.enumerator = e;
    s.cardinality = 1ULL << bits;
    s.model_bits = e.size();
    const unsigned alphabet = m.alphabet_size();
    s.membership = [n, alphabet](const SymbolString& x) {
        if (x.size() != n) return false;
        return std::all_of(x.symbols().begin(), x.symbols().end(), [&](std::uint32_t v) { return v < alphabet; });
    };
    return s;
}

FiniteSetModel singleton_model(const Machine& m, const SymbolString& x, const SearchBudget& budget) {
    const auto star = estimate_K(m, x, budget);
    return finite_set_from_enumerator(m, "singleton", m.chain(star.witness, m.halt_program()), budget);
}

FiniteSetModel pair_model(const Machine& m, const SymbolString& a, const SymbolString& b, const SearchBudget& budget) {
    const auto sa = estimate_K(m, a, budget);
    const auto sb = estimate_K(m, b, budget);
    const Program chained = m.chain(sa.witness, m.chain(sb.witness, m.halt_program()));
    // The same set through ENUM: one codeword bit picks the member.
    const Program branched = m.decode_or_throw(code::block({code::enum_codes(
        1, code::block({code::read(sa.witness.code(), sb.witness.code())}))}));
    const Program& e = branched.size() < chained.size() ? branched : chained;
    return finite_set_from_enumerator(m, "pair", e, budget);
}

Expected<DeficiencyReport, NotMember> randomness_deficiency(const Machine& m, const SymbolString& x,
                                                            const FiniteSetModel& S, const SearchBudget& budget) {
    if (!S.contains(x)) return NotMember{};
    DeficiencyReport r;
    r.cardinality = S.cardinality;
    r.log_cardinality = S.log_cardinality();
    r.log_cardinality_exact = S.log_cardinality_exact();
    r.k_cond = estimate_K_cond(m, x, S.enumerator.code(), budget);
    r.deficiency = r.log_cardinality - static_cast<double>(r.k_cond.value_bits);
    if (r.log_cardinality_exact) r.deficiency_exact = *r.log_cardinality_exact - Rational(r.k_cond.value_bits);
    return r;
}

SweepReport structure_sweep(const Machine& m, const SymbolString& x, const std::vector<FiniteSetModel>& family,
                            const SearchBudget& budget, std::uint64_t slack_bits) {
    if (family.empty()) throw std::invalid_argument("structure_sweep: empty family");
    SweepReport rep;
    rep.slack_bits = slack_bits;
    rep.k_hat = estimate_K(m, x, budget).value_bits;
    std::set<std::uint64_t> alphas;
    for (const auto& s : family) alphas.insert(s.model_bits);
    for (auto alpha : alphas) {
        const FiniteSetModel* best = nullptr;
        for (const auto& s : family) {
            if (s.model_bits > alpha || !s.contains(x)) continue;
            if (!best || s.cardinality < best->cardinality ||
                (s.cardinality == best->cardinality && s.model_bits < best->model_bits)) {
                best = &s;
            }
        }
        if (!best) continue;
        SweepPoint p;
        p.alpha_bits = alpha;
        p.log_cardinality_bits = best->log_cardinality_bits();
        p.log_cardinality = best->log_cardinality();
        p.model = best->name;
        p.total_bits = best->model_bits + p.log_cardinality_bits;
        rep.curve.push_back(p);
        if (!rep.knee && p.total_bits <= rep.k_hat + slack_bits) rep.knee = p;
    }
    rep.non_increasing = true;
    rep.strictly_decreasing = true;
    for (std::size_t i = 1; i < rep.curve.size(); ++i) {
        if (rep.curve[i].log_cardinality > rep.curve[i - 1].log_cardinality) rep.non_increasing = false;
        if (rep.curve[i].log_cardinality >= rep.curve[i - 1].log_cardinality) rep.strictly_decreasing = false;
    }
    return rep;
}

HillclimbResult hillclimb(const HillclimbProblem& problem, const ModelKey& initial, const SymbolString&,
                          std::size_t max_iters, std::uint64_t seed) {
    if (max_iters < 1) throw std::invalid_argument("hillclimb: max_iters must be at least 1");
    std::mt19937_64 rng(seed);
    HillclimbResult r;
    r.best = initial;
    r.total_bits = problem.objective(initial);
    r.trace.push_back({initial, r.total_bits});
    for (std::size_t it = 0; it < max_iters; ++it) {
        auto nbrs = problem.neighbors(r.best);
        std::shuffle(nbrs.begin(), nbrs.end(), rng);
        std::vector<std::uint64_t> vals;
        for (const auto& k : nbrs) vals.push_back(problem.objective(k));
        ++r.iterations;
        std::size_t arg = nbrs.size();
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            if (arg == nbrs.size() || vals[i] < vals[arg]) arg = i;
        }
        if (arg == nbrs.size() || vals[arg] >= r.total_bits) {
            r.local_optimum = true;
            return r;
        }
        r.best = nbrs[arg];
        r.total_bits = vals[arg];
        r.trace.push_back({r.best, r.total_bits});
    }
    r.local_optimum = true;
    for (const auto& k : problem.neighbors(r.best)) {
        if (problem.objective(k) < r.total_bits) r.local_optimum = false;
    }
    return r;
}

PeriodicFamily::PeriodicFamily(const Machine& m, SymbolString x, int max_period)
    : m_(m), x_(std::move(x)), max_period_(max_period) {
    require_power_of_two_alphabet(m, "PeriodicFamily");
    if (max_period < 1) throw std::invalid_argument("PeriodicFamily: max_period must be at least 1");
}

std::vector<ModelKey> PeriodicFamily::grid() const {
    std::vector<ModelKey> out;
    for (int p = 1; p <= max_period_; ++p) {
        for (int k = 0; k <= p; ++k) out.push_back({p, k});
    }
    return out;
}

std::vector<ModelKey> PeriodicFamily::neighbors(const ModelKey& key) const {
    const int p = key.at(0), k = key.at(1);
    std::vector<ModelKey> out;
    if (p > 1) out.push_back({p - 1, std::min(k, p - 1)});
    if (p < max_period_) out.push_back({p + 1, k});
    if (k > 0) out.push_back({p, k - 1});
    if (k < p) out.push_back({p, k + 1});
    return out;
}

CodeTree PeriodicFamily::tree(const ModelKey& key) const {
    const int p = key.at(0), k = key.at(1);
    if (p < 1 || k < 0 || k > p) throw std::invalid_argument("PeriodicFamily: bad key");
    const unsigned w = m_.symbol_width();
    const std::size_t n = x_.size();
    const std::size_t plen = std::min<std::size_t>(static_cast<std::size_t>(p), n);
    const SymbolString pattern = x_.prefix(plen);

    // Instructions for positions [0, len) of one period.
    auto period_body = [&](std::size_t len) {
        BitString out;
        const std::size_t fixed = std::min<std::size_t>(len, static_cast<std::size_t>(k));
        if (fixed > 0) out.append(code::emit_string(pattern.prefix(fixed), w));
        for (std::size_t j = fixed; j < len; ++j) out.append(body(read_symbol(w)));
        return out;
    };
    const std::size_t reps = n / static_cast<std::size_t>(p);
    const std::size_t tail = n % static_cast<std::size_t>(p);
    BitString prog;
    if (reps >= 2) {
        prog.append(code::repeat(reps, period_body(static_cast<std::size_t>(p)) + code::end()));
    } else if (reps == 1) {
        prog.append(period_body(static_cast<std::size_t>(p)));
    }
    if (tail > 0) prog.append(period_body(tail));
    prog.append(code::end());

    std::size_t free_positions = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % static_cast<std::size_t>(p) >= static_cast<std::size_t>(k)) ++free_positions;
    }
    const SymbolString x = x_;
    auto encoder = [x, p, k, w](const SymbolString& y) -> std::optional<BitString> {
        if (y.size() != x.size()) return std::nullopt;
        BitString r;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const std::size_t j = i % static_cast<std::size_t>(p);
            if (j < static_cast<std::size_t>(k)) {
                if (y[i] != x[j]) return std::nullopt;
            } else {
                r.append(BitString::from_uint(y[i], w));
            }
        }
        return r;
    };
    return CodeTree::uniform("periodic(p=" + std::to_string(p) + ",k=" + std::to_string(k) + ")",
                             m_.decode_or_throw(prog), static_cast<unsigned>(free_positions * w), encoder);
}

std::uint64_t PeriodicFamily::total_bits(const ModelKey& key) const {
    return two_part_length(m_, tree(key), x_).total_bits;
}

HillclimbProblem PeriodicFamily::problem() const {
    return {[this](const ModelKey& k) { return total_bits(k); },
            [this](const ModelKey& k) { return neighbors(k); }};
}

std::uint64_t approximation_slack(const Machine& m, std::uint64_t total_bits) {
    const auto framing = code::block({code::pipe(code::block({code::exec_aux()}), code::block({code::search(1)}))}).size() -
                         code::gamma(1).size();
    const std::uint64_t lg = total_bits <= 1 ? 0 : 63 - static_cast<std::uint64_t>(std::countl_zero(total_bits));
    (void)m;
    return framing + lg + 1;
}

ApproximationBound approximation_error_bound(const Machine& m, const CodeTree& approx, const SymbolString& x,
                                             const std::optional<CodeTree>& reference,
                                             const SearchBudget& budget) {
    const auto d = two_part_length(m, approx, x);
    ApproximationBound r;
    r.total_bits = d.total_bits;
    r.bound = d.total_bits == 0 ? 0.0 : std::log2(static_cast<double>(d.total_bits));
    r.slack_bits = approximation_slack(m, d.total_bits);
    if (!reference) return r;

    const CodeTree literal = CodeTree::literal(m);
    const Program& f_tilde = d.fallback ? literal.decoder() : approx.decoder();
    const BitString given = f_tilde.code() + d.codeword;
    const SymbolString target = SymbolString::from_bits(reference->decoder().code());
    auto est = estimate_K_cond(m, target, given, budget);
    r.measured = est.value_bits;
    r.witness_method = est.method;

    const std::uint64_t k = reference->decoder().size();
    const Program rebuild = m.decode_or_throw(code::block(
        {code::pipe(code::block({code::exec_aux()}), code::block({code::search(k)}))}));
    if (rebuild.size() < *r.measured && m.produces(rebuild, given, m.tape_of(target), 100'000'000)) {
        r.measured = rebuild.size();
        r.witness_method = "rebuild";
    }
    r.within = static_cast<double>(*r.measured) <= r.bound + static_cast<double>(r.slack_bits);
    return r;
}

}  // namespace ait
