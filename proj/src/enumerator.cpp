#include "ait/enumerator.hpp"

#include <atomic>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ait/program_space.hpp"

namespace ait {

namespace {

using Clock = std::chrono::steady_clock;

// Runs every program of exactly `n` bits in lexicographic order and returns
// the first that produces the target.
std::optional<SearchHit> first_of_length(const Machine& m, unsigned n, const Tape& target, const BitString& aux,
                                         std::uint64_t max_steps, const BitString& prefix,
                                         std::uint64_t& tried) {
    std::optional<SearchHit> hit;
    for_each_program(
        m.symbol_width(), n,
        [&](const std::vector<std::uint8_t>& bits) {
            ++tried;
            Program p = m.decode_or_throw(BitString(bits));
            std::uint64_t steps = 0;
            if (m.produces(p, aux, target, max_steps, &steps)) {
                hit = SearchHit{std::move(p), steps};
                return false;
            }
            return true;
        },
        prefix);
    return hit;
}

std::optional<SearchHit> first_of_length_parallel(const Machine& m, unsigned n, const Tape& target,
                                                  const BitString& aux, std::uint64_t max_steps, unsigned jobs,
                                                  std::uint64_t& tried) {
    const auto prefixes = program_prefixes(m.symbol_width(), n, std::min<std::size_t>(n, 10));
    std::vector<std::optional<SearchHit>> hits(prefixes.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> best{prefixes.size()};
    std::atomic<std::uint64_t> total{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= prefixes.size() || i > best.load()) return;
            std::uint64_t local = 0;
            hits[i] = first_of_length(m, n, target, aux, max_steps, prefixes[i], local);
            total += local;
            if (hits[i]) {
                std::size_t cur = best.load();
                while (i < cur && !best.compare_exchange_weak(cur, i)) {
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    tried += total;
    const std::size_t b = best.load();
    if (b < prefixes.size()) return hits[b];
    return std::nullopt;
}

ComplexityEstimate from_search(const Machine& m, EstimateKind kind, const SymbolString& subject,
                               const BitString& aux, const Tape& target, const SearchBudget& budget,
                               const std::optional<Program>& fallback) {
    ComplexityEstimate e;
    e.kind = kind;
    e.subject = subject;
    e.conditioning = aux;
    e.budget = budget;
    const SearchResult r = search_shortest(m, target, aux, budget);
    e.exhausted_below = r.exhausted_below;
    if (r.hit) {
        e.witness = r.hit->program;
        e.witness_steps = r.hit->steps;
        e.method = "search";
    } else if (fallback) {
        e.witness = *fallback;
        const auto out = m.run(*fallback, aux, UINT64_MAX);
        e.witness_steps = out.steps_used;
        e.method = "literal";
    } else {
        throw std::logic_error("search found nothing and no fallback exists");
    }
    e.value_bits = e.witness.size();
    return e;
}

}  // namespace

void SearchBudget::validate() const {
    if (max_program_bits < 1) throw std::invalid_argument("budget: max_program_bits must be at least 1");
    if (max_steps < 1) throw std::invalid_argument("budget: max_steps must be at least 1");
    if (jobs < 1) throw std::invalid_argument("budget: jobs must be at least 1");
}

std::string_view to_string(EstimateKind kind) {
    switch (kind) {
        case EstimateKind::Plain: return "plain";
        case EstimateKind::Conditional: return "conditional";
        case EstimateKind::Joint: return "joint";
    }
    return "?";
}

Tape ComplexityEstimate::target(const Machine& m) const {
    return kind == EstimateKind::Joint ? m.joint_tape(subject, second) : m.tape_of(subject);
}

bool verify(const Machine& m, const ComplexityEstimate& e) {
    if (e.value_bits != e.witness.size()) return false;
    if (e.witness.symbol_width() != m.symbol_width()) return false;
    const auto out = m.run(e.witness, e.conditioning, std::max<std::uint64_t>(e.witness_steps, 1));
    return out.status == RunStatus::Halted && out.tape == e.target(m);
}

SearchResult search_shortest(const Machine& m, const Tape& target, const BitString& aux,
                             const SearchBudget& budget) {
    budget.validate();
    SearchResult r;
    const auto start = Clock::now();
    for (unsigned n = 1; n <= budget.max_program_bits; ++n) {
        if (budget.wall_clock && Clock::now() - start > *budget.wall_clock) {
            r.exhausted_below = n;
            return r;
        }
        r.hit = budget.jobs > 1
                    ? first_of_length_parallel(m, n, target, aux, budget.max_steps, budget.jobs, r.programs_tried)
                    : first_of_length(m, n, target, aux, budget.max_steps, {}, r.programs_tried);
        if (r.hit) {
            r.exhausted_below = n;
            return r;
        }
    }
    r.exhausted_below = budget.max_program_bits + 1ULL;
    return r;
}

ComplexityEstimate estimate_K(const Machine& m, const SymbolString& x, const SearchBudget& budget) {
    return from_search(m, EstimateKind::Plain, x, {}, m.tape_of(x), budget, m.literal_program(x));
}

ComplexityEstimate estimate_K_cond(const Machine& m, const SymbolString& a, const BitString& b_aux,
                                   const SearchBudget& budget) {
    return from_search(m, EstimateKind::Conditional, a, b_aux, m.tape_of(a), budget, m.literal_program(a));
}

ComplexityEstimate estimate_K_joint(const Machine& m, const SymbolString& x, const SymbolString& w,
                                    const SearchBudget& budget) {
    const Tape target = m.joint_tape(x, w);
    ComplexityEstimate direct;
    direct.kind = EstimateKind::Joint;
    direct.subject = x;
    direct.second = w;
    direct.budget = budget;
    const SearchResult r = search_shortest(m, target, {}, budget);
    direct.exhausted_below = r.exhausted_below;

    const auto ex = estimate_K(m, x, budget);
    const auto ew = estimate_K_cond(m, w, ex.witness.code(), budget);
    ComplexityEstimate chained = direct;
    chained.witness = m.chain(ex.witness, ew.witness);
    chained.value_bits = chained.witness.size();
    const auto out = m.run(chained.witness, {}, 2 * (ex.witness_steps + ew.witness_steps) + 64);
    if (out.status != RunStatus::Halted || out.tape != target) {
        throw std::logic_error("chained joint witness does not replay");
    }
    chained.witness_steps = out.steps_used;
    chained.method = "chain";

    if (r.hit && (r.hit->program.size() < chained.value_bits ||
                  (r.hit->program.size() == chained.value_bits && r.hit->program.code() < chained.witness.code()))) {
        direct.witness = r.hit->program;
        direct.witness_steps = r.hit->steps;
        direct.value_bits = direct.witness.size();
        direct.method = "search";
        return direct;
    }
    return chained;
}

Expected<Program, NotFound> find_with_target_length(const Machine& m, const SymbolString& x,
                                                     unsigned target_bits, const StepSchedule& schedule) {
    if (target_bits < 1) throw std::invalid_argument("find_with_target_length: target_bits must be at least 1");
    const Tape target = m.tape_of(x);
    const auto deadline = Clock::now() + schedule.wall_clock;
    std::uint64_t allowance = std::max<std::uint64_t>(schedule.initial_steps, 1);
    for (std::uint64_t round = 0;; ++round) {
        bool starved = false;
        bool expired = false;
        std::optional<Program> found;
        for_each_program(m.symbol_width(), target_bits, [&](const std::vector<std::uint8_t>& bits) {
            if (Clock::now() > deadline) {
                expired = true;
                return false;
            }
            Program p = m.decode_or_throw(BitString(bits));
            std::uint64_t steps = 0;
            if (m.produces(p, {}, target, allowance, &steps)) {
                found = std::move(p);
                return false;
            }
            if (steps >= allowance) starved = true;
            return true;
        });
        if (found) return std::move(*found);
        if (expired || !starved) return NotFound{round + (expired ? 0 : 1)};
        allowance = allowance > UINT64_MAX / 2 ? UINT64_MAX : allowance * 2;
    }
}

unsigned kstar_hint_width(const Machine& m, const SymbolString& x) {
    return ceil_log2(m.literal_program(x).size() + 1);
}

BitString encode_kstar_hint(const Machine& m, const SymbolString& x, std::uint64_t k_bits) {
    if (k_bits > m.literal_program(x).size()) {
        throw std::invalid_argument("encode_kstar_hint: k_bits exceeds the literal program length");
    }
    return BitString::from_uint(k_bits, kstar_hint_width(m, x));
}

std::uint64_t decode_kstar_hint(const BitString& hint) { return hint.to_uint(); }

}  // namespace ait
