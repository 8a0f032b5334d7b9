// Acceptance run: one PASS/FAIL line per criterion. Supporting detail goes on
// lines starting with '#'. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "ait/cli.hpp"
#include "ait/enumerator.hpp"
#include "ait/mdl.hpp"
#include "ait/predictor.hpp"
#include "ait/probmodel.hpp"
#include "json.hpp"
#include "support/kraft_audit.hpp"
#include "support/oracle.hpp"

using namespace ait;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

SearchBudget budget(unsigned bits, std::uint64_t steps) {
    SearchBudget b;
    b.max_program_bits = bits;
    b.max_steps = steps;
    return b;
}

SymbolString random_string(std::mt19937_64& rng, std::size_t max_len) {
    std::vector<std::uint32_t> s(rng() % (max_len + 1));
    for (auto& v : s) v = static_cast<std::uint32_t>(rng() & 1);
    return SymbolString(std::move(s), 2);
}

SymbolString periodic(std::mt19937_64& rng, std::size_t period, std::size_t len) {
    std::vector<std::uint32_t> pat(period), s(len);
    for (auto& v : pat) v = static_cast<std::uint32_t>(rng() & 1);
    for (std::size_t i = 0; i < len; ++i) s[i] = pat[i % period];
    return SymbolString(std::move(s), 2);
}

// Replays a witness without going through verify(): the expected tape is
// rebuilt from the estimate's inputs.
bool replays(const Machine& m, const ComplexityEstimate& e) {
    Tape want;
    BitString aux;
    switch (e.kind) {
        case EstimateKind::Plain: want = m.tape_of(e.subject); break;
        case EstimateKind::Conditional:
            want = m.tape_of(e.subject);
            aux = e.conditioning;
            break;
        case EstimateKind::Joint: want = m.joint_tape(e.subject, e.second); break;
    }
    const auto out = m.run(e.witness, aux, e.witness_steps);
    return out.status == RunStatus::Halted && out.tape == want && e.witness.size() == e.value_bits;
}

Outcome alternation_compression(const Machine& m) {
    const auto x = alternating(32);
    const auto h = entropy(x, 2);
    const bool a = h.exact && *h.exact == 1;

    // Any q codes x in at least n H(p) = 32 bits, so model bits can be
    // taken as zero. Checked exactly on a grid and on random rationals.
    bool b = true;
    std::size_t models = 0;
    const auto p = empirical(x, 2);
    std::mt19937_64 rng(1);
    std::vector<Rational> q0;
    for (int k = 1; k < 1024; ++k) q0.emplace_back(k, 1024);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t den = 2 + rng() % 100000;
        q0.emplace_back(BigInt(1 + rng() % (den - 1)), BigInt(den));
    }
    for (const auto& v : q0) {
        const Distribution q({v, 1 - v});
        b = b && two_part_at_least(q, x, 0, 32) && gibbs_inequality_holds(p, q);
        ++models;
    }
    const auto e = estimate_K(m, x, budget(24, 100000));
    const bool c = e.value_bits < 32 && replays(m, e);
    std::ostringstream d;
    d << "entropy=" << (h.exact ? to_fraction_string(*h.exact) : "inexact") << " single-symbol models>=32 on "
      << models << " q; K^=" << e.value_bits << " (" << e.witness.disassemble() << ")";
    return {a && b && c, d.str()};
}

Outcome upper_bound_soundness(const Machine& m) {
    std::mt19937_64 rng(2);
    std::size_t failures = 0, counts[3] = {0, 0, 0};
    for (int i = 0; i < 1000; ++i) {
        const auto b = budget(12 + static_cast<unsigned>(rng() % 4), 2000);
        const auto x = random_string(rng, 10);
        ComplexityEstimate e;
        switch (rng() % 3) {
            case 0: e = estimate_K(m, x, b); break;
            case 1: e = estimate_K_cond(m, x, random_string(rng, 8).to_bits(), b); break;
            default: e = estimate_K_joint(m, x, random_string(rng, 4), b); break;
        }
        ++counts[static_cast<int>(e.kind)];
        if (!replays(m, e)) ++failures;
    }
    std::ostringstream d;
    d << "1000 estimates (plain " << counts[0] << ", conditional " << counts[1] << ", joint " << counts[2]
      << "), replay failures " << failures;
    return {failures == 0, d.str()};
}

Outcome budget_monotonicity(const Machine& m) {
    std::mt19937_64 rng(3);
    std::size_t violations = 0, improved = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = (i % 2) ? random_string(rng, 16) : periodic(rng, 1 + rng() % 4, rng() % 17);
        const auto lo = estimate_K(m, x, budget(14, 2000));
        const auto hi = estimate_K(m, x, budget(16, 8000));
        if (hi.value_bits > lo.value_bits) ++violations;
        if (hi.value_bits < lo.value_bits) ++improved;
    }
    std::ostringstream d;
    d << "100 strings at (14, 2000) vs (16, 8000): violations " << violations << ", strictly improved " << improved;
    return {violations == 0, d.str()};
}

Outcome exhaustiveness(const Machine& m) {
    const unsigned L = 14;
    const std::uint64_t S = 10000;
    const auto best = oracle::all_minimal(m, L, S);
    std::size_t strings = 0, mismatches = 0;
    for (std::size_t n = 0; n <= 6; ++n) {
        for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
            const auto x = SymbolString::from_bits(BitString::from_uint(v, static_cast<unsigned>(n)));
            const auto e = estimate_K(m, x, budget(L, S));
            const auto it = best.find(m.tape_of(x));
            const bool ok = it == best.end() ? (e.method == "literal" && e.value_bits > L)
                                             : (e.value_bits == it->second.size() && e.witness.code() == it->second);
            if (!ok) ++mismatches;
            ++strings;
        }
    }
    std::ostringstream d;
    d << strings << " strings of <= 6 symbols at L=" << L << ", S=" << S << ": mismatches " << mismatches;
    return {mismatches == 0, d.str()};
}

// No valid program is a proper prefix of another, over every bit string of
// at most `bits` bits.
std::size_t program_prefix_violations(const Machine& m, unsigned bits, std::size_t& valid) {
    std::vector<std::vector<bool>> ok(bits + 1);
    for (unsigned n = 0; n <= bits; ++n) {
        ok[n].resize(std::size_t{1} << n);
        for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
            ok[n][v] = n > 0 && m.decode(BitString::from_uint(v, n)).has_value();
            valid += ok[n][v];
        }
    }
    std::size_t bad = 0;
    for (unsigned n = 1; n <= bits; ++n) {
        for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
            if (!ok[n][v]) continue;
            for (unsigned k = 1; k < n; ++k) bad += ok[k][v >> (n - k)];
        }
    }
    return bad;
}

Outcome kraft_admissibility(const Machine& m) {
    std::size_t trees = 0, violations = 0;
    auto check = [&](const CodeTree& t) {
        const std::size_t before = audit::tally().violations;
        audit::check(t);
        ++trees;
        if (audit::tally().violations != before || check_kraft(t) > 1) ++violations;
    };
    check(CodeTree::literal(m));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) {
        const auto x = periodic(rng, 1 + rng() % 4, 8 + rng() % 17);
        PeriodicFamily fam(m, x, 6);
        for (const auto& k : fam.grid()) check(fam.tree(k));
    }
    std::size_t shannon = 0;
    for (int i = 0; i < 200; ++i) {
        const unsigned k = 1 + static_cast<unsigned>(rng() % 12);
        std::vector<Rational> p;
        std::vector<std::uint64_t> raw(k);
        std::uint64_t total = 0;
        for (auto& r : raw) total += (r = 1 + rng() % 1000);
        for (auto r : raw) p.emplace_back(BigInt(r), BigInt(total));
        std::vector<SymbolString> labels;
        for (unsigned j = 0; j < k; ++j) labels.push_back(SymbolString::from_bits(BitString::from_uint(j, 4)));
        check(codetree_from_distribution(m, Distribution(std::move(p)), labels));
        ++shannon;
    }
    std::size_t valid = 0;
    const auto prefix_bad = program_prefix_violations(m, 20, valid);
    std::ostringstream d;
    d << trees << " code trees (" << shannon << " Shannon), violations " << violations << "; " << valid
      << " programs of <= 20 bits, prefix violations " << prefix_bad;
    return {violations == 0 && prefix_bad == 0, d.str()};
}

Outcome prediction_sanity(const Machine& m) {
    const auto r = predict(m, alternating(16), {alternating(2), constant(2)}, budget(24, 100000));
    const auto& alt = r.candidates[0];
    const auto& con = r.candidates[1];
    std::ostringstream d;
    d << "P(01)=" << to_fraction_string(alt.probability) << " (K^=" << alt.estimate.value_bits << "), P(00)="
      << to_fraction_string(con.probability) << " (K^=" << con.estimate.value_bits
      << "), sum=" << to_fraction_string(r.probability_sum());
    return {alt.probability > con.probability && r.probability_sum() == 1, d.str()};
}

Outcome expected_error_experiment(const Machine& m, std::ostream& log) {
    const auto b = budget(16, 10000);
    const auto x = alternating(8);
    const auto Y = enumerate_candidates(m, x, b);
    const auto star = estimate_K(m, x, b).witness;
    ErrorTable t(m, b);
    std::vector<Program> zs;
    for (const auto& c : Y.members) zs.push_back(c.program);
    const auto ranking = rank_by_expected_error(t, zs, Y);
    Rational star_err = -1;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        const auto& r = ranking[i];
        if (r.z == star) star_err = r.expected_error;
        log << "#   " << i + 1 << ". " << r.z.disassemble() << "  E=" << to_fraction_string(r.expected_error)
            << (r.z == star ? "  <- x*" : "") << "\n";
    }
    const bool ok = !ranking.empty() && star_err == ranking.front().expected_error;
    std::size_t tied = 0;
    for (const auto& r : ranking) tied += r.expected_error == ranking.front().expected_error;
    std::ostringstream d;
    d << Y.members.size() << " candidates; x*=" << star.disassemble() << " E=" << to_fraction_string(star_err)
      << ", minimum " << (ranking.empty() ? "-" : to_fraction_string(ranking.front().expected_error)) << " ("
      << tied << " tied)";
    return {ok, d.str()};
}

Outcome structure_sweep_shape(const Machine& m, std::ostream& log) {
    const auto b = budget(24, 100000);
    const auto x = alternating(16);
    const auto pair = pair_model(m, x, alternating(16, 1), b);
    const std::vector<FiniteSetModel> fam = {cube_model(m, 16, b), pair, singleton_model(m, x, b)};
    const auto s = structure_sweep(m, x, fam, b, 4);
    for (const auto& f : fam) {
        log << "#   " << f.name << ": model_bits=" << f.model_bits << " log|S|=" << f.log_cardinality_bits() << "\n";
    }
    std::ostringstream d;
    d << "K^=" << s.k_hat << " curve";
    for (const auto& p : s.curve) d << " (" << p.alpha_bits << "," << p.log_cardinality_bits << "," << p.model << ")";
    d << " strictly_decreasing=" << s.strictly_decreasing << " knee=" << (s.knee ? s.knee->model : "none");
    const bool ok = s.curve.size() == 3 && s.strictly_decreasing && s.knee && s.knee->model == pair.name;
    return {ok, d.str()};
}

Outcome approximation_bound(const Machine& m, std::ostream& log) {
    std::mt19937_64 rng(9);
    std::size_t within = 0, cases = 0;
    for (int i = 0; i < 50; ++i) {
        const auto x = periodic(rng, 1 + rng() % 4, 8 + rng() % 13);
        const auto ref_prog = estimate_K(m, x, budget(24, 100000)).witness;
        const auto ref = CodeTree::uniform("x*", ref_prog, 0,
                                           [](const SymbolString&) { return std::optional<BitString>(BitString{}); });
        PeriodicFamily fam(m, x, 4);
        const auto grid = fam.grid();
        const auto key = grid[rng() % grid.size()];
        const auto r = approximation_error_bound(m, fam.tree(key), x, ref, budget(14, 5000));
        ++cases;
        if (r.within.value_or(false)) {
            ++within;
        } else {
            log << "#   exception: x=" << x.to_string() << " model=" << fam.tree(key).name()
                << " measured=" << r.measured.value_or(0) << " bound=" << r.bound << "+" << r.slack_bits << "\n";
        }
    }
    std::ostringstream d;
    d << within << "/" << cases << " within log2(total)+slack (need >= 95%)";
    return {within * 100 >= cases * 95, d.str()};
}

Outcome hillclimb_vs_exhaustive(const Machine& m) {
    std::mt19937_64 rng(10);
    std::size_t grids = 0, runs = 0, optimal = 0, local = 0, neither = 0;
    std::vector<SymbolString> xs = {alternating(32), alternating(20), SymbolString::parse("0010010010010010010010")};
    for (int i = 0; i < 5; ++i) xs.push_back(periodic(rng, 1 + rng() % 6, 12 + rng() % 21));
    for (const auto& x : xs) {
        for (int P : {3, 5, 8}) {
            PeriodicFamily fam(m, x, P);
            const auto grid = fam.grid();
            if (grid.empty() || grid.size() > 64) continue;
            ++grids;
            std::map<ModelKey, std::uint64_t> total;
            std::uint64_t best = UINT64_MAX;
            for (const auto& k : grid) best = std::min(best, total[k] = fam.total_bits(k));
            for (std::size_t s = 0; s < grid.size(); s += 3) {
                const auto hc = hillclimb(fam.problem(), grid[s], x, 1000, s);
                ++runs;
                if (hc.total_bits == best) {
                    ++optimal;
                    continue;
                }
                bool is_local = true;
                for (const auto& n : fam.neighbors(hc.best)) is_local = is_local && total.at(n) >= hc.total_bits;
                if (is_local) {
                    ++local;
                } else {
                    ++neither;
                }
            }
        }
    }
    std::ostringstream d;
    d << grids << " grids, " << runs << " runs: optimal " << optimal << ", genuine local optimum " << local
      << ", neither " << neither;
    return {neither == 0 && runs > 0, d.str()};
}

Outcome cli_reproducibility() {
    const std::string alt16 = "0b0101010101010101";
    const auto dir = std::filesystem::temp_directory_path() / "ait-acceptance-store";
    std::filesystem::remove_all(dir);
    std::vector<std::vector<std::string>> commands = {
        {"--no-store", "estimate", "0b01010101010101010101010101010101"},
        {"--no-store", "--budget-bits", "16", "estimate", "0b0110", "--cond", "0b0110"},
        {"--no-store", "--budget-bits", "16", "estimate", "0b01", "--joint", "0b10"},
        {"--no-store", "--budget-bits", "18", "predict", alt16, "-w", "0b01", "-w", "0b00"},
        {"--no-store", "--seed", "3", "select", "0b01010101010101010101010101010101", "--compare"},
        {"--no-store", "--budget-bits", "14", "select", "0b0101", "--family", "sets"},
        {"--no-store", "--budget-bits", "16", "deficiency", "0b0110"},
        {"--no-store", "entropy", alt16, "--symbol-k", "3,4"},
        {"--no-store", "--format", "json", "machine-info"},
        {"--store", dir.string(), "--budget-bits", "16", "estimate", "0b0110"},
        {"--store", dir.string(), "store", "inspect"},
    };
    std::size_t identical = 0;
    std::string first_bad;
    for (const auto& c : commands) {
        std::string payload[2];
        bool ok = true;
        for (auto& p : payload) {
            std::ostringstream out, err;
            ok = ok && cli::run(c, out, err) == cli::kOk;
            if (ok) p = cli::payload_without_wall_time(out.str());
        }
        // The store command's second run sees the first run's witness; equal
        // store state means a third run must match the second.
        if (ok && c[0] == "--store" && c[3] != "store") {
            std::ostringstream out, err;
            ok = cli::run(c, out, err) == cli::kOk;
            payload[0] = payload[1];
            payload[1] = cli::payload_without_wall_time(out.str());
        }
        if (ok && payload[0] == payload[1]) {
            ++identical;
        } else if (first_bad.empty()) {
            first_bad = c.back();
        }
    }
    std::filesystem::remove_all(dir);
    std::ostringstream d;
    d << identical << "/" << commands.size() << " commands byte-identical";
    if (!first_bad.empty()) d << "; first difference at '" << first_bad << "'";
    return {identical == commands.size(), d.str()};
}

}  // namespace

int main() {
    const Machine m;
    std::cout << "# machine " << Machine::kIsaVersion << " " << m.version_hash_hex() << "\n";
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome(std::ostream&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "alternation-compression", [&](std::ostream&) { return alternation_compression(m); }},
        {2, "upper-bound-soundness", [&](std::ostream&) { return upper_bound_soundness(m); }},
        {3, "budget-monotonicity", [&](std::ostream&) { return budget_monotonicity(m); }},
        {4, "exhaustiveness-oracle", [&](std::ostream&) { return exhaustiveness(m); }},
        {5, "kraft-prefix-free", [&](std::ostream&) { return kraft_admissibility(m); }},
        {6, "prediction-sanity", [&](std::ostream&) { return prediction_sanity(m); }},
        {7, "expected-error", [&](std::ostream& log) { return expected_error_experiment(m, log); }},
        {8, "structure-sweep-shape", [&](std::ostream& log) { return structure_sweep_shape(m, log); }},
        {9, "mdl-bound-diagnostic", [&](std::ostream& log) { return approximation_bound(m, log); }},
        {10, "hillclimb-vs-exhaustive", [&](std::ostream&) { return hillclimb_vs_exhaustive(m); }},
        {11, "cli-reproducibility", [&](std::ostream&) { return cli_reproducibility(); }},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::ostringstream log;
        Outcome o;
        try {
            o = c.run(log);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << log.str();
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail << " ["
                  << static_cast<int>(secs * 10) / 10.0 << "s]" << std::endl;
        failed += !o.pass;
    }
    std::cout << "# " << criteria.size() - failed << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
