#include "ait/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ait/enumerator.hpp"
#include "ait/mdl.hpp"
#include "ait/predictor.hpp"
#include "ait/probmodel.hpp"
#include "ait/witness_store.hpp"

namespace ait::cli {

namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string_view name_of(Encoding e) {
    switch (e) {
        case Encoding::Binary: return "binary";
        case Encoding::Hex: return "hex";
        case Encoding::Raw: return "raw";
    }
    return "?";
}

std::string_view name_of(Format f) {
    switch (f) {
        case Format::Json: return "json";
        case Format::Csv: return "csv";
        case Format::Human: return "human";
    }
    return "?";
}

Encoding parse_encoding(const std::string& s) {
    if (s == "binary") return Encoding::Binary;
    if (s == "hex") return Encoding::Hex;
    if (s == "raw") return Encoding::Raw;
    throw UsageError("unknown encoding: " + s);
}

Format parse_format(const std::string& s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    if (s == "human") return Format::Human;
    throw UsageError("unknown format: " + s);
}

SymbolString group_bits(const BitString& bits, unsigned m) {
    if (m == 2) return SymbolString::from_bits(bits);
    const unsigned w = bits_per_symbol(m);
    if (bits.size() % w != 0) {
        throw UsageError("input has " + std::to_string(bits.size()) + " bits, not a multiple of " +
                         std::to_string(w));
    }
    std::vector<std::uint32_t> s;
    for (std::size_t i = 0; i < bits.size(); i += w) {
        const auto v = bits.slice(i, i + w).to_uint();
        if (v >= m) throw UsageError("symbol value " + std::to_string(v) + " outside the alphabet");
        s.push_back(static_cast<std::uint32_t>(v));
    }
    return SymbolString(std::move(s), m);
}

BitString hex_bits(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) return BitString::from_hex(text);
    const std::string count(text.substr(colon + 1));
    std::size_t pos = 0;
    const auto n = std::stoull(count, &pos);
    if (pos != count.size()) throw UsageError("bad hex bit count: " + count);
    return BitString::from_hex(text.substr(0, colon), n);
}

BitString file_bits(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return BitString::from_bytes(bytes);
}

std::vector<std::string> split_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

json budget_json(const SearchBudget& b) {
    return {{"max_program_bits", b.max_program_bits}, {"max_steps", b.max_steps}};
}

json estimate_json(const Machine& m, const ComplexityEstimate& e) {
    return {{"kind", to_string(e.kind)},
            {"subject", e.subject.to_string()},
            {"second", e.second.to_string()},
            {"conditioning", e.conditioning.to_string()},
            {"value_bits", e.value_bits},
            {"witness", e.witness.code().to_string()},
            {"witness_hex", e.witness.code().to_hex()},
            {"program", e.witness.disassemble()},
            {"witness_steps", e.witness_steps},
            {"exhausted_below", e.exhausted_below},
            {"method", e.method},
            {"budget", budget_json(e.budget)},
            {"verified", verify(m, e)}};
}

std::string csv_cell(const json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }
    return s;
}

void human_lines(const json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            human_lines(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        }
    } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
        for (std::size_t i = 0; i < j.size(); ++i) human_lines(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else {
        out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

// What a command hands back: its JSON results and, for --format csv, a table.
struct Output {
    json results;
    std::vector<std::string> csv_header;
    std::vector<std::vector<json>> csv_rows;
};

}  // namespace

nlohmann::json RunConfig::to_json() const {
    return {{"budget_bits", budget_bits},
            {"budget_steps", budget_steps},
            {"jobs", jobs},
            {"seed", seed},
            {"alphabet", alphabet},
            {"encoding", name_of(encoding)},
            {"format", name_of(format)},
            {"store", store ? json(*store) : json(nullptr)}};
}

SymbolString parse_input(const std::string& text, unsigned m, Encoding enc) {
    try {
        if (text.starts_with("0b") || text.starts_with("0B")) return group_bits(BitString::parse(text), m);
        if (text.starts_with("hex:")) return group_bits(hex_bits(std::string_view(text).substr(4)), m);
        if (text.starts_with("raw:")) return group_bits(file_bits(text.substr(4)), m);
        switch (enc) {
            case Encoding::Binary: return group_bits(BitString::parse(text), m);
            case Encoding::Hex: return group_bits(hex_bits(text), m);
            case Encoding::Raw: return group_bits(file_bits(text), m);
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError("malformed input '" + text + "': " + e.what());
    }
    throw UsageError("malformed input");
}

std::string payload_without_wall_time(const std::string& json_report) {
    auto j = json::parse(json_report);
    j.erase("wall_time_ms");
    return j.dump();
}

namespace {

struct Context {
    const Machine& m;
    const RunConfig& cfg;
    SearchBudget budget;
    WitnessStore* store = nullptr;

    SymbolString input(const std::string& text) const { return parse_input(text, cfg.alphabet, cfg.encoding); }
};

ComplexityEstimate with_store(Context& ctx, ComplexityEstimate e, std::string& source) {
    source = "search";
    if (!ctx.store) return e;
    if (auto s = ctx.store->lookup(store_key(e))) {
        if (s->value_bits < e.value_bits ||
            (s->value_bits == e.value_bits && s->witness.code() < e.witness.code())) {
            e = *s;
            source = "store";
        }
    }
    ctx.store->improve(e);
    ctx.store->save();
    return e;
}

struct EstimateArgs {
    std::string data;
    std::optional<std::string> cond;
    std::optional<std::string> joint;
};

Output cmd_estimate(Context& ctx, const EstimateArgs& a) {
    if (a.cond && a.joint) throw UsageError("--cond and --joint are exclusive");
    const auto x = ctx.input(a.data);
    ComplexityEstimate e;
    if (a.cond) {
        e = estimate_K_cond(ctx.m, x, ctx.input(*a.cond).to_bits(), ctx.budget);
    } else if (a.joint) {
        e = estimate_K_joint(ctx.m, x, ctx.input(*a.joint), ctx.budget);
    } else {
        e = estimate_K(ctx.m, x, ctx.budget);
    }
    std::string source;
    e = with_store(ctx, std::move(e), source);
    Output o;
    o.results = estimate_json(ctx.m, e);
    if (!o.results["verified"].get<bool>()) throw InvariantViolation("witness does not replay");
    o.results["source"] = source;
    o.csv_header = {"kind", "value_bits", "witness", "method", "exhausted_below", "source"};
    o.csv_rows.push_back({o.results["kind"], e.value_bits, o.results["witness"], e.method, e.exhausted_below, source});
    return o;
}

struct PredictArgs {
    std::string data;
    std::vector<std::string> continuations;
    std::optional<std::string> file;
};

Output cmd_predict(Context& ctx, const PredictArgs& a) {
    const auto x = ctx.input(a.data);
    std::vector<SymbolString> ws;
    for (const auto& c : a.continuations) ws.push_back(ctx.input(c));
    if (a.file) {
        for (const auto& line : split_lines(*a.file)) ws.push_back(ctx.input(line));
    }
    const auto r = predict(ctx.m, x, ws, ctx.budget);
    Output o;
    json cands = json::array();
    o.csv_header = {"w", "k_cond_bits", "raw_weight", "prob", "prob_decimal"};
    for (const auto& c : r.candidates) {
        json row = {{"w", c.w.to_string()},
                    {"k_cond_bits", c.estimate.value_bits},
                    {"witness", c.estimate.witness.code().to_string()},
                    {"raw_weight", to_dyadic_string(c.raw_weight)},
                    {"prob", to_fraction_string(c.probability)},
                    {"prob_decimal", to_double(c.probability)}};
        o.csv_rows.push_back({row["w"], row["k_cond_bits"], row["raw_weight"], row["prob"], row["prob_decimal"]});
        cands.push_back(std::move(row));
    }
    const auto sum = r.probability_sum();
    if (sum != 1) throw InvariantViolation("probabilities sum to " + to_fraction_string(sum));
    o.results = {{"x", r.x.to_string()},
                 {"x_star_witness", r.x_star.witness.code().to_string()},
                 {"x_star_bits", r.x_star.value_bits},
                 {"budget", budget_json(r.budget)},
                 {"candidates", cands},
                 {"probability_sum", to_fraction_string(sum)}};
    return o;
}

struct SelectArgs {
    std::string data;
    std::string family = "periodic";
    int max_period = 4;
    bool hillclimb = false;
    bool exhaustive = false;
    bool compare = false;
    bool with_literal = false;
    std::optional<std::string> initial;
    std::size_t max_iters = 1000;
    std::optional<std::string> sweep_csv;
    std::optional<std::string> package;
    std::optional<std::string> pair_with;
};

ModelKey parse_key(const std::string& s) {
    ModelKey k;
    std::stringstream in(s);
    for (std::string part; std::getline(in, part, ',');) {
        try {
            k.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw UsageError("bad model key: " + s);
        }
    }
    return k;
}

json key_json(const ModelKey& k) { return json(k); }

SymbolString complement(const SymbolString& x) {
    std::vector<std::uint32_t> s(x.symbols().begin(), x.symbols().end());
    for (auto& v : s) v = (v + 1) % x.alphabet_size();
    return SymbolString(std::move(s), x.alphabet_size());
}

json description_json(const TwoPartDescription& d) {
    return {{"model", d.model},
            {"model_bits", d.model_bits},
            {"data_bits", d.data_bits},
            {"total_bits", d.total_bits},
            {"codeword", d.codeword.to_string()},
            {"fallback", d.fallback}};
}

std::vector<FiniteSetModel> set_family(Context& ctx, const SymbolString& x, const SelectArgs& a) {
    const auto partner = a.pair_with ? ctx.input(*a.pair_with) : complement(x);
    return {cube_model(ctx.m, x.size(), ctx.budget), pair_model(ctx.m, x, partner, ctx.budget),
            singleton_model(ctx.m, x, ctx.budget)};
}

void write_sweep_csv(const SweepReport& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << "alpha_bits,log_cardinality_bits,total_bits\n";
    for (const auto& p : s.curve) out << p.alpha_bits << "," << p.log_cardinality_bits << "," << p.total_bits << "\n";
}

Output select_sets(Context& ctx, const SymbolString& x, const SelectArgs& a) {
    const auto family = set_family(ctx, x, a);
    const auto sweep = structure_sweep(ctx.m, x, family, ctx.budget);
    Output o;
    json curve = json::array();
    o.csv_header = {"alpha_bits", "log_cardinality_bits", "total_bits"};
    for (const auto& p : sweep.curve) {
        curve.push_back({{"alpha_bits", p.alpha_bits},
                         {"log_cardinality_bits", p.log_cardinality_bits},
                         {"log_cardinality", p.log_cardinality},
                         {"model", p.model},
                         {"total_bits", p.total_bits}});
        o.csv_rows.push_back({p.alpha_bits, p.log_cardinality_bits, p.total_bits});
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < sweep.curve.size(); ++i) {
        if (sweep.curve[i].total_bits < sweep.curve[best].total_bits) best = i;
    }
    o.results = {{"family", "sets"},
                 {"curve", curve},
                 {"k_hat", sweep.k_hat},
                 {"slack_bits", sweep.slack_bits},
                 {"knee", sweep.knee ? json(sweep.knee->model) : json(nullptr)},
                 {"strictly_decreasing", sweep.strictly_decreasing},
                 {"non_increasing", sweep.non_increasing},
                 {"chosen", sweep.curve.empty() ? json(nullptr) : json(sweep.curve[best].model)}};
    if (a.sweep_csv) write_sweep_csv(sweep, *a.sweep_csv);
    return o;
}

Output select_periodic(Context& ctx, const SymbolString& x, const SelectArgs& a) {
    PeriodicFamily fam(ctx.m, x, a.max_period);
    const auto grid = fam.grid();
    if (grid.empty() && !a.with_literal) throw UsageError("empty model family");
    const bool run_hc = a.hillclimb || a.compare;
    const bool run_ex = a.exhaustive || a.compare || !a.hillclimb;
    Output o;
    o.results = {{"family", "periodic"}, {"max_period", a.max_period}, {"grid_size", grid.size()}};
    std::optional<CodeTree> chosen;

    std::optional<std::uint64_t> ex_total;
    if (run_ex) {
        std::vector<CodeTree> trees;
        std::vector<json> keys;
        if (a.with_literal) {
            trees.push_back(CodeTree::literal(ctx.m));
            keys.push_back(nullptr);
        }
        for (const auto& k : grid) {
            trees.push_back(fam.tree(k));
            keys.push_back(key_json(k));
        }
        const auto r = select_mdl(ctx.m, trees, x);
        json ranking = json::array();
        o.csv_header = {"model", "key", "model_bits", "data_bits", "total_bits"};
        for (auto i : r.order) {
            auto d = description_json(r.descriptions[i]);
            d["key"] = keys[i];
            o.csv_rows.push_back({d["model"], keys[i].dump(), d["model_bits"], d["data_bits"], d["total_bits"]});
            ranking.push_back(std::move(d));
        }
        ex_total = r.descriptions[r.best].total_bits;
        o.results["exhaustive"] = {{"best", keys[r.best]}, {"total_bits", *ex_total}, {"ranking", ranking}};
        chosen = trees[r.best];
    }
    if (run_hc) {
        if (grid.empty()) throw UsageError("hillclimb needs a non-empty grid");
        const ModelKey init = a.initial ? parse_key(*a.initial) : grid.front();
        if (std::find(grid.begin(), grid.end(), init) == grid.end()) throw UsageError("initial key not in the grid");
        const auto hc = hillclimb(fam.problem(), init, x, a.max_iters, ctx.cfg.seed);
        json trace = json::array();
        for (const auto& s : hc.trace) trace.push_back({{"key", key_json(s.key)}, {"total_bits", s.total_bits}});
        o.results["hillclimb"] = {{"best", key_json(hc.best)},
                                  {"total_bits", hc.total_bits},
                                  {"local_optimum", hc.local_optimum},
                                  {"iterations", hc.iterations},
                                  {"trace", trace}};
        if (!run_ex) chosen = fam.tree(hc.best);
        if (a.compare) {
            o.results["agreement"] = hc.total_bits == *ex_total;
            o.results["verdict"] = hc.total_bits == *ex_total ? "optimal" : (hc.local_optimum ? "local_optimum" : "neither");
            if (hc.total_bits != *ex_total && !hc.local_optimum) {
                throw InvariantViolation("hillclimb stopped away from a local optimum");
            }
        }
    }
    if (chosen) {
        o.results["chosen"] = chosen->name();
        if (a.package) save_model_package(*chosen, *a.package);
    }
    return o;
}

Output cmd_select(Context& ctx, const SelectArgs& a) {
    const auto x = ctx.input(a.data);
    if (a.family == "sets") return select_sets(ctx, x, a);
    if (a.family == "periodic") return select_periodic(ctx, x, a);
    if (a.family == "literal") {
        const auto r = select_mdl(ctx.m, {CodeTree::literal(ctx.m)}, x);
        Output o;
        o.results = {{"family", "literal"}, {"chosen", r.descriptions[r.best].model},
                     {"description", description_json(r.descriptions[r.best])}};
        o.csv_header = {"model", "total_bits"};
        o.csv_rows.push_back({r.descriptions[r.best].model, r.descriptions[r.best].total_bits});
        if (a.package) save_model_package(CodeTree::literal(ctx.m), *a.package);
        return o;
    }
    throw UsageError("unknown family: " + a.family);
}

struct DeficiencyArgs {
    std::string data;
    std::string set = "cube";
    std::optional<std::string> pair_with;
};

Output cmd_deficiency(Context& ctx, const DeficiencyArgs& a) {
    const auto x = ctx.input(a.data);
    FiniteSetModel S;
    if (a.set == "cube") {
        S = cube_model(ctx.m, x.size(), ctx.budget);
    } else if (a.set == "singleton") {
        S = singleton_model(ctx.m, x, ctx.budget);
    } else if (a.set == "pair") {
        S = pair_model(ctx.m, x, a.pair_with ? ctx.input(*a.pair_with) : complement(x), ctx.budget);
    } else {
        throw UsageError("unknown set: " + a.set);
    }
    const auto r = randomness_deficiency(ctx.m, x, S, ctx.budget);
    if (!r) throw UsageError("x is not a member of the set");
    Output o;
    o.results = {{"set", S.name},
                 {"enumerator", S.enumerator.code().to_string()},
                 {"model_bits", S.model_bits},
                 {"cardinality", r->cardinality},
                 {"log_cardinality", r->log_cardinality},
                 {"log_cardinality_exact", r->log_cardinality_exact ? json(to_fraction_string(*r->log_cardinality_exact)) : json(nullptr)},
                 {"k_cond", estimate_json(ctx.m, r->k_cond)},
                 {"deficiency", r->deficiency},
                 {"deficiency_exact", r->deficiency_exact ? json(to_fraction_string(*r->deficiency_exact)) : json(nullptr)},
                 {"orientation", DeficiencyReport::kOrientation}};
    o.csv_header = {"set", "cardinality", "log_cardinality", "k_cond_bits", "deficiency"};
    o.csv_rows.push_back({S.name, r->cardinality, r->log_cardinality, r->k_cond.value_bits, r->deficiency});
    return o;
}

struct EntropyArgs {
    std::string data;
    std::optional<std::string> q;
    std::optional<std::string> q_file;
    std::uint64_t model_bits = 0;
    std::vector<std::uint64_t> symbol_k;
    std::vector<std::string> symbol_strings;
};

json interval_json(const Interval& i) { return {{"lo", to_double(i.lo)}, {"hi", to_double(i.hi)}}; }

Output cmd_entropy(Context& ctx, const EntropyArgs& a) {
    const auto x = ctx.input(a.data);
    const unsigned m = ctx.cfg.alphabet;
    if (x.empty()) throw UsageError("entropy needs non-empty data");
    const auto p = empirical(x, m);
    const auto h = entropy(x, m);
    const auto budget = model_complexity_budget(x.size(), m, p);
    std::optional<Distribution> q;
    if (a.q) q = Distribution::from_json(*a.q);
    if (a.q_file) {
        std::ifstream in(*a.q_file);
        if (!in) throw UsageError("cannot read " + *a.q_file);
        q = Distribution::from_json(std::string(std::istreambuf_iterator<char>(in), {}));
    }
    if (q && q->alphabet_size() != m) throw UsageError("q alphabet does not match --alphabet");
    const Distribution model = q ? *q : p;

    Output o;
    json emp = json::array();
    for (const auto& v : p.probabilities()) emp.push_back(to_fraction_string(v));
    o.results = {{"n", x.size()},
                 {"m", m},
                 {"empirical", emp},
                 {"entropy_bits", h.bits},
                 {"entropy_exact", h.exact ? json(to_fraction_string(*h.exact)) : json(nullptr)},
                 {"entropy_enclosure", interval_json(h.enclosure)},
                 {"divergence_from_uniform", h.divergence_from_uniform},
                 {"budget_bits", budget.bits},
                 {"model", model.to_json()}};
    const auto v = check_model_viability(model, x, a.model_bits);
    o.results["viability"] = {{"verdict", to_string(v.verdict)},
                              {"model_bits", v.model_bits},
                              {"codelength_bits", v.codelength.mid()},
                              {"total_bits", v.total_bits},
                              {"uniform_bits", v.uniform_bits},
                              {"within_budget", v.within_budget},
                              {"gibbs_holds", v.gibbs_holds},
                              {"gibbs_gap", interval_json(v.gibbs_gap)}};

    std::vector<std::uint64_t> ks = a.symbol_k;
    json symbol_estimates = json::array();
    for (const auto& s : a.symbol_strings) {
        const auto e = estimate_K(ctx.m, ctx.input(s), ctx.budget);
        ks.push_back(e.value_bits);
        symbol_estimates.push_back(estimate_json(ctx.m, e));
    }
    if (!ks.empty()) {
        const auto b = per_symbol_bound(model, ks);
        json bounds = json::array();
        for (const auto& i : b.bounds) bounds.push_back(interval_json(i));
        o.results["per_symbol"] = {{"k_hat", ks},
                                   {"bounds", bounds},
                                   {"argmax", b.argmax},
                                   {"max", interval_json(b.max)},
                                   {"orientation", PerSymbolBound::kOrientation}};
        if (!symbol_estimates.empty()) o.results["per_symbol"]["estimates"] = symbol_estimates;
    }
    o.csv_header = {"n", "m", "entropy_bits", "budget_bits", "verdict"};
    o.csv_rows.push_back({x.size(), m, h.bits, budget.bits, o.results["viability"]["verdict"]});
    return o;
}

Output cmd_machine_info(Context& ctx) {
    Output o;
    o.results = json::parse(ctx.m.descriptor_json());
    const auto& c = ctx.m.constants();
    (void)c;
    o.csv_header = {"opcode", "code"};
    for (const auto& op : o.results.value("opcodes", json::array())) {
        o.csv_rows.push_back({op.value("name", ""), op.value("code", "")});
    }
    return o;
}

Output cmd_store(Context& ctx, const std::string& action) {
    if (!ctx.store) throw UsageError("no witness store configured");
    Output o;
    if (action == "gc") {
        const auto removed = ctx.store->gc();
        ctx.store->save();
        o.results = {{"action", "gc"}, {"removed", removed}, {"remaining", ctx.store->snapshot().size()}};
        o.csv_header = {"removed", "remaining"};
        o.csv_rows.push_back({removed, o.results["remaining"]});
        return o;
    }
    json records = json::array();
    o.csv_header = {"key", "kind", "value_bits", "witness"};
    for (const auto& e : ctx.store->snapshot()) {
        records.push_back({{"key", store_key(e)}, {"estimate", estimate_json(ctx.m, e)}});
        o.csv_rows.push_back({store_key(e), to_string(e.kind), e.value_bits, e.witness.code().to_string()});
    }
    o.results = {{"action", "inspect"}, {"records", records}};
    return o;
}

void emit(const Output& o, const json& report, Format f, std::ostream& out) {
    switch (f) {
        case Format::Json: out << report.dump(2) << "\n"; break;
        case Format::Csv:
            for (std::size_t i = 0; i < o.csv_header.size(); ++i) out << (i ? "," : "") << o.csv_header[i];
            out << "\n";
            for (const auto& row : o.csv_rows) {
                for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
                out << "\n";
            }
            break;
        case Format::Human: human_lines(report, "", out); break;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Budget-bounded algorithmic information estimates over a fixed reference machine."};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config();  // disable CLI11's own config handling

    RunConfig cfg;
    std::string format = "json", encoding = "binary";
    std::string store_path;
    bool no_store = false;
    std::optional<std::string> config_path;
    auto* o_bits = app.add_option("--budget-bits", cfg.budget_bits, "Longest program searched, in bits (L)");
    auto* o_steps = app.add_option("--budget-steps", cfg.budget_steps, "Step budget per program (S)");
    auto* o_jobs = app.add_option("--jobs", cfg.jobs, "Worker threads; results do not depend on it");
    auto* o_seed = app.add_option("--seed", cfg.seed, "Seed for randomized steps (hillclimb tie order)");
    auto* o_alpha = app.add_option("--alphabet", cfg.alphabet, "Alphabet size m");
    auto* o_enc = app.add_option("--encoding", encoding, "Input encoding: binary | hex | raw");
    auto* o_fmt = app.add_option("--format", format, "Output format: json | csv | human");
    auto* o_store = app.add_option("--store", store_path,
                                   std::string("Witness store directory (env ") + kStoreEnv + ", default " +
                                       kDefaultStore + ")");
    app.add_flag("--no-store", no_store, "Do not read or write a witness store");
    app.add_option("--config", config_path, "JSON config mirroring the flags; flags win");

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "Upper-bound K(x), K(x|aux) or K(x,w)");
    c_est->add_option("data", est.data, "Input string")->required();
    c_est->add_option("--cond", est.cond, "Conditioning string placed on the aux tape");
    c_est->add_option("--joint", est.joint, "Second string of a joint estimate");

    PredictArgs pre;
    auto* c_pre = app.add_subcommand("predict", "Normalized 2^-K(w|x*) over continuations");
    c_pre->add_option("data", pre.data, "Observed prefix")->required();
    c_pre->add_option("--continuation,-w", pre.continuations, "Candidate continuation (repeatable)");
    c_pre->add_option("--continuations", pre.file, "File with one continuation per line");

    SelectArgs sel;
    auto* c_sel = app.add_subcommand("select", "Two-part model selection");
    c_sel->add_option("data", sel.data, "Input string")->required();
    c_sel->add_option("--family", sel.family, "periodic | sets | literal");
    c_sel->add_option("--max-period", sel.max_period, "Largest period in the periodic family");
    c_sel->add_flag("--hillclimb", sel.hillclimb, "Hillclimb over the periodic grid");
    c_sel->add_flag("--exhaustive", sel.exhaustive, "Evaluate every model (default)");
    c_sel->add_flag("--compare", sel.compare, "Run both and report agreement");
    c_sel->add_flag("--with-literal", sel.with_literal, "Add the literal model to the exhaustive ranking");
    c_sel->add_option("--initial", sel.initial, "Hillclimb start key, e.g. 2,1");
    c_sel->add_option("--max-iters", sel.max_iters, "Hillclimb iteration cap");
    c_sel->add_option("--sweep-csv", sel.sweep_csv, "Write the structure curve (sets family)");
    c_sel->add_option("--package", sel.package, "Write the chosen model package to STEM.bin/.json");
    c_sel->add_option("--pair-with", sel.pair_with, "Second member of the pair model");

    DeficiencyArgs def;
    auto* c_def = app.add_subcommand("deficiency", "log2|S| - K(x|S) for a finite-set model");
    c_def->add_option("data", def.data, "Input string")->required();
    c_def->add_option("--set", def.set, "cube | pair | singleton");
    c_def->add_option("--pair-with", def.pair_with, "Second member of the pair model");

    EntropyArgs ent;
    auto* c_ent = app.add_subcommand("entropy", "Empirical entropy, model budget and viability");
    c_ent->add_option("data", ent.data, "Input string")->required();
    c_ent->add_option("--q", ent.q, R"(Model distribution as JSON, e.g. {"m":2,"p":["3/4","1/4"]})");
    c_ent->add_option("--q-file", ent.q_file, "File holding the model distribution JSON");
    c_ent->add_option("--model-bits", ent.model_bits, "Description length of the model q");
    c_ent->add_option("--symbol-k", ent.symbol_k, "K estimate per symbol object")->delimiter(',');
    c_ent->add_option("--symbol-strings", ent.symbol_strings, "Strings the symbols denote (K estimated)")
        ->delimiter(',');

    auto* c_info = app.add_subcommand("machine-info", "Reference machine descriptor");

    auto* c_store = app.add_subcommand("store", "Witness store maintenance");
    c_store->require_subcommand(1);
    auto* c_inspect = c_store->add_subcommand("inspect", "List stored estimates");
    auto* c_gc = c_store->add_subcommand("gc", "Drop records that no longer replay");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    const auto started = std::chrono::steady_clock::now();
    try {
        json file_cfg = json::object();
        if (config_path) {
            std::ifstream in(*config_path);
            if (!in) throw UsageError("cannot read " + *config_path);
            try {
                file_cfg = json::parse(in);
            } catch (const json::exception& e) {
                throw UsageError(std::string("config: ") + e.what());
            }
            if (!file_cfg.is_object()) throw UsageError("config must be a JSON object");
        }
        auto from_file = [&](CLI::Option* opt, const char* key, auto& target) {
            if (opt->count() == 0 && file_cfg.contains(key)) {
                try {
                    target = file_cfg[key].get<std::decay_t<decltype(target)>>();
                } catch (const json::exception& e) {
                    throw UsageError(std::string("config key ") + key + ": " + e.what());
                }
            }
        };
        from_file(o_bits, "budget_bits", cfg.budget_bits);
        from_file(o_steps, "budget_steps", cfg.budget_steps);
        from_file(o_jobs, "jobs", cfg.jobs);
        from_file(o_seed, "seed", cfg.seed);
        from_file(o_alpha, "alphabet", cfg.alphabet);
        from_file(o_enc, "encoding", encoding);
        from_file(o_fmt, "format", format);
        cfg.encoding = parse_encoding(encoding);
        cfg.format = parse_format(format);
        if (cfg.alphabet < 2 || cfg.alphabet > 16) throw UsageError("--alphabet must be in [2, 16]");

        if (no_store || (file_cfg.contains("store") && file_cfg["store"].is_null() && o_store->count() == 0)) {
            cfg.store.reset();
        } else if (o_store->count() > 0) {
            cfg.store = store_path;
        } else if (const char* env = std::getenv(kStoreEnv); env && *env) {
            cfg.store = std::string(env);
        } else if (file_cfg.contains("store") && file_cfg["store"].is_string()) {
            cfg.store = file_cfg["store"].get<std::string>();
        } else {
            cfg.store = std::string(kDefaultStore);
        }

        Machine m(cfg.alphabet);
        Context ctx{m, cfg, {}, nullptr};
        ctx.budget.max_program_bits = cfg.budget_bits;
        ctx.budget.max_steps = cfg.budget_steps;
        ctx.budget.jobs = cfg.jobs;
        try {
            ctx.budget.validate();
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        std::optional<WitnessStore> store;
        json store_load = nullptr;
        const bool needs_store = c_est->parsed() || c_store->parsed();
        if (cfg.store && needs_store) {
            store.emplace(m, *cfg.store);
            const auto lr = store->load();
            store_load = {{"loaded", lr.loaded}, {"rejected", lr.rejected}, {"machine_mismatch", lr.machine_mismatch}};
            ctx.store = &*store;
        }

        std::string command;
        Output o;
        if (c_est->parsed()) {
            command = "estimate";
            o = cmd_estimate(ctx, est);
        } else if (c_pre->parsed()) {
            command = "predict";
            o = cmd_predict(ctx, pre);
        } else if (c_sel->parsed()) {
            command = "select";
            o = cmd_select(ctx, sel);
        } else if (c_def->parsed()) {
            command = "deficiency";
            o = cmd_deficiency(ctx, def);
        } else if (c_ent->parsed()) {
            command = "entropy";
            o = cmd_entropy(ctx, ent);
        } else if (c_info->parsed()) {
            command = "machine-info";
            o = cmd_machine_info(ctx);
        } else if (c_inspect->parsed()) {
            command = "store inspect";
            o = cmd_store(ctx, "inspect");
        } else if (c_gc->parsed()) {
            command = "store gc";
            o = cmd_store(ctx, "gc");
        }

        json report = {{"command", command},
                       {"config", cfg.to_json()},
                       {"machine", {{"isa", Machine::kIsaVersion}, {"hash", m.version_hash_hex()}}},
                       {"results", o.results}};
        report["store"] = {{"path", cfg.store ? json(*cfg.store) : json(nullptr)},
                           {"hits", store ? store->hits() : 0},
                           {"misses", store ? store->misses() : 0},
                           {"load", store_load}};
        report["wall_time_ms"] =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        emit(o, report, cfg.format, out);
        return kOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InfiniteCodeLength& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const json::parse_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvariantViolation& e) {
        err << "internal invariant violated: " << e.what() << "\n";
        return kInternal;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

}  // namespace ait::cli
