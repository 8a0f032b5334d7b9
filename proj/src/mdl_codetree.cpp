#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "ait/mdl.hpp"
#include "json.hpp"

namespace ait {

namespace {

constexpr std::uint64_t kDecodeSteps = 10'000'000;

bool prefix_free(const std::vector<CodeTreeEntry>& entries) {
    std::vector<std::string> codes;
    for (const auto& e : entries) codes.push_back(e.codeword.to_string());
    std::sort(codes.begin(), codes.end());
    for (std::size_t i = 1; i < codes.size(); ++i) {
        if (codes[i].compare(0, codes[i - 1].size(), codes[i - 1]) == 0) return false;
    }
    return true;
}

bool is_compact(const std::vector<CodeTreeEntry>& entries) {
    std::set<std::string> nodes;
    for (const auto& e : entries) {
        const std::string c = e.codeword.to_string().substr(2);
        for (std::size_t i = 0; i <= c.size(); ++i) nodes.insert(c.substr(0, i));
    }
    for (const auto& e : entries) {
        const std::string c = e.codeword.to_string().substr(2);
        for (std::size_t i = 0; i < c.size(); ++i) {
            const std::string p = c.substr(0, i);
            if (!nodes.count(p + "0") || !nodes.count(p + "1")) return false;
        }
    }
    return true;
}

BitString read_node(const Machine& m, const std::vector<const CodeTreeEntry*>& subset, std::size_t depth) {
    if (subset.empty()) return code::block({});
    if (subset.size() == 1 && subset[0]->codeword.size() == depth) {
        return code::block({code::emit_string(subset[0]->value, m.symbol_width())});
    }
    std::vector<const CodeTreeEntry*> zero, one;
    for (const auto* e : subset) (e->codeword[depth] ? one : zero).push_back(e);
    return code::block({code::read(read_node(m, zero, depth + 1), read_node(m, one, depth + 1))});
}

void compact_rec(std::vector<CodeTreeEntry>& out, const std::vector<const CodeTreeEntry*>& subset,
                 std::size_t depth, const BitString& prefix) {
    if (subset.empty()) return;
    if (subset.size() == 1 && subset[0]->codeword.size() == depth) {
        out.push_back({prefix, subset[0]->value});
        return;
    }
    std::vector<const CodeTreeEntry*> zero, one;
    for (const auto* e : subset) (e->codeword[depth] ? one : zero).push_back(e);
    if (zero.empty() || one.empty()) {
        compact_rec(out, zero.empty() ? one : zero, depth + 1, prefix);
        return;
    }
    compact_rec(out, zero, depth + 1, prefix + BitString{0});
    compact_rec(out, one, depth + 1, prefix + BitString{1});
}

bool description_less(const TwoPartDescription& a, const TwoPartDescription& b, const Program& da,
                      const Program& db) {
    if (a.total_bits != b.total_bits) return a.total_bits < b.total_bits;
    if (a.model_bits != b.model_bits) return a.model_bits < b.model_bits;
    return da.code() < db.code();
}

}  // namespace

std::string_view to_string(CodeTreeError e) {
    switch (e) {
        case CodeTreeError::NotPrefixFree: return "NotPrefixFree";
        case CodeTreeError::KraftViolation: return "KraftViolation";
        case CodeTreeError::NotBijective: return "NotBijective";
        case CodeTreeError::NotCompact: return "NotCompact";
        case CodeTreeError::DecoderMismatch: return "DecoderMismatch";
    }
    return "?";
}

BitString read_tree_decoder(const Machine& m, const std::vector<CodeTreeEntry>& entries) {
    std::vector<const CodeTreeEntry*> all;
    for (const auto& e : entries) all.push_back(&e);
    return read_node(m, all, 0);
}

Expected<CodeTree, CodeTreeError> CodeTree::from_table(const Machine& m, std::string name,
                                                       std::vector<CodeTreeEntry> entries, bool allow_sparse) {
    if (!prefix_free(entries)) return CodeTreeError::NotPrefixFree;
    Rational kraft = 0;
    for (const auto& e : entries) kraft += dyadic(e.codeword.size());
    if (kraft > 1) return CodeTreeError::KraftViolation;
    std::set<SymbolString> values;
    for (const auto& e : entries) {
        if (!values.insert(e.value).second) return CodeTreeError::NotBijective;
    }
    const bool compact = is_compact(entries);
    if (!compact && !allow_sparse) return CodeTreeError::NotCompact;

    CodeTree t;
    t.kind_ = Kind::Table;
    t.name_ = std::move(name);
    t.compact_ = compact;
    t.decoder_ = m.decode_or_throw(read_tree_decoder(m, entries));
    t.entries_ = std::move(entries);
    for (const auto& e : t.entries_) {
        if (t.decode(m, e.codeword) != e.value) return CodeTreeError::DecoderMismatch;
    }
    return t;
}

CodeTree CodeTree::uniform(std::string name, Program decoder, unsigned width, Encoder encode) {
    CodeTree t;
    t.kind_ = Kind::Uniform;
    t.name_ = std::move(name);
    t.decoder_ = std::move(decoder);
    t.width_ = width;
    t.encode_ = std::move(encode);
    return t;
}

CodeTree CodeTree::literal(const Machine& m) {
    CodeTree t;
    t.kind_ = Kind::Literal;
    t.name_ = "literal";
    t.decoder_ = m.exec_aux_program();
    return t;
}

std::optional<BitString> CodeTree::encode(const Machine& m, const SymbolString& x) const {
    switch (kind_) {
        case Kind::Table:
            for (const auto& e : entries_) {
                if (e.value == x) return e.codeword;
            }
            return std::nullopt;
        case Kind::Uniform: {
            auto r = encode_(x);
            if (!r || r->size() != width_ || decode(m, *r) != x) return std::nullopt;
            return r;
        }
        case Kind::Literal:
            return m.literal_program(x).code();
    }
    return std::nullopt;
}

std::optional<SymbolString> CodeTree::decode(const Machine& m, const BitString& r) const {
    const auto out = m.run(decoder_, r, kDecodeSteps);
    if (out.status != RunStatus::Halted || out.aux_bits_read != r.size()) return std::nullopt;
    return out.output(m.alphabet_size());
}

CodeTree CodeTree::compacted(const Machine& m) const {
    if (kind_ != Kind::Table || compact_) return *this;
    std::vector<const CodeTreeEntry*> all;
    for (const auto& e : entries_) all.push_back(&e);
    std::vector<CodeTreeEntry> out;
    compact_rec(out, all, 0, {});
    auto t = from_table(m, name_ + " (compacted)", std::move(out));
    if (!t) throw std::logic_error("compaction produced an invalid tree");
    return std::move(t).value();
}

Rational check_kraft(const CodeTree& tree) {
    switch (tree.kind()) {
        case CodeTree::Kind::Table: {
            Rational s = 0;
            for (const auto& e : tree.entries()) s += dyadic(e.codeword.size());
            return s;
        }
        case CodeTree::Kind::Uniform:
            return 1;
        case CodeTree::Kind::Literal:
            // Strings of n symbols share gamma(n+1); summing over n leaves the
            // fixed LITERAL and END bits.
            return dyadic(opcode_info(Op::Literal).code.size() + opcode_info(Op::End).code.size());
    }
    return 0;
}

void require_kraft(const CodeTree& tree) {
    if (check_kraft(tree) > 1) throw std::domain_error("KraftViolation: " + tree.name());
}

Expected<BitString, NotCovered> encode_with_model(const Machine& m, const CodeTree& tree, const SymbolString& x) {
    auto r = tree.encode(m, x);
    if (!r) return NotCovered{};
    return std::move(*r);
}

TwoPartDescription two_part_length(const Machine& m, const CodeTree& tree, const SymbolString& x) {
    TwoPartDescription d;
    d.model = tree.name();
    const CodeTree* used = &tree;
    CodeTree fallback;
    auto r = tree.encode(m, x);
    if (!r) {
        fallback = CodeTree::literal(m);
        used = &fallback;
        r = fallback.encode(m, x);
        d.fallback = true;
    }
    if (used->decode(m, *r) != x) throw std::logic_error("two-part description does not reconstruct x");
    d.model_bits = used->description_bits();
    d.data_bits = r->size();
    d.total_bits = d.model_bits + d.data_bits;
    d.codeword = std::move(*r);
    return d;
}

Ranking select_mdl(const Machine& m, const std::vector<CodeTree>& candidates, const SymbolString& x,
                   const std::optional<CompressibilityCheck>& check) {
    if (candidates.empty()) throw std::invalid_argument("select_mdl: no candidates");
    Ranking r;
    std::vector<const Program*> decoders;
    const CodeTree literal = CodeTree::literal(m);
    for (const auto& c : candidates) {
        auto d = two_part_length(m, c, x);
        if (check && d.data_bits > 0) {
            const auto k = estimate_K(m, SymbolString::from_bits(d.codeword), check->budget).value_bits;
            d.data_compressible = k + check->margin_bits < d.data_bits;
        }
        decoders.push_back(d.fallback ? &literal.decoder() : &c.decoder());
        r.descriptions.push_back(std::move(d));
    }
    r.order.resize(candidates.size());
    for (std::size_t i = 0; i < r.order.size(); ++i) r.order[i] = i;
    std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
        return description_less(r.descriptions[a], r.descriptions[b], *decoders[a], *decoders[b]);
    });
    r.best = r.order.front();
    return r;
}

void save_model_package(const CodeTree& tree, const std::filesystem::path& stem) {
    std::vector<std::uint8_t> bin;
    auto put_bits = [&](const BitString& b) {
        const auto n = static_cast<std::uint32_t>(b.size());
        for (int i = 0; i < 4; ++i) bin.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
        std::uint8_t acc = 0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            acc = static_cast<std::uint8_t>(acc | (b[i] << (7 - i % 8)));
            if (i % 8 == 7) {
                bin.push_back(acc);
                acc = 0;
            }
        }
        if (b.size() % 8) bin.push_back(acc);
    };
    put_bits(tree.decoder().code());
    nlohmann::json idx;
    idx["name"] = tree.name();
    idx["kind"] = tree.kind() == CodeTree::Kind::Table ? "table" : tree.kind() == CodeTree::Kind::Uniform ? "uniform" : "literal";
    idx["decoder"] = tree.decoder().code().to_string();
    idx["description_bits"] = tree.description_bits();
    idx["kraft_sum"] = to_fraction_string(check_kraft(tree));
    auto table = nlohmann::json::array();
    for (const auto& e : tree.entries()) {
        put_bits(e.codeword);
        put_bits(e.value.to_bits());
        table.push_back({{"codeword", e.codeword.to_string()}, {"value", e.value.to_string()}});
    }
    idx["entries"] = table;
    if (tree.kind() == CodeTree::Kind::Uniform) idx["codeword_bits"] = tree.uniform_width();
    std::ofstream(stem.string() + ".bin", std::ios::binary)
        .write(reinterpret_cast<const char*>(bin.data()), static_cast<std::streamsize>(bin.size()));
    std::ofstream(stem.string() + ".json") << idx.dump(2) << '\n';
}

}  // namespace ait
