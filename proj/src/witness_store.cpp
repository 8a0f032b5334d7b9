#include "ait/witness_store.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ait {

namespace {

constexpr char kRecords[] = "witnesses.bin";
constexpr char kIndex[] = "index.json";

class Writer {
public:
    void u8(std::uint8_t v) { out.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void bits(const BitString& b) {
        u32(static_cast<std::uint32_t>(b.size()));
        std::uint8_t acc = 0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            acc = static_cast<std::uint8_t>(acc | (b[i] << (7 - i % 8)));
            if (i % 8 == 7) {
                out.push_back(acc);
                acc = 0;
            }
        }
        if (b.size() % 8) out.push_back(acc);
    }
    void symbols(const SymbolString& s) {
        u32(s.alphabet_size());
        u32(static_cast<std::uint32_t>(s.size()));
        for (auto v : s.symbols()) u32(v);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out.insert(out.end(), s.begin(), s.end());
    }
    std::vector<std::uint8_t> out;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
    std::uint8_t u8() { need(1); return in_[pos_++]; }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    BitString bits() {
        const std::uint32_t n = u32();
        need((n + 7) / 8);
        std::vector<std::uint8_t> v(n);
        for (std::uint32_t i = 0; i < n; ++i) v[i] = (in_[pos_ + i / 8] >> (7 - i % 8)) & 1;
        pos_ += (n + 7) / 8;
        return BitString(std::move(v));
    }
    SymbolString symbols() {
        const std::uint32_t m = u32();
        const std::uint32_t n = u32();
        need(std::size_t{n} * 4);
        std::vector<std::uint32_t> v(n);
        for (auto& s : v) s = u32();
        return SymbolString(std::move(v), m);
    }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw std::runtime_error("truncated record");
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

bool better(const ComplexityEstimate& a, const ComplexityEstimate& b) {
    if (a.value_bits != b.value_bits) return a.value_bits < b.value_bits;
    return a.witness.code() < b.witness.code();
}

}  // namespace

std::string store_key(EstimateKind kind, const SymbolString& subject, const SymbolString& second,
                      const BitString& conditioning) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s:%016llx:%016llx:%016llx", std::string(to_string(kind)).c_str(),
                  static_cast<unsigned long long>(subject.hash()), static_cast<unsigned long long>(second.hash()),
                  static_cast<unsigned long long>(conditioning.hash()));
    return buf;
}

std::string store_key(const ComplexityEstimate& e) {
    return store_key(e.kind, e.subject, e.second, e.conditioning);
}

std::vector<std::uint8_t> encode_record(const ComplexityEstimate& e, std::uint64_t machine_hash) {
    Writer w;
    w.u64(machine_hash);
    w.u8(static_cast<std::uint8_t>(e.kind));
    w.symbols(e.subject);
    w.symbols(e.second);
    w.bits(e.conditioning);
    w.bits(e.witness.code());
    w.u64(e.value_bits);
    w.u64(e.witness_steps);
    w.u32(e.budget.max_program_bits);
    w.u64(e.budget.max_steps);
    w.u64(e.exhausted_below);
    w.str(e.method);
    return std::move(w.out);
}

std::optional<ComplexityEstimate> decode_record(const Machine& m, std::span<const std::uint8_t> bytes,
                                                std::uint64_t* machine_hash) {
    try {
        Reader r(bytes);
        const std::uint64_t hash = r.u64();
        if (machine_hash) *machine_hash = hash;
        ComplexityEstimate e;
        const std::uint8_t kind = r.u8();
        if (kind > 2) return std::nullopt;
        e.kind = static_cast<EstimateKind>(kind);
        e.subject = r.symbols();
        e.second = r.symbols();
        e.conditioning = r.bits();
        const BitString code = r.bits();
        e.value_bits = r.u64();
        e.witness_steps = r.u64();
        e.budget.max_program_bits = r.u32();
        e.budget.max_steps = r.u64();
        e.exhausted_below = r.u64();
        e.method = r.str();
        if (!r.done() || hash != m.version_hash()) return std::nullopt;
        auto p = m.decode(code);
        if (!p) return std::nullopt;
        e.witness = std::move(p).value();
        return e;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

WitnessStore::WitnessStore(const Machine& machine, std::filesystem::path dir)
    : machine_(machine), dir_(std::move(dir)) {}

WitnessStore::LoadReport WitnessStore::load() {
    std::lock_guard lock(mu_);
    LoadReport rep;
    entries_.clear();
    std::ifstream idx(dir_ / kIndex);
    if (!idx) return rep;
    nlohmann::json index;
    try {
        idx >> index;
    } catch (const std::exception&) {
        rep.rejected = 1;
        return rep;
    }
    if (index.value("machine_hash", std::string{}) != machine_.version_hash_hex()) {
        rep.machine_mismatch = true;
        return rep;
    }
    std::ifstream in(dir_ / kRecords, std::ios::binary);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    while (pos + 4 <= data.size()) {
        std::uint32_t len = 0;
        for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
        pos += 4;
        if (len > data.size() - pos) {
            ++rep.rejected;
            break;
        }
        auto e = decode_record(machine_, std::span(data).subspan(pos, len));
        pos += len;
        if (!e || !verify(machine_, *e)) {
            ++rep.rejected;
            continue;
        }
        auto key = store_key(*e);
        auto it = entries_.find(key);
        if (it == entries_.end() || better(*e, it->second)) entries_[key] = std::move(*e);
        ++rep.loaded;
    }
    return rep;
}

void WitnessStore::save() const {
    std::lock_guard lock(mu_);
    std::filesystem::create_directories(dir_);
    std::vector<std::uint8_t> data;
    auto index = nlohmann::json::object();
    index["format"] = "ait-witness-store-1";
    index["isa"] = std::string(Machine::kIsaVersion);
    index["machine_hash"] = machine_.version_hash_hex();
    auto list = nlohmann::json::array();
    for (const auto& [key, e] : entries_) {
        const auto rec = encode_record(e, machine_.version_hash());
        list.push_back({{"key", key},
                        {"offset", data.size()},
                        {"length", rec.size()},
                        {"value_bits", e.value_bits},
                        {"witness", e.witness.code().to_string()}});
        const auto len = static_cast<std::uint32_t>(rec.size());
        for (int i = 0; i < 4; ++i) data.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
        data.insert(data.end(), rec.begin(), rec.end());
    }
    index["records"] = list;

    const auto tmp_bin = dir_ / (std::string(kRecords) + ".tmp");
    const auto tmp_idx = dir_ / (std::string(kIndex) + ".tmp");
    {
        std::ofstream out(tmp_bin, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        if (!out) throw std::runtime_error("cannot write " + tmp_bin.string());
    }
    {
        std::ofstream out(tmp_idx, std::ios::trunc);
        out << index.dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write " + tmp_idx.string());
    }
    std::filesystem::rename(tmp_bin, dir_ / kRecords);
    std::filesystem::rename(tmp_idx, dir_ / kIndex);
}

std::optional<ComplexityEstimate> WitnessStore::lookup(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        ++misses_;
        return std::nullopt;
    }
    ++hits_;
    return it->second;
}

bool WitnessStore::improve(const ComplexityEstimate& e) {
    if (!verify(machine_, e)) return false;
    std::lock_guard lock(mu_);
    const auto key = store_key(e);
    auto it = entries_.find(key);
    if (it != entries_.end() && !better(e, it->second)) return false;
    entries_[key] = e;
    return true;
}

std::vector<ComplexityEstimate> WitnessStore::snapshot() const {
    std::lock_guard lock(mu_);
    std::vector<ComplexityEstimate> out;
    for (const auto& [k, e] : entries_) out.push_back(e);
    return out;
}

std::size_t WitnessStore::gc() {
    std::lock_guard lock(mu_);
    std::size_t removed = 0;
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (verify(machine_, it->second)) {
            ++it;
        } else {
            it = entries_.erase(it);
            ++removed;
        }
    }
    return removed;
}

}  // namespace ait
