#pragma once

// Persistent best-known estimates, keyed by (kind, subject, conditioning).
// Records live in a length-prefixed binary file with a JSON index next to
// it. A store written for another machine is ignored on load.

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ait/enumerator.hpp"

namespace ait {

std::string store_key(const ComplexityEstimate& e);
std::string store_key(EstimateKind kind, const SymbolString& subject, const SymbolString& second,
                      const BitString& conditioning);

class WitnessStore {
public:
    // Opens (or creates on first save) the store rooted at `dir`.
    WitnessStore(const Machine& machine, std::filesystem::path dir);

    struct LoadReport {
        std::size_t loaded = 0;
        std::size_t rejected = 0;  // failed replay or malformed
        bool machine_mismatch = false;
    };
    LoadReport load();
    void save() const;

    std::optional<ComplexityEstimate> lookup(const std::string& key) const;
    // Stores `e` if it replays and beats the current entry (strictly shorter,
    // or equal length with a shortlex-smaller witness). Returns true if kept.
    bool improve(const ComplexityEstimate& e);
    std::vector<ComplexityEstimate> snapshot() const;
    // Drops entries that no longer replay. Returns the number removed.
    std::size_t gc();

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }
    const std::filesystem::path& directory() const { return dir_; }

private:
    const Machine& machine_;
    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::map<std::string, ComplexityEstimate> entries_;
    mutable std::size_t hits_ = 0;
    mutable std::size_t misses_ = 0;
};

// Binary record codec, exposed for tests.
std::vector<std::uint8_t> encode_record(const ComplexityEstimate& e, std::uint64_t machine_hash);
std::optional<ComplexityEstimate> decode_record(const Machine& m, std::span<const std::uint8_t> bytes,
                                                std::uint64_t* machine_hash = nullptr);

}  // namespace ait
