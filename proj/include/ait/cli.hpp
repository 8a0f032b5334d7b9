#pragma once

// Command-line front end. `run` is the whole program minus process setup, so
// tests can drive it in-process.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ait/bits.hpp"
#include "json.hpp"

namespace ait::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInternal = 3 };

inline constexpr const char* kStoreEnv = "AIT_STORE";
inline constexpr const char* kDefaultStore = ".ait-store";

enum class Encoding { Binary, Hex, Raw };
enum class Format { Json, Csv, Human };

struct RunConfig {
    unsigned budget_bits = 24;
    std::uint64_t budget_steps = 100000;
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    unsigned alphabet = 2;
    Encoding encoding = Encoding::Binary;
    Format format = Format::Json;
    std::optional<std::string> store;  // nullopt when disabled

    nlohmann::json to_json() const;
};

// Input text to symbols. "0b…" is binary text, "hex:<digits>[:<bits>]" is
// hex and "raw:<path>" reads a file's bytes; otherwise `enc` decides. Bits are
// read most-significant first and grouped per symbol for m > 2.
SymbolString parse_input(const std::string& text, unsigned m, Encoding enc);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Drops the wall-time field so two reports can be compared byte for byte.
std::string payload_without_wall_time(const std::string& json_report);

}  // namespace ait::cli
