#include <cmath>
#include <set>

#include "ait/machine.hpp"
#include "ait/program_space.hpp"
#include "doctest.h"

using namespace ait;

namespace {

BitString bits_of_index(std::uint64_t v, unsigned n) { return BitString::from_uint(v, n); }

}  // namespace

TEST_CASE("opcode table is a complete prefix code") {
    double kraft = 0;
    std::set<std::string_view> codes;
    for (const auto& op : opcode_table()) {
        kraft += std::ldexp(1.0, -static_cast<int>(op.code.size()));
        for (auto other : codes) {
            CHECK_FALSE(op.code.substr(0, other.size()) == other);
            CHECK_FALSE(other.substr(0, op.code.size()) == op.code);
        }
        codes.insert(op.code);
    }
    CHECK(kraft == doctest::Approx(1.0));
}

TEST_CASE("gamma code") {
    CHECK(code::gamma(1).to_string() == "0b1");
    CHECK(code::gamma(2).to_string() == "0b010");
    CHECK(code::gamma(5).to_string() == "0b00101");
    for (std::uint64_t n = 1; n < 300; ++n) CHECK(code::gamma(n).size() == gamma_length(n));
}

TEST_CASE("fixed programs") {
    Machine m;
    CHECK(m.halt_program().size() == 1);
    CHECK(m.copy_aux_program().size() == 7);
    CHECK(m.exec_aux_program().size() == 8);
    CHECK(m.constants().c_pair == 10);
    CHECK(m.constants().c_lit == 6);

    const auto alt = m.decode_or_throw(code::block({code::repeat(16, code::block({code::sym(0, 1), code::sym(1, 1)}))}));
    CHECK(alt.size() == 20);
    CHECK(alt.disassemble() == "REPEAT 16 { SYM 0 SYM 1 } HALT");
    auto out = m.run(alt, {}, 1000);
    REQUIRE(out.status == RunStatus::Halted);
    CHECK(*out.output(2) == alternating(32));
    CHECK(m.produces(alt, {}, m.tape_of(alternating(32)), 1000));
    CHECK_FALSE(m.produces(alt, {}, m.tape_of(alternating(31)), 1000));
}

TEST_CASE("literal program reproduces x and respects the length bound") {
    Machine m;
    for (std::size_t n = 0; n < 40; ++n) {
        SymbolString x = alternating(n, 1);
        auto p = m.literal_program(x);
        CHECK(p.size() <= n + 2 * ceil_log2(n + 1) + m.constants().c_lit);
        auto out = m.run(p, {}, 1000);
        REQUIRE(out.status == RunStatus::Halted);
        CHECK(*out.output(2) == x);
    }
}

TEST_CASE("decode rejects truncation, overrun and the reserved opcode") {
    Machine m;
    CHECK(m.decode(BitString::parse("10")).error().kind == DecodeErrorKind::Truncated);
    CHECK(m.decode(BitString::parse("00")).error().kind == DecodeErrorKind::Overrun);
    CHECK(m.decode(BitString::parse("11111111111111")).error().kind == DecodeErrorKind::BadOpcode);
    CHECK(m.decode(BitString{}).error().kind == DecodeErrorKind::Truncated);
}

TEST_CASE("grammar walk agrees with brute-force decoding") {
    Machine m;
    for (unsigned n = 1; n <= 16; ++n) {
        std::vector<BitString> brute;
        for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
            auto b = bits_of_index(v, n);
            if (m.decode(b)) brute.push_back(b);
        }
        std::vector<BitString> walked;
        for_each_program(1, n, [&](const std::vector<std::uint8_t>& bits) {
            walked.emplace_back(bits);
            return true;
        });
        CHECK(walked == brute);
        CHECK(count_programs(1, n) == brute.size());
        std::uint64_t from_prefixes = 0;
        for (const auto& pre : program_prefixes(1, n, 5)) {
            for_each_program(1, n, [&](const std::vector<std::uint8_t>&) { return ++from_prefixes, true; }, pre);
        }
        CHECK(from_prefixes == brute.size());
    }
}

TEST_CASE("encode inverts decode") {
    Machine m;
    for_each_program(1, 14, [&](const std::vector<std::uint8_t>& bits) {
        auto p = m.decode_or_throw(BitString(bits));
        CHECK(m.encode(p) == p.code());
        return true;
    });
}

TEST_CASE("loops, reads and aux") {
    Machine m;
    auto loop = m.decode_or_throw(code::block({code::loop(code::block({}))}));
    CHECK(loop.size() == 11);
    CHECK(m.run(loop, {}, 1000).status == RunStatus::OutOfBudget);

    auto copy = m.copy_aux_program();
    auto out = m.run(copy, BitString::parse("0110"), 100);
    CHECK(*out.output(2) == SymbolString::parse("0110"));
    CHECK(out.aux_bits_read == 4);

    // LOOP { READ { SYM 1 } { SYM 0 } } complements the aux tape.
    auto neg = m.decode_or_throw(code::block({code::loop(code::block(
        {code::read(code::block({code::sym(1, 1)}), code::block({code::sym(0, 1)}))}))}));
    CHECK(*m.run(neg, BitString::parse("0010"), 100).output(2) == SymbolString::parse("1101"));

    // EXECAUX runs a program supplied on the aux tape.
    auto lit = m.literal_program(SymbolString::parse("101"));
    auto exec = m.run(m.exec_aux_program(), lit.code(), 100);
    CHECK(*exec.output(2) == SymbolString::parse("101"));
    CHECK(m.run(m.exec_aux_program(), BitString::parse("10"), 100).status == RunStatus::DecodeError);
}

TEST_CASE("compose and chain") {
    Machine m;
    auto p = m.literal_program(SymbolString::parse("0010"));
    auto q = m.decode_or_throw(code::block({code::loop(code::block(
        {code::read(code::block({code::sym(1, 1)}), code::block({code::sym(0, 1)}))}))}));
    auto c = m.compose(p, q);
    CHECK(c.size() == p.size() + q.size() + m.constants().c_pair);
    CHECK(*m.run(c, {}, 1000).output(2) == SymbolString::parse("1101"));

    auto ch = m.chain(m.literal_program(SymbolString::parse("11")), m.copy_aux_program());
    auto out = m.run(ch, {}, 1000);
    REQUIRE(out.status == RunStatus::Halted);
    auto parts = m.split_tape(out.tape);
    REQUIRE(parts);
    REQUIRE(parts->size() == 2);
    CHECK((*parts)[0] == SymbolString::parse("11"));
    CHECK((*parts)[1] == SymbolString::from_bits(m.literal_program(SymbolString::parse("11")).code()));
}

TEST_CASE("search finds the first program of a given length") {
    Machine m;
    // Target "0": the shortest program is SYM 0 HALT (4 bits).
    auto s = m.decode_or_throw(code::block({code::search(4)}));
    auto out = m.run(s, BitString::parse("0"), 10000);
    REQUIRE(out.status == RunStatus::Halted);
    CHECK(*out.output(2) == SymbolString::parse("1000"));
    // Nothing of 2 bits outputs "0", and every 2-bit program halts.
    auto none = m.decode_or_throw(code::block({code::search(2)}));
    CHECK(m.run(none, BitString::parse("0"), 10000).status == RunStatus::OutOfBudget);
}

TEST_CASE("enum lists codewords") {
    Machine m;
    auto e = m.decode_or_throw(code::block({code::enum_codes(2, code::block({code::copy_aux()}))}));
    auto out = m.run(e, {}, 1000);
    REQUIRE(out.status == RunStatus::Halted);
    auto parts = m.split_tape(out.tape);
    REQUIRE(parts);
    REQUIRE(parts->size() == 5);
    CHECK((*parts)[0] == SymbolString::parse("00"));
    CHECK((*parts)[3] == SymbolString::parse("11"));
    CHECK((*parts)[4].empty());
}

TEST_CASE("nesting limit ends runaway EXECAUX") {
    Machine m;
    BitString aux;
    for (int i = 0; i < 80; ++i) aux.append(code::block({code::exec_aux()}));
    aux.append(code::end());
    CHECK(m.run(m.exec_aux_program(), aux, 1'000'000).status == RunStatus::OutOfBudget);
}

TEST_CASE("larger alphabets") {
    Machine m(3);
    CHECK(m.symbol_width() == 2);
    auto x = SymbolString::parse("0212", 3);
    auto out = m.run(m.literal_program(x), {}, 100);
    CHECK(*out.output(3) == x);
    CHECK(Machine(3).version_hash() != Machine(2).version_hash());
}
