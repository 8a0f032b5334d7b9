#include "ait/rational.hpp"

#include <stdexcept>

namespace ait {

Rational dyadic(std::uint64_t q) {
    BigInt den = 1;
    den <<= static_cast<unsigned>(q);
    return Rational(BigInt(1), den);
}

std::string to_fraction_string(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::string to_dyadic_string(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    unsigned q = 0;
    while (den > 1) {
        if ((den & 1) != 0) throw std::invalid_argument("not a dyadic rational: " + to_fraction_string(r));
        den >>= 1;
        ++q;
    }
    return num.str() + "/2^" + std::to_string(q);
}

Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty rational");
    try {
        if (auto slash = s.find('/'); slash != std::string::npos) {
            BigInt num(s.substr(0, slash));
            BigInt den(s.substr(slash + 1));
            if (den == 0) throw std::invalid_argument("zero denominator");
            return Rational(num, den);
        }
        if (auto dot = s.find('.'); dot != std::string::npos) {
            const std::string whole = s.substr(0, dot);
            const std::string frac = s.substr(dot + 1);
            const bool neg = !whole.empty() && whole[0] == '-';
            BigInt scale = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
            BigInt w(whole.empty() || whole == "-" ? std::string("0") : whole);
            BigInt f(frac.empty() ? std::string("0") : frac);
            Rational r(w);
            Rational part(f, scale);
            return neg ? Rational(r - part) : Rational(r + part);
        }
        return Rational(BigInt(s));
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed rational: " + s);
    }
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::int64_t floor_log2(const Rational& r) {
    if (r <= 0) throw std::invalid_argument("log2 of a non-positive value");
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    std::int64_t k = static_cast<std::int64_t>(boost::multiprecision::msb(num)) -
                     static_cast<std::int64_t>(boost::multiprecision::msb(den));
    // Adjust so that 2^k <= r < 2^(k+1).
    auto pow2 = [](std::int64_t e) {
        BigInt one = 1;
        return e >= 0 ? Rational(one << static_cast<unsigned>(e)) : Rational(BigInt(1), one << static_cast<unsigned>(-e));
    };
    while (pow2(k) > r) --k;
    while (pow2(k + 1) <= r) ++k;
    return k;
}

std::int64_t ceil_log2(const Rational& r) {
    const std::int64_t k = floor_log2(r);
    BigInt one = 1;
    const Rational p = k >= 0 ? Rational(one << static_cast<unsigned>(k))
                              : Rational(BigInt(1), one << static_cast<unsigned>(-k));
    return p == r ? k : k + 1;
}

}  // namespace ait
