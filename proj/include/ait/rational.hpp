#pragma once

// Exact arithmetic for weights, probabilities and Kraft sums.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <string_view>

namespace ait {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// 2^-q.
Rational dyadic(std::uint64_t q);
// "a/b" in lowest terms ("a" when b = 1).
std::string to_fraction_string(const Rational& r);
// "p/2^q" for a dyadic rational, with q minimal; throws if r is not dyadic.
std::string to_dyadic_string(const Rational& r);
// Accepts "a/b", an integer, or a finite decimal such as "0.75".
Rational parse_rational(std::string_view text);
double to_double(const Rational& r);

// floor(log2 r) and ceil(log2 r) for r > 0.
std::int64_t floor_log2(const Rational& r);
std::int64_t ceil_log2(const Rational& r);

}  // namespace ait
