#ifndef ZDCLONE_NAT_HPP
#define ZDCLONE_NAT_HPP

// Exact arithmetic used throughout the library.
//
// Every quantity that a verification touches -- set elements, counts,
// horizons, block densities -- is either an arbitrary-precision natural
// number or an exact rational.  No verdict anywhere depends on floating
// point.  Nat is signed under the hood (cpp_int) but the library maintains
// the invariant that values are never negative; subtraction of naturals is
// only ever performed through monus().

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace zdclone {

using Nat = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline const char* version() { return "0.1.0"; }

// Truncated subtraction on N: a - b if a >= b, else 0.
inline Nat monus(const Nat& a, const Nat& b) { return a >= b ? Nat(a - b) : Nat(0); }

// Floor division with the total convention a / 0 == 0.
inline Nat floor_div(const Nat& a, const Nat& b) { return b == 0 ? Nat(0) : Nat(a / b); }

// Remainder with the total convention a mod 0 == a (so a == q*b + r always).
inline Nat mod_nat(const Nat& a, const Nat& b) { return b == 0 ? a : Nat(a % b); }

inline Nat ceil_div(const Nat& a, const Nat& b) {
  if (b == 0) throw std::invalid_argument("ceil_div: zero divisor");
  return (a + b - 1) / b;
}

inline Nat pow2(const Nat& k) {
  if (k < 0 || k > 100000000) throw std::invalid_argument("pow2: exponent out of range");
  return Nat(1) << static_cast<unsigned>(k);
}

// Largest s with s*s <= n.
inline Nat isqrt(const Nat& n) {
  if (n < 0) throw std::invalid_argument("isqrt: negative argument");
  return boost::multiprecision::sqrt(n);
}

inline bool is_square(const Nat& n) {
  if (n < 0) return false;
  Nat s = isqrt(n);
  return s * s == n;
}

// b^e by repeated squaring (exact).
inline Nat ipow(Nat b, Nat e) {
  Nat r = 1;
  while (e > 0) {
    if ((e & 1) != 0) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// --- pairing ---------------------------------------------------------------
//
// The standard diagonal pairing bijection N^2 -> N and its inverse, plus the
// iterated k-tupling N -> N^k built by peeling one coordinate at a time:
//   tuple_1(m) = (m)
//   tuple_k(m) = (x, tuple_{k-1}(rest))  where (x, rest) = unpair(m).
// Both directions are exact and monotone in every coordinate, which is what
// the box-coverage computations rely on.

inline Nat pair_nat(const Nat& x, const Nat& y) {
  Nat s = x + y;
  return s * (s + 1) / 2 + y;
}

inline std::pair<Nat, Nat> unpair_nat(const Nat& m) {
  // s = floor((sqrt(8m+1) - 1) / 2) is the diagonal index.
  Nat s = (isqrt(8 * m + 1) - 1) / 2;
  Nat y = m - s * (s + 1) / 2;
  return {s - y, y};
}

inline std::vector<Nat> tuple_of_index(Nat m, std::size_t k) {
  if (k == 0) throw std::invalid_argument("tuple_of_index: k must be positive");
  std::vector<Nat> out;
  out.reserve(k);
  while (k > 1) {
    auto [x, rest] = unpair_nat(m);
    out.push_back(x);
    m = std::move(rest);
    --k;
  }
  out.push_back(m);
  return out;
}

inline Nat index_of_tuple(const std::vector<Nat>& t) {
  if (t.empty()) throw std::invalid_argument("index_of_tuple: empty tuple");
  Nat m = t.back();
  for (std::size_t i = t.size() - 1; i-- > 0;) m = pair_nat(t[i], m);
  return m;
}

// Parse a non-negative decimal integer; throws on anything else.
Nat parse_nat(const std::string& text);

// Parse "p/q" or a plain integer as an exact rational; q must be positive.
Rat parse_rat(const std::string& text);

inline std::string to_string(const Nat& n) { return n.str(); }

// Canonical "p/q" form ("p" alone when q == 1).
inline std::string to_string(const Rat& q) {
  Nat num = boost::multiprecision::numerator(q);
  Nat den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace zdclone

#endif  // ZDCLONE_NAT_HPP
