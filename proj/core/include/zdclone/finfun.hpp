#ifndef ZDCLONE_FINFUN_HPP
#define ZDCLONE_FINFUN_HPP

// Finitary functions f : N^k -> N as immutable values.
//
// A FinFun is one of:
//   * an arithmetic expression over variables x1..xk (x, y, z are aliases
//     for x1, x2, x3) with exact total semantics: '-' is truncated
//     subtraction, x/0 == 0 and x%0 == x;
//   * a finite table of tuple -> value entries plus a default value;
//   * a named built-in ("sqrt-indicator": x -> sqrt(x) on perfect squares,
//     0 elsewhere);
//   * a composition  outer(inner_1(xs), ..., inner_m(xs));
//   * a host function: an arbitrary C++ callable with a display label.
//
// Every kind except host round-trips through the text form:
//
//   finfun  := [ arity "|" ] body
//   body    := expr | table | named | compose
//   expr    := term (("+" | "-") term)*
//   term    := factor (("*" | "/" | "%") factor)*
//   factor  := number | variable | "(" expr ")"
//            | ("min" | "max" | "eq") "(" expr "," expr ")"
//   table   := "table" "(" arity ")" "{" entry (";" entry)* "}"
//   entry   := "(" number ("," number)* ")" "->" number
//            | "default" "->" number
//   compose := "compose" "(" finfun (";" finfun)+ ")"
//
// The optional "k|" prefix declares the arity; without it the arity of an
// expression is one past the highest variable mentioned (so "x+y" has
// arity 2, and "7" has arity 1).  eq(a,b) is 1 when a == b and 0 otherwise.

#include <zdclone/nat.hpp>

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace zdclone {

class FinFun {
 public:
  using HostFn = std::function<Nat(const std::vector<Nat>&)>;

  // The unary constant 0 -- a benign placeholder so that result structs
  // holding functions can be default-constructed before being filled in.
  FinFun();

  // Parses the text grammar above.  Throws std::invalid_argument with a
  // position-annotated message on malformed input.
  static FinFun parse(const std::string& text);

  static FinFun constant(std::size_t arity, Nat value);
  static FinFun projection(std::size_t arity, std::size_t index);
  static FinFun from_table(std::size_t arity, std::map<std::vector<Nat>, Nat> entries,
                           Nat default_value);
  static FinFun sqrt_indicator();
  static FinFun compose(FinFun outer, std::vector<FinFun> inners);
  static FinFun host(std::size_t arity, HostFn fn, std::string label);

  std::size_t arity() const;

  Nat operator()(const std::vector<Nat>& args) const;
  Nat operator()(const Nat& x) const;
  Nat operator()(const Nat& x, const Nat& y) const;

  // Canonical text form.  parse(to_text()) reproduces the function for all
  // kinds except host, which prints as "host:<label>/<arity>" and is
  // deliberately not parseable.
  std::string to_text() const;

  bool is_host() const;

 private:
  struct Impl;
  friend class FinFunAccess;  // internal factory used by the parser
  explicit FinFun(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// Result of comparing two functions pointwise on the box [0, horizon)^k.
struct PrefixComparison {
  bool equal = true;
  std::vector<Nat> first_difference;  // lexicographically least disagreeing tuple
  Nat lhs_value;                      // values at that tuple (valid when !equal)
  Nat rhs_value;
};

// Compares f and g (which must share an arity) on every tuple of the box
// [0, horizon)^k in lexicographic order and reports the first disagreement.
PrefixComparison prefix_equal(const FinFun& f, const FinFun& g, const Nat& horizon);

}  // namespace zdclone

#endif  // ZDCLONE_FINFUN_HPP
