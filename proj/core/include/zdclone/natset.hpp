#ifndef ZDCLONE_NATSET_HPP
#define ZDCLONE_NATSET_HPP

// Subsets of N with exact membership and exact prefix counting.
//
// A NatSet answers three questions, all exactly:
//   contains(x)        -- is x in the set?
//   next_element(x)    -- the least element >= x, if any;
//   prefix_count(n)    -- |S intersect [0, n)|.
//
// The text grammar:
//
//   set      := "empty" | "all" | "evens" | "squares"
//             | "multiples:" m            (positive multiples step m: 0, m, 2m, ...)
//             | "powers:" b               (b^0, b^1, b^2, ... with b >= 2)
//             | "interval:" a ":" b       (the half-open interval [a, b))
//             | "intervals:" "{" a ":" b ("," a ":" b)* "}"
//                                         (a union of half-open intervals,
//                                          normalised: sorted, merged, no
//                                          empty pieces)
//             | "{" n ("," n)* "}" | "{}" (an explicit finite set)
//             | "cofinite:" "{" ... "}"   (complement of a finite set)
//             | "union(" set ";" set ")"
//             | "inter(" set ";" set ")"
//             | "pred:" bound ":" expr    (x < bound with expr(x) != 0)
//
// A pred set is the finite truncation {x < bound : expr(x) != 0}; the bound
// is part of the definition, so probes beyond it simply see no elements.
// The primitive families and intervals count by closed form, so
// prefix_count(2^36) on "squares" is instantaneous.  Unions,
// intersections and pred sets count by walking their elements; long walks
// are memoised through internal checkpoints, and any single call that would
// need more than the enumeration budget (default 1 << 25 steps) throws
// EnumerationBudgetError instead of silently grinding.

#include <zdclone/finfun.hpp>
#include <zdclone/nat.hpp>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace zdclone {

class EnumerationBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NatSet {
 public:
  // The empty set -- a benign placeholder so that result structs holding
  // sets can be default-constructed before being filled in.
  NatSet();

  static NatSet parse(const std::string& text);

  static NatSet empty();
  static NatSet all();
  static NatSet evens();
  static NatSet squares();
  static NatSet multiples(const Nat& step);
  static NatSet powers(const Nat& base);
  static NatSet interval(const Nat& lo, const Nat& hi);  // [lo, hi)
  // Union of half-open intervals [lo, hi); overlapping and adjacent pieces
  // are merged, empty ones dropped.  All queries are closed-form.
  static NatSet intervals(std::vector<std::pair<Nat, Nat>> pieces);
  static NatSet finite(std::vector<Nat> elements);
  static NatSet cofinite(std::vector<Nat> excluded);
  static NatSet set_union(NatSet a, NatSet b);
  static NatSet set_intersection(NatSet a, NatSet b);
  static NatSet predicate(const Nat& bound, FinFun expr);  // expr must be unary

  bool contains(const Nat& x) const;
  std::optional<Nat> next_element(const Nat& from) const;  // least element >= from
  Nat prefix_count(const Nat& n) const;                    // |S intersect [0, n)|

  // All elements in [0, hi), ascending.  Subject to the enumeration budget.
  std::vector<Nat> elements_below(const Nat& hi) const;

  std::string to_text() const;

  // Caps the element walk of a single counting / enumeration call.
  static void set_enumeration_budget(std::uint64_t steps);

  struct Impl;  // defined in natset.cpp; incomplete everywhere else

 private:
  explicit NatSet(std::shared_ptr<Impl> impl);
  std::shared_ptr<Impl> impl_;
};

}  // namespace zdclone

#endif  // ZDCLONE_NATSET_HPP
