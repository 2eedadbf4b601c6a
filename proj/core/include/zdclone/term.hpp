#ifndef ZDCLONE_TERM_HPP
#define ZDCLONE_TERM_HPP

// Terms built from finitary functions and variables.
//
// A Term of arity k is either a variable x_i (i < k) or the application of
// a FinFun to subterms of the same arity.  Terms are how composed witnesses
// are assembled and reported: unlike FinFun::compose, a Term remembers the
// applied symbols by name, so it can be printed as a readable tree such as
//
//   t(r1(u(x1)), r2(u(x1)))
//
// and flattened into a single FinFun for pointwise comparison.

#include <zdclone/finfun.hpp>
#include <zdclone/nat.hpp>

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace zdclone {

class Term {
 public:
  // The variable x_{index} of a term of the given arity.
  static Term variable(std::size_t arity, std::size_t index);

  // Application of f (whose arity must equal args.size()) to subterms,
  // displayed with the given symbol name.  All subterms must share an arity.
  static Term apply(std::string symbol, FinFun f, std::vector<Term> args);

  std::size_t arity() const;

  Nat evaluate(const std::vector<Nat>& xs) const;

  // Flattens the tree into a host FinFun labelled with to_text().
  FinFun to_finfun() const;

  // Symbolic form, e.g. "h(f(x1), g(x1, x2))".
  std::string to_text() const;

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

}  // namespace zdclone

#endif  // ZDCLONE_TERM_HPP
