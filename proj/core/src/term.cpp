#include <zdclone/term.hpp>

#include <sstream>
#include <stdexcept>
#include <utility>

namespace zdclone {

struct Term::Node {
  bool is_variable = true;
  std::size_t arity = 1;
  std::size_t index = 0;  // variable

  std::string symbol;  // application
  std::optional<FinFun> fn;
  std::vector<Term> args;
};

Term::Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Term Term::variable(std::size_t arity, std::size_t index) {
  if (index >= arity) throw std::invalid_argument("Term::variable: index out of range");
  auto n = std::make_shared<Node>();
  n->is_variable = true;
  n->arity = arity;
  n->index = index;
  return Term(std::move(n));
}

Term Term::apply(std::string symbol, FinFun f, std::vector<Term> args) {
  if (f.arity() != args.size())
    throw std::invalid_argument("Term::apply: function arity does not match argument count");
  std::size_t arity = args.front().arity();
  for (const Term& t : args) {
    if (t.arity() != arity)
      throw std::invalid_argument("Term::apply: subterms disagree on arity");
  }
  auto n = std::make_shared<Node>();
  n->is_variable = false;
  n->arity = arity;
  n->symbol = std::move(symbol);
  n->fn = std::move(f);
  n->args = std::move(args);
  return Term(std::move(n));
}

std::size_t Term::arity() const { return node_->arity; }

Nat Term::evaluate(const std::vector<Nat>& xs) const {
  const Node& n = *node_;
  if (xs.size() != n.arity)
    throw std::invalid_argument("Term::evaluate: wrong number of arguments");
  if (n.is_variable) return xs[n.index];
  std::vector<Nat> mid;
  mid.reserve(n.args.size());
  for (const Term& t : n.args) mid.push_back(t.evaluate(xs));
  return (*n.fn)(mid);
}

std::string Term::to_text() const {
  const Node& n = *node_;
  if (n.is_variable) return "x" + std::to_string(n.index + 1);
  std::ostringstream out;
  out << n.symbol << '(';
  for (std::size_t i = 0; i < n.args.size(); ++i) {
    if (i > 0) out << ", ";
    out << n.args[i].to_text();
  }
  out << ')';
  return out.str();
}

FinFun Term::to_finfun() const {
  Term self = *this;
  return FinFun::host(
      arity(), [self](const std::vector<Nat>& xs) { return self.evaluate(xs); }, to_text());
}

}  // namespace zdclone
