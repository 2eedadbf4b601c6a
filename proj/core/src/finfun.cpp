#include <zdclone/finfun.hpp>

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <utility>

namespace zdclone {

namespace {

// --- expression trees --------------------------------------------------------

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Op { constant, variable, add, sub, mul, div, mod, minimum, maximum, equals };
  Op op = Op::constant;
  Nat value;              // constant
  std::size_t index = 0;  // variable
  ExprPtr lhs;
  ExprPtr rhs;
};

ExprPtr make_const(Nat v) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprNode::Op::constant;
  n->value = std::move(v);
  return n;
}

ExprPtr make_var(std::size_t i) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprNode::Op::variable;
  n->index = i;
  return n;
}

ExprPtr make_binary(ExprNode::Op op, ExprPtr a, ExprPtr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

Nat eval_expr(const ExprNode& e, const std::vector<Nat>& xs) {
  using Op = ExprNode::Op;
  switch (e.op) {
    case Op::constant: return e.value;
    case Op::variable: return xs[e.index];
    default: break;
  }
  Nat a = eval_expr(*e.lhs, xs);
  Nat b = eval_expr(*e.rhs, xs);
  switch (e.op) {
    case Op::add: return a + b;
    case Op::sub: return monus(a, b);
    case Op::mul: return a * b;
    case Op::div: return floor_div(a, b);
    case Op::mod: return mod_nat(a, b);
    case Op::minimum: return a <= b ? a : b;
    case Op::maximum: return a >= b ? a : b;
    case Op::equals: return a == b ? Nat(1) : Nat(0);
    default: throw std::logic_error("eval_expr: bad op");
  }
}

std::size_t inferred_arity(const ExprNode& e) {
  using Op = ExprNode::Op;
  switch (e.op) {
    case Op::constant: return 1;
    case Op::variable: return e.index + 1;
    default: return std::max(inferred_arity(*e.lhs), inferred_arity(*e.rhs));
  }
}

// Precedence levels: additive 1, multiplicative 2, atoms/calls 3.
int precedence(ExprNode::Op op) {
  using Op = ExprNode::Op;
  switch (op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div:
    case Op::mod: return 2;
    default: return 3;
  }
}

void print_expr(const ExprNode& e, std::ostream& out, int parent_level, bool right_operand) {
  using Op = ExprNode::Op;
  switch (e.op) {
    case Op::constant: out << e.value.str(); return;
    case Op::variable: out << 'x' << (e.index + 1); return;
    case Op::minimum:
    case Op::maximum:
    case Op::equals: {
      out << (e.op == Op::minimum ? "min" : e.op == Op::maximum ? "max" : "eq") << '(';
      print_expr(*e.lhs, out, 0, false);
      out << ", ";
      print_expr(*e.rhs, out, 0, false);
      out << ')';
      return;
    }
    default: break;
  }
  int level = precedence(e.op);
  // Operators are left associative, so a right operand at the same level
  // needs parentheses (a - (b - c)) while a left one does not.
  bool parens = level < parent_level || (level == parent_level && right_operand);
  if (parens) out << '(';
  const char* symbol = e.op == Op::add   ? " + "
                       : e.op == Op::sub ? " - "
                       : e.op == Op::mul ? " * "
                       : e.op == Op::div ? " / "
                                         : " % ";
  print_expr(*e.lhs, out, level, false);
  out << symbol;
  print_expr(*e.rhs, out, level, true);
  if (parens) out << ')';
}

}  // namespace

// --- the carrier ----------------------------------------------------------------

struct FinFun::Impl {
  enum class Kind { expression, table, sqrt_indicator, composition, host };
  Kind kind = Kind::expression;
  std::size_t arity = 1;

  ExprPtr expr;  // expression

  std::map<std::vector<Nat>, Nat> table;  // table
  Nat table_default;

  FinFun::HostFn fn;  // host
  std::string label;

  std::optional<FinFun> outer;  // composition
  std::vector<FinFun> inners;
};

FinFun::FinFun(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

FinFun::FinFun() : FinFun(FinFun::constant(1, Nat(0))) {}

std::size_t FinFun::arity() const { return impl_->arity; }

bool FinFun::is_host() const { return impl_->kind == Impl::Kind::host; }

Nat FinFun::operator()(const std::vector<Nat>& args) const {
  const Impl& im = *impl_;
  if (args.size() != im.arity)
    throw std::invalid_argument("FinFun: expected " + std::to_string(im.arity) +
                                " arguments, got " + std::to_string(args.size()));
  switch (im.kind) {
    case Impl::Kind::expression: return eval_expr(*im.expr, args);
    case Impl::Kind::table: {
      auto it = im.table.find(args);
      return it == im.table.end() ? im.table_default : it->second;
    }
    case Impl::Kind::sqrt_indicator: {
      const Nat& x = args[0];
      Nat s = isqrt(x);
      return s * s == x ? s : Nat(0);
    }
    case Impl::Kind::composition: {
      std::vector<Nat> mid;
      mid.reserve(im.inners.size());
      for (const FinFun& g : im.inners) mid.push_back(g(args));
      return (*im.outer)(mid);
    }
    case Impl::Kind::host: return im.fn(args);
  }
  throw std::logic_error("FinFun: bad kind");
}

Nat FinFun::operator()(const Nat& x) const { return (*this)(std::vector<Nat>{x}); }

Nat FinFun::operator()(const Nat& x, const Nat& y) const {
  return (*this)(std::vector<Nat>{x, y});
}

FinFun FinFun::constant(std::size_t arity, Nat value) {
  if (arity == 0) throw std::invalid_argument("FinFun::constant: arity must be positive");
  auto im = std::make_shared<Impl>();
  im->kind = Impl::Kind::expression;
  im->arity = arity;
  im->expr = make_const(std::move(value));
  return FinFun(im);
}

FinFun FinFun::projection(std::size_t arity, std::size_t index) {
  if (index >= arity) throw std::invalid_argument("FinFun::projection: index out of range");
  auto im = std::make_shared<Impl>();
  im->kind = Impl::Kind::expression;
  im->arity = arity;
  im->expr = make_var(index);
  return FinFun(im);
}

FinFun FinFun::from_table(std::size_t arity, std::map<std::vector<Nat>, Nat> entries,
                          Nat default_value) {
  if (arity == 0) throw std::invalid_argument("FinFun::from_table: arity must be positive");
  for (const auto& [key, unused] : entries) {
    if (key.size() != arity)
      throw std::invalid_argument("FinFun::from_table: tuple arity mismatch");
  }
  auto im = std::make_shared<Impl>();
  im->kind = Impl::Kind::table;
  im->arity = arity;
  im->table = std::move(entries);
  im->table_default = std::move(default_value);
  return FinFun(im);
}

FinFun FinFun::sqrt_indicator() {
  auto im = std::make_shared<Impl>();
  im->kind = Impl::Kind::sqrt_indicator;
  im->arity = 1;
  return FinFun(im);
}

FinFun FinFun::compose(FinFun outer, std::vector<FinFun> inners) {
  if (outer.arity() != inners.size())
    throw std::invalid_argument("FinFun::compose: outer arity != number of inner functions");
  if (inners.empty()) throw std::invalid_argument("FinFun::compose: no inner functions");
  std::size_t k = inners.front().arity();
  for (const FinFun& g : inners) {
    if (g.arity() != k)
      throw std::invalid_argument("FinFun::compose: inner functions disagree on arity");
  }
  auto im = std::make_shared<Impl>();
  im->kind = Impl::Kind::composition;
  im->arity = k;
  im->outer = std::move(outer);
  im->inners = std::move(inners);
  return FinFun(im);
}

FinFun FinFun::host(std::size_t arity, HostFn fn, std::string label) {
  if (arity == 0) throw std::invalid_argument("FinFun::host: arity must be positive");
  if (!fn) throw std::invalid_argument("FinFun::host: empty function");
  auto im = std::make_shared<Impl>();
  im->kind = Impl::Kind::host;
  im->arity = arity;
  im->fn = std::move(fn);
  im->label = std::move(label);
  return FinFun(im);
}

// --- text form -------------------------------------------------------------------

std::string FinFun::to_text() const {
  const Impl& im = *impl_;
  std::ostringstream out;
  switch (im.kind) {
    case Impl::Kind::expression: {
      if (im.arity != inferred_arity(*im.expr)) out << im.arity << '|';
      print_expr(*im.expr, out, 0, false);
      break;
    }
    case Impl::Kind::table: {
      out << "table(" << im.arity << "){";
      for (const auto& [key, value] : im.table) {
        out << '(';
        for (std::size_t i = 0; i < key.size(); ++i) {
          if (i > 0) out << ',';
          out << key[i].str();
        }
        out << ")->" << value.str() << "; ";
      }
      out << "default->" << im.table_default.str() << '}';
      break;
    }
    case Impl::Kind::sqrt_indicator: out << "sqrt-indicator"; break;
    case Impl::Kind::composition: {
      out << "compose(" << im.outer->to_text();
      for (const FinFun& g : im.inners) out << "; " << g.to_text();
      out << ')';
      break;
    }
    case Impl::Kind::host: out << "host:" << im.label << '/' << im.arity; break;
  }
  return out.str();
}

// --- parsing ----------------------------------------------------------------------

// Lets the in-file parser build expression-kind functions without a public
// AST type in the header.
class FinFunAccess {
 public:
  static FinFun make_expression(std::size_t arity, ExprPtr expr) {
    auto im = std::make_shared<FinFun::Impl>();
    im->kind = FinFun::Impl::Kind::expression;
    im->arity = arity;
    im->expr = std::move(expr);
    return FinFun(std::move(im));
  }
};

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  FinFun parse_finfun() {
    FinFun f = parse_inner();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return f;
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("finfun parse error at offset " + std::to_string(pos_) + ": " +
                                what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ == text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char ch) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char ch) {
    if (!consume(ch)) fail(std::string("expected '") + ch + "'");
  }

  bool consume_word(const char* word) {
    skip_ws();
    std::size_t len = std::string_view(word).size();
    if (text_.compare(pos_, len, word) != 0) return false;
    // Must not be a prefix of a longer identifier ("min" vs "minute").
    std::size_t after = pos_ + len;
    if (after < text_.size()) {
      char next = text_[after];
      if (std::isalnum(static_cast<unsigned char>(next)) || next == '-' || next == '_')
        return false;
    }
    pos_ += len;
    return true;
  }

  Nat parse_number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a number");
    return Nat(text_.substr(start, pos_ - start));
  }

  std::size_t parse_small_number(const char* what) {
    Nat n = parse_number();
    if (n > 64) fail(std::string(what) + " out of range");
    return static_cast<std::size_t>(n);
  }

  FinFun parse_inner() {
    // Optional "k|" arity prefix: digits followed by '|'.
    skip_ws();
    std::optional<std::size_t> declared;
    std::size_t save = pos_;
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      std::size_t k = parse_small_number("declared arity");
      if (consume('|')) {
        if (k == 0) fail("declared arity must be positive");
        declared = k;
      } else {
        pos_ = save;
      }
    }

    skip_ws();
    FinFun f = [&] {
      if (consume_word("table")) return parse_table();
      if (consume_word("compose")) return parse_compose();
      if (consume_word("sqrt-indicator")) return FinFun::sqrt_indicator();
      return parse_expression_function(declared);
    }();
    if (declared && f.arity() != *declared)
      fail("declared arity " + std::to_string(*declared) + " does not match body arity " +
           std::to_string(f.arity()));
    return f;
  }

  FinFun parse_table() {
    expect('(');
    std::size_t k = parse_small_number("table arity");
    if (k == 0) fail("table arity must be positive");
    expect(')');
    expect('{');
    std::map<std::vector<Nat>, Nat> entries;
    std::optional<Nat> default_value;
    while (true) {
      skip_ws();
      // Not consume_word: the arrow's '-' would read as part of a longer
      // identifier under the word-boundary rule.
      if (text_.compare(pos_, 7, "default") == 0) {
        pos_ += 7;
        expect('-');
        expect('>');
        if (default_value) fail("duplicate default entry");
        default_value = parse_number();
      } else {
        expect('(');
        std::vector<Nat> key;
        key.push_back(parse_number());
        while (consume(',')) key.push_back(parse_number());
        expect(')');
        if (key.size() != k) fail("tuple arity does not match table arity");
        expect('-');
        expect('>');
        Nat value = parse_number();
        if (!entries.emplace(std::move(key), std::move(value)).second)
          fail("duplicate table tuple");
      }
      if (consume(';')) continue;
      expect('}');
      break;
    }
    if (!default_value) fail("table needs a default entry");
    return FinFun::from_table(k, std::move(entries), std::move(*default_value));
  }

  FinFun parse_compose() {
    expect('(');
    // Components are separated by ';' at this nesting level; find each
    // component's extent by paren/brace balance and recurse.
    std::vector<FinFun> parts;
    int depth = 1;
    std::size_t start = pos_;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated compose(...)");
      char ch = text_[pos_];
      if (ch == '(' || ch == '{') ++depth;
      if (ch == ')' || ch == '}') --depth;
      if ((ch == ';' && depth == 1) || depth == 0) {
        Parser sub(text_);
        sub.pos_ = start;
        sub.text_trim_end_ = pos_;
        parts.push_back(sub.parse_component());
        start = pos_ + 1;
      }
      ++pos_;
      if (depth == 0) break;
    }
    if (parts.size() < 2) fail("compose needs an outer function and at least one inner");
    FinFun outer = parts.front();
    parts.erase(parts.begin());
    return FinFun::compose(std::move(outer), std::move(parts));
  }

  // Sub-parse helper: parse a finfun that must end exactly at text_trim_end_.
  std::size_t text_trim_end_ = std::string::npos;
  FinFun parse_component() {
    FinFun f = parse_inner();
    skip_ws_until_trim();
    if (pos_ != text_trim_end_) fail("trailing input inside compose component");
    return f;
  }
  void skip_ws_until_trim() {
    while (pos_ < text_trim_end_ && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  FinFun parse_expression_function(std::optional<std::size_t> declared) {
    ExprPtr e = parse_sum();
    std::size_t inferred = inferred_arity(*e);
    std::size_t arity = declared ? *declared : inferred;
    if (inferred > arity)
      fail("expression uses x" + std::to_string(inferred) + " but declared arity is " +
           std::to_string(arity));
    return FinFunAccess::make_expression(arity, std::move(e));
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_product();
    while (true) {
      if (consume('+'))
        e = make_binary(ExprNode::Op::add, std::move(e), parse_product());
      else if (peek() == '-' && !peek_arrow() && consume('-'))
        e = make_binary(ExprNode::Op::sub, std::move(e), parse_product());
      else
        return e;
    }
  }

  bool peek_arrow() {
    skip_ws();
    return pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] == '>';
  }

  ExprPtr parse_product() {
    ExprPtr e = parse_factor();
    while (true) {
      if (consume('*'))
        e = make_binary(ExprNode::Op::mul, std::move(e), parse_factor());
      else if (consume('/'))
        e = make_binary(ExprNode::Op::div, std::move(e), parse_factor());
      else if (consume('%'))
        e = make_binary(ExprNode::Op::mod, std::move(e), parse_factor());
      else
        return e;
    }
  }

  ExprPtr parse_factor() {
    skip_ws();
    if (consume('(')) {
      ExprPtr e = parse_sum();
      expect(')');
      return e;
    }
    if (consume_word("min")) return parse_call(ExprNode::Op::minimum);
    if (consume_word("max")) return parse_call(ExprNode::Op::maximum);
    if (consume_word("eq")) return parse_call(ExprNode::Op::equals);
    char ch = peek();
    if (std::isdigit(static_cast<unsigned char>(ch))) return make_const(parse_number());
    if (ch == 'x' || ch == 'y' || ch == 'z') return parse_variable();
    fail("expected a number, variable, call or parenthesized expression");
  }

  ExprPtr parse_call(ExprNode::Op op) {
    expect('(');
    ExprPtr a = parse_sum();
    expect(',');
    ExprPtr b = parse_sum();
    expect(')');
    return make_binary(op, std::move(a), std::move(b));
  }

  ExprPtr parse_variable() {
    skip_ws();
    char ch = text_[pos_];
    ++pos_;
    if (ch == 'y') return make_var(1);
    if (ch == 'z') return make_var(2);
    // 'x' alone is x1; 'x<digits>' is that variable (1-based).
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      std::size_t idx = parse_small_number("variable index");
      if (idx == 0) fail("variable indices start at 1");
      return make_var(idx - 1);
    }
    return make_var(0);
  }
};

}  // namespace

FinFun FinFun::parse(const std::string& text) { return Parser(text).parse_finfun(); }

// --- pointwise comparison -----------------------------------------------------------

PrefixComparison prefix_equal(const FinFun& f, const FinFun& g, const Nat& horizon) {
  if (f.arity() != g.arity())
    throw std::invalid_argument("prefix_equal: functions have different arities");
  PrefixComparison out;
  if (horizon == 0) return out;
  std::size_t k = f.arity();
  std::vector<Nat> tuple(k, Nat(0));
  while (true) {
    Nat a = f(tuple);
    Nat b = g(tuple);
    if (a != b) {
      out.equal = false;
      out.first_difference = tuple;
      out.lhs_value = std::move(a);
      out.rhs_value = std::move(b);
      return out;
    }
    // Advance the odometer (last coordinate fastest => lexicographic order).
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++tuple[pos] < horizon) break;
      tuple[pos] = 0;
      if (pos == 0) return out;  // wrapped past the box: all tuples agreed
    }
  }
}

}  // namespace zdclone
