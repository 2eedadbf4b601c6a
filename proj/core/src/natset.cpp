#include <zdclone/natset.hpp>

#include "budget_detail.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

namespace zdclone {

namespace detail {

namespace {

std::atomic<std::uint64_t> g_enumeration_budget{std::uint64_t(1) << 25};

// The active countdown for this thread; owned by the outermost BudgetScope.
thread_local std::uint64_t* t_active_budget = nullptr;

}  // namespace

BudgetScope::BudgetScope() {
  if (t_active_budget == nullptr) {
    remaining = g_enumeration_budget.load(std::memory_order_relaxed);
    t_active_budget = &remaining;
    owner = true;
  }
}

BudgetScope::~BudgetScope() {
  if (owner) t_active_budget = nullptr;
}

void spend_step(const char* activity) {
  if (t_active_budget == nullptr) return;
  if (*t_active_budget == 0)
    throw EnumerationBudgetError(std::string("enumeration budget exhausted while ") + activity);
  --*t_active_budget;
}

}  // namespace detail

namespace {

using detail::BudgetScope;
using detail::spend_step;

}  // namespace

struct NatSet::Impl {
  enum class Kind {
    empty,
    all,
    multiples,
    squares,
    powers,
    interval,
    intervals,
    finite,
    cofinite,
    set_union,
    set_intersection,
    predicate
  };

  Kind kind = Kind::empty;
  std::string display;

  Nat a;                   // multiples: step; powers: base; interval: lo; predicate: bound
  Nat b;                   // interval: hi
  std::vector<Nat> elems;  // finite: elements; cofinite: excluded (both sorted, unique)
  std::vector<std::pair<Nat, Nat>> pieces;  // intervals: disjoint [lo, hi), ascending
  std::vector<Nat> piece_prefix;            // intervals: total size of pieces before i
  std::optional<NatSet> left;
  std::optional<NatSet> right;
  std::optional<FinFun> expr;  // predicate

  // Walked-count checkpoints: position p -> |S intersect [0, p)|.
  std::mutex mu;
  std::map<Nat, Nat> checkpoints;

  bool closed_form() const {
    return kind != Kind::set_union && kind != Kind::set_intersection && kind != Kind::predicate;
  }
};

NatSet::NatSet(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

NatSet::NatSet() : NatSet(NatSet::empty()) {}

namespace {

std::shared_ptr<NatSet::Impl> make_impl(NatSet::Impl::Kind kind, std::string display) {
  auto im = std::make_shared<NatSet::Impl>();
  im->kind = kind;
  im->display = std::move(display);
  return im;
}

std::string join_elements(const std::vector<Nat>& elems) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if (i > 0) out << ',';
    out << elems[i].str();
  }
  out << '}';
  return out.str();
}

std::vector<Nat> sorted_unique(std::vector<Nat> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

// --- factories -----------------------------------------------------------------

NatSet NatSet::empty() { return NatSet(make_impl(Impl::Kind::empty, "empty")); }

NatSet NatSet::all() { return NatSet(make_impl(Impl::Kind::all, "all")); }

NatSet NatSet::multiples(const Nat& step) {
  if (step < 1) throw std::invalid_argument("NatSet::multiples: step must be positive");
  auto im = make_impl(Impl::Kind::multiples, "multiples:" + step.str());
  im->a = step;
  return NatSet(std::move(im));
}

NatSet NatSet::evens() {
  auto im = make_impl(Impl::Kind::multiples, "evens");
  im->a = 2;
  return NatSet(std::move(im));
}

NatSet NatSet::squares() { return NatSet(make_impl(Impl::Kind::squares, "squares")); }

NatSet NatSet::powers(const Nat& base) {
  if (base < 2) throw std::invalid_argument("NatSet::powers: base must be at least 2");
  auto im = make_impl(Impl::Kind::powers, "powers:" + base.str());
  im->a = base;
  return NatSet(std::move(im));
}

NatSet NatSet::interval(const Nat& lo, const Nat& hi) {
  auto im = make_impl(Impl::Kind::interval, "interval:" + lo.str() + ":" + hi.str());
  im->a = lo;
  im->b = hi;
  return NatSet(std::move(im));
}

NatSet NatSet::intervals(std::vector<std::pair<Nat, Nat>> pieces) {
  std::sort(pieces.begin(), pieces.end());
  std::vector<std::pair<Nat, Nat>> kept;
  for (auto& p : pieces) {
    if (p.first >= p.second) continue;  // empty piece
    if (!kept.empty() && p.first <= kept.back().second) {
      if (p.second > kept.back().second) kept.back().second = std::move(p.second);
    } else {
      kept.push_back(std::move(p));
    }
  }

  std::ostringstream display;
  display << "intervals:{";
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i > 0) display << ',';
    display << kept[i].first.str() << ':' << kept[i].second.str();
  }
  display << '}';

  auto im = make_impl(Impl::Kind::intervals, display.str());
  im->piece_prefix.reserve(kept.size());
  Nat total = 0;
  for (const auto& p : kept) {
    im->piece_prefix.push_back(total);
    total += p.second - p.first;
  }
  im->pieces = std::move(kept);
  return NatSet(std::move(im));
}

NatSet NatSet::finite(std::vector<Nat> elements) {
  auto elems = sorted_unique(std::move(elements));
  auto im = make_impl(Impl::Kind::finite, join_elements(elems));
  im->elems = std::move(elems);
  return NatSet(std::move(im));
}

NatSet NatSet::cofinite(std::vector<Nat> excluded) {
  auto elems = sorted_unique(std::move(excluded));
  auto im = make_impl(Impl::Kind::cofinite, "cofinite:" + join_elements(elems));
  im->elems = std::move(elems);
  return NatSet(std::move(im));
}

NatSet NatSet::set_union(NatSet a, NatSet b) {
  auto im = make_impl(Impl::Kind::set_union,
                      "union(" + a.to_text() + "; " + b.to_text() + ")");
  im->left = std::move(a);
  im->right = std::move(b);
  return NatSet(std::move(im));
}

NatSet NatSet::set_intersection(NatSet a, NatSet b) {
  auto im = make_impl(Impl::Kind::set_intersection,
                      "inter(" + a.to_text() + "; " + b.to_text() + ")");
  im->left = std::move(a);
  im->right = std::move(b);
  return NatSet(std::move(im));
}

NatSet NatSet::predicate(const Nat& bound, FinFun expr) {
  if (expr.arity() != 1) throw std::invalid_argument("NatSet::predicate: expression must be unary");
  auto im = make_impl(Impl::Kind::predicate, "pred:" + bound.str() + ":" + expr.to_text());
  im->a = bound;
  im->expr = std::move(expr);
  return NatSet(std::move(im));
}

// --- queries -------------------------------------------------------------------

bool NatSet::contains(const Nat& x) const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case Impl::Kind::empty: return false;
    case Impl::Kind::all: return true;
    case Impl::Kind::multiples: return x % im.a == 0;
    case Impl::Kind::squares: return is_square(x);
    case Impl::Kind::powers: {
      if (x == 0) return false;
      Nat v = x;
      while (v % im.a == 0) v /= im.a;
      return v == 1;
    }
    case Impl::Kind::interval: return x >= im.a && x < im.b;
    case Impl::Kind::intervals: {
      auto it = std::upper_bound(
          im.pieces.begin(), im.pieces.end(), x,
          [](const Nat& v, const std::pair<Nat, Nat>& p) { return v < p.first; });
      if (it == im.pieces.begin()) return false;
      return x < std::prev(it)->second;
    }
    case Impl::Kind::finite:
      return std::binary_search(im.elems.begin(), im.elems.end(), x);
    case Impl::Kind::cofinite:
      return !std::binary_search(im.elems.begin(), im.elems.end(), x);
    case Impl::Kind::set_union: return im.left->contains(x) || im.right->contains(x);
    case Impl::Kind::set_intersection: return im.left->contains(x) && im.right->contains(x);
    case Impl::Kind::predicate: return x < im.a && (*im.expr)(x) != 0;
  }
  throw std::logic_error("NatSet: bad kind");
}

std::optional<Nat> NatSet::next_element(const Nat& from) const {
  BudgetScope scope;
  const Impl& im = *impl_;
  switch (im.kind) {
    case Impl::Kind::empty: return std::nullopt;
    case Impl::Kind::all: return from;
    case Impl::Kind::multiples: return ceil_div(from, im.a) * im.a;
    case Impl::Kind::squares: {
      Nat s = isqrt(from);
      if (s * s == from) return from;
      return (s + 1) * (s + 1);
    }
    case Impl::Kind::powers: {
      Nat p = 1;
      while (p < from) p *= im.a;
      return p;
    }
    case Impl::Kind::interval: {
      if (from >= im.b) return std::nullopt;
      Nat x = from < im.a ? im.a : from;
      return x < im.b ? std::optional<Nat>(x) : std::nullopt;
    }
    case Impl::Kind::intervals: {
      // First piece that still has room past `from`; pieces are disjoint and
      // ascending, so they are sorted by hi as well.
      auto it = std::upper_bound(
          im.pieces.begin(), im.pieces.end(), from,
          [](const Nat& v, const std::pair<Nat, Nat>& p) { return v < p.second; });
      if (it == im.pieces.end()) return std::nullopt;
      return from > it->first ? from : it->first;
    }
    case Impl::Kind::finite: {
      auto it = std::lower_bound(im.elems.begin(), im.elems.end(), from);
      if (it == im.elems.end()) return std::nullopt;
      return *it;
    }
    case Impl::Kind::cofinite: {
      Nat x = from;
      while (std::binary_search(im.elems.begin(), im.elems.end(), x)) ++x;
      return x;
    }
    case Impl::Kind::set_union: {
      auto a = im.left->next_element(from);
      auto b = im.right->next_element(from);
      if (!a) return b;
      if (!b) return a;
      return *a <= *b ? a : b;
    }
    case Impl::Kind::set_intersection: {
      // Leapfrog: advance to the next candidate of one side, then ask the
      // other side for its next element from there; agreement means found.
      Nat x = from;
      while (true) {
        spend_step("searching an intersection");
        auto a = im.left->next_element(x);
        if (!a) return std::nullopt;
        auto b = im.right->next_element(*a);
        if (!b) return std::nullopt;
        if (*b == *a) return a;
        x = *b;
      }
    }
    case Impl::Kind::predicate: {
      Nat x = from;
      while (x < im.a) {
        spend_step("scanning a pred set");
        if ((*im.expr)(x) != 0) return x;
        ++x;
      }
      return std::nullopt;
    }
  }
  throw std::logic_error("NatSet: bad kind");
}

Nat NatSet::prefix_count(const Nat& n) const {
  BudgetScope scope;
  Impl& im = *impl_;
  switch (im.kind) {
    case Impl::Kind::empty: return 0;
    case Impl::Kind::all: return n;
    case Impl::Kind::multiples:
      return n == 0 ? Nat(0) : Nat((n - 1) / im.a + 1);
    case Impl::Kind::squares:
      return n == 0 ? Nat(0) : Nat(isqrt(n - 1) + 1);
    case Impl::Kind::powers: {
      Nat count = 0;
      Nat p = 1;
      while (p < n) {
        ++count;
        p *= im.a;
      }
      return count;
    }
    case Impl::Kind::interval: {
      Nat hi = n < im.b ? n : im.b;
      return monus(hi, im.a);
    }
    case Impl::Kind::intervals: {
      auto it = std::upper_bound(
          im.pieces.begin(), im.pieces.end(), n,
          [](const Nat& v, const std::pair<Nat, Nat>& p) { return v < p.first; });
      if (it == im.pieces.begin()) return 0;
      std::size_t idx = static_cast<std::size_t>(it - im.pieces.begin());
      const auto& last = im.pieces[idx - 1];
      Nat cut = n < last.second ? n : last.second;
      return im.piece_prefix[idx - 1] + (cut - last.first);
    }
    case Impl::Kind::finite: {
      auto it = std::lower_bound(im.elems.begin(), im.elems.end(), n);
      return Nat(it - im.elems.begin());
    }
    case Impl::Kind::cofinite: {
      auto it = std::lower_bound(im.elems.begin(), im.elems.end(), n);
      return n - Nat(it - im.elems.begin());
    }
    default: break;
  }

  // Walked kinds: resume from the best checkpoint at or below n.
  std::lock_guard<std::mutex> lock(im.mu);
  Nat pos = 0;
  Nat count = 0;
  auto it = im.checkpoints.upper_bound(n);
  if (it != im.checkpoints.begin()) {
    --it;
    pos = it->first;
    count = it->second;
  }
  std::uint32_t since_checkpoint = 0;
  while (true) {
    spend_step("counting a walked set");
    auto e = next_element(pos);
    if (!e || *e >= n) break;
    ++count;
    pos = *e + 1;
    if (++since_checkpoint == 1024) {
      since_checkpoint = 0;
      im.checkpoints.emplace(pos, count);
    }
  }
  im.checkpoints.emplace(n, count);
  return count;
}

std::vector<Nat> NatSet::elements_below(const Nat& hi) const {
  BudgetScope scope;
  std::vector<Nat> out;
  Nat pos = 0;
  while (true) {
    spend_step("enumerating a set");
    auto e = next_element(pos);
    if (!e || *e >= hi) break;
    out.push_back(*e);
    pos = *e + 1;
  }
  return out;
}

std::string NatSet::to_text() const { return impl_->display; }

void NatSet::set_enumeration_budget(std::uint64_t steps) {
  detail::g_enumeration_budget.store(steps, std::memory_order_relaxed);
}

// --- parsing -------------------------------------------------------------------

namespace {

std::string strip(const std::string& s) {
  std::size_t lo = 0;
  std::size_t hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

std::vector<Nat> parse_brace_list(const std::string& text) {
  // text is "{...}" with comma-separated numbers (possibly none).
  std::string inner = strip(text.substr(1, text.size() - 2));
  std::vector<Nat> out;
  if (inner.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = inner.find(',', start);
    std::string piece = strip(comma == std::string::npos ? inner.substr(start)
                                                         : inner.substr(start, comma - start));
    out.push_back(parse_nat(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Splits "prefix(lhs; rhs)" at the single top-level ';' (parens and braces
// balanced), returning the two component texts.
std::pair<std::string, std::string> split_binary(const std::string& text, std::size_t open,
                                                 const std::string& whole) {
  if (text.empty() || text.back() != ')')
    throw std::invalid_argument("natset parse error: expected ')' at end of '" + whole + "'");
  std::string inner = text.substr(open + 1, text.size() - open - 2);
  int depth = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    char ch = inner[i];
    if (ch == '(' || ch == '{') ++depth;
    if (ch == ')' || ch == '}') --depth;
    if (ch == ';' && depth == 0)
      return {strip(inner.substr(0, i)), strip(inner.substr(i + 1))};
  }
  throw std::invalid_argument("natset parse error: expected ';' separating components in '" +
                              whole + "'");
}

}  // namespace

NatSet NatSet::parse(const std::string& raw) {
  std::string text = strip(raw);
  if (text.empty()) throw std::invalid_argument("natset parse error: empty text");

  if (text == "empty") return empty();
  if (text == "all") return all();
  if (text == "evens") return evens();
  if (text == "squares") return squares();

  if (text.rfind("multiples:", 0) == 0) return multiples(parse_nat(strip(text.substr(10))));
  if (text.rfind("powers:", 0) == 0) return powers(parse_nat(strip(text.substr(7))));

  if (text.rfind("intervals:", 0) == 0) {
    std::string rest = strip(text.substr(10));
    if (rest.size() < 2 || rest.front() != '{' || rest.back() != '}')
      throw std::invalid_argument("natset parse error: intervals needs a brace list: '" + raw +
                                  "'");
    std::string inner = strip(rest.substr(1, rest.size() - 2));
    std::vector<std::pair<Nat, Nat>> pieces;
    std::size_t start = 0;
    while (!inner.empty()) {
      std::size_t comma = inner.find(',', start);
      std::string piece = strip(comma == std::string::npos ? inner.substr(start)
                                                           : inner.substr(start, comma - start));
      std::size_t colon = piece.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("natset parse error: each interval needs 'lo:hi': '" + raw +
                                    "'");
      pieces.emplace_back(parse_nat(strip(piece.substr(0, colon))),
                          parse_nat(strip(piece.substr(colon + 1))));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return intervals(std::move(pieces));
  }

  if (text.rfind("interval:", 0) == 0) {
    std::string rest = text.substr(9);
    std::size_t colon = rest.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("natset parse error: interval needs two bounds: '" + raw + "'");
    return interval(parse_nat(strip(rest.substr(0, colon))),
                    parse_nat(strip(rest.substr(colon + 1))));
  }

  if (text.front() == '{') {
    if (text.back() != '}')
      throw std::invalid_argument("natset parse error: unterminated '{' in '" + raw + "'");
    return finite(parse_brace_list(text));
  }

  if (text.rfind("cofinite:", 0) == 0) {
    std::string rest = strip(text.substr(9));
    if (rest.empty() || rest.front() != '{' || rest.back() != '}')
      throw std::invalid_argument("natset parse error: cofinite needs a brace list: '" + raw +
                                  "'");
    return cofinite(parse_brace_list(rest));
  }

  if (text.rfind("union(", 0) == 0) {
    auto [lhs, rhs] = split_binary(text, 5, raw);
    return set_union(parse(lhs), parse(rhs));
  }

  if (text.rfind("inter(", 0) == 0) {
    auto [lhs, rhs] = split_binary(text, 5, raw);
    return set_intersection(parse(lhs), parse(rhs));
  }

  if (text.rfind("pred:", 0) == 0) {
    std::string rest = text.substr(5);
    std::size_t colon = rest.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("natset parse error: pred needs a bound and an expression: '" +
                                  raw + "'");
    Nat bound = parse_nat(strip(rest.substr(0, colon)));
    return predicate(bound, FinFun::parse(rest.substr(colon + 1)));
  }

  throw std::invalid_argument("natset parse error: unrecognized set '" + raw + "'");
}

}  // namespace zdclone
