// FinFun expression semantics, text round-trips, composition; Term
// assembly; shadow specs and their composition law.

#include <zdclone/finfun.hpp>
#include <zdclone/shadow.hpp>
#include <zdclone/term.hpp>

#include <doctest.h>

#include <random>
#include <string>
#include <vector>

using namespace zdclone;

TEST_CASE("expression arity inference and aliases") {
  CHECK(FinFun::parse("7").arity() == 1);
  CHECK(FinFun::parse("x").arity() == 1);
  CHECK(FinFun::parse("x+y").arity() == 2);
  CHECK(FinFun::parse("z").arity() == 3);
  CHECK(FinFun::parse("x4").arity() == 4);
  CHECK(FinFun::parse("3|x").arity() == 3);  // explicit prefix widens
}

TEST_CASE("totalised operators") {
  FinFun f = FinFun::parse("x - y");
  CHECK(f(3, 7) == 0);  // truncated subtraction
  CHECK(f(7, 3) == 4);
  CHECK(FinFun::parse("x / y")(5, 0) == 0);   // x / 0 == 0
  CHECK(FinFun::parse("x % y")(5, 0) == 5);   // x % 0 == x
  CHECK(FinFun::parse("min(x, y)")(4, 9) == 4);
  CHECK(FinFun::parse("max(x, y)")(4, 9) == 9);
  CHECK(FinFun::parse("eq(x, y)")(4, 4) == 1);
  CHECK(FinFun::parse("eq(x, y)")(4, 5) == 0);
}

TEST_CASE("precedence and parentheses") {
  CHECK(FinFun::parse("2 + 3 * 4")(Nat(0)) == 14);
  CHECK(FinFun::parse("(2 + 3) * 4")(Nat(0)) == 20);
  CHECK(FinFun::parse("x * x + 1")(Nat(7)) == 50);
}

TEST_CASE("sqrt-indicator built-in") {
  FinFun f = FinFun::sqrt_indicator();
  CHECK(f.arity() == 1);
  for (Nat x = 0; x < 500; ++x) {
    Nat s = isqrt(x);
    CHECK(f(x) == (s * s == x ? s : Nat(0)));
  }
  CHECK(FinFun::parse("sqrt-indicator")(Nat(49)) == 7);
}

TEST_CASE("tables with defaults") {
  FinFun f = FinFun::from_table(2, {{{Nat(1), Nat(2)}, Nat(10)}, {{Nat(3), Nat(4)}, Nat(20)}},
                                Nat(5));
  CHECK(f(1, 2) == 10);
  CHECK(f(3, 4) == 20);
  CHECK(f(0, 0) == 5);
  FinFun parsed = FinFun::parse("table(2){(1,2)->10;(3,4)->20;default->5}");
  CHECK(prefix_equal(f, parsed, 6).equal);
}

TEST_CASE("composition evaluates outer after inners") {
  FinFun sum = FinFun::parse("x+y");
  FinFun dbl = FinFun::parse("2*x");
  FinFun sq = FinFun::parse("x*x");
  FinFun c = FinFun::compose(sum, {dbl, sq});  // 2x + x^2
  CHECK(c.arity() == 1);
  for (Nat x = 0; x < 40; ++x) CHECK(c(x) == 2 * x + x * x);
}

TEST_CASE("projections and constants") {
  CHECK(FinFun::projection(3, 1)({Nat(4), Nat(5), Nat(6)}) == 5);
  CHECK(FinFun::constant(2, 9)(1, 2) == 9);
  CHECK_THROWS_AS(FinFun::projection(2, 5), std::invalid_argument);
}

TEST_CASE("text round-trip for every non-host kind") {
  for (const char* text : {
           "x + y * 3 - 2", "sqrt-indicator",
           "table(1){(0)->1;default->0}",
           "compose(x+y;x*x;2*x)", "min(x, max(y, 3))", "3|x2 % 5",
       }) {
    CAPTURE(text);
    FinFun f = FinFun::parse(text);
    FinFun back = FinFun::parse(f.to_text());
    CHECK(prefix_equal(f, back, 8).equal);
  }
}

TEST_CASE("hosts carry a label and refuse to round-trip") {
  FinFun h = FinFun::host(2, [](const std::vector<Nat>& xs) { return xs[0] * xs[1]; }, "mul");
  CHECK(h.is_host());
  CHECK(h.to_text() == "host:mul/2");
  CHECK_THROWS_AS(FinFun::parse(h.to_text()), std::invalid_argument);
}

TEST_CASE("parse failures") {
  for (const char* text : {"", "x +", "min(x)", "table(1){(0,1)->2}", "x$y", "(x"})
    CHECK_THROWS_AS(FinFun::parse(text), std::invalid_argument);
}

TEST_CASE("prefix_equal reports the first lexicographic difference") {
  FinFun f = FinFun::parse("x + y");
  FinFun g = FinFun::parse("x + y + eq(x, 2) * eq(y, 1)");
  auto cmp = prefix_equal(f, g, 5);
  CHECK(!cmp.equal);
  CHECK(cmp.first_difference == std::vector<Nat>{Nat(2), Nat(1)});
  CHECK(cmp.lhs_value == 3);
  CHECK(cmp.rhs_value == 4);
  CHECK(prefix_equal(f, FinFun::parse("y + x"), 20).equal);
  CHECK_THROWS_AS(prefix_equal(f, FinFun::parse("x"), 5), std::invalid_argument);
}

TEST_CASE("wrong argument counts throw") {
  FinFun f = FinFun::parse("x + y");
  CHECK_THROWS_AS(f({Nat(1)}), std::invalid_argument);
  CHECK_THROWS_AS(FinFun::compose(f, {FinFun::parse("x")}), std::invalid_argument);
}

TEST_CASE("terms print and evaluate") {
  FinFun add = FinFun::parse("x + y");
  FinFun sq = FinFun::parse("x * x");
  Term x1 = Term::variable(1, 0);
  Term t = Term::apply("add", add, {Term::apply("sq", sq, {x1}), x1});  // x^2 + x
  CHECK(t.arity() == 1);
  CHECK(t.to_text() == "add(sq(x1), x1)");
  CHECK(t.evaluate({Nat(5)}) == 30);
  FinFun flat = t.to_finfun();
  CHECK(flat.is_host());
  for (Nat x = 0; x < 30; ++x) CHECK(flat(x) == x * x + x);
}

TEST_CASE("term arity mismatches throw") {
  FinFun add = FinFun::parse("x + y");
  CHECK_THROWS_AS(Term::apply("add", add, {Term::variable(1, 0)}), std::invalid_argument);
  CHECK_THROWS_AS(Term::variable(2, 5), std::invalid_argument);
}

TEST_CASE("shadows permute then fix a prefix") {
  // f(x, y) = x + 2y; spec reads: z = (3, y), then arguments (z_p(0), z_p(1)).
  FinFun f = FinFun::parse("x + 2 * y");
  ShadowSpec spec;
  spec.permutation = {1, 0};  // swap: g(y) = f(y, 3) = y + 6
  spec.fixed_prefix = {Nat(3)};
  FinFun g = shadow(f, spec);
  CHECK(g.arity() == 1);
  for (Nat y = 0; y < 20; ++y) CHECK(g(y) == y + 6);
}

TEST_CASE("shadow spec validation") {
  FinFun f = FinFun::parse("x + y");
  ShadowSpec bad;
  bad.permutation = {0, 0};
  CHECK_THROWS_AS(shadow(f, bad), std::invalid_argument);
  ShadowSpec toolong;
  toolong.permutation = {0, 1};
  toolong.fixed_prefix = {Nat(1), Nat(2)};  // l must stay < k
  CHECK_THROWS_AS(shadow(f, toolong), std::invalid_argument);
}

TEST_CASE("shadow enumeration counts") {
  CHECK(enumerate_shadow_specs(1, 10).size() == 1);    // 1! * 10^0
  CHECK(enumerate_shadow_specs(2, 2).size() == 6);     // 2! * (1 + 2)
  CHECK(enumerate_shadow_specs(3, 1).size() == 18);    // 3! * (1 + 1 + 1)
  CHECK(enumerate_shadow_specs(3, 2).size() == 42);    // 3! * (1 + 2 + 4)
  // Each enumerated spec is applicable.
  FinFun f = FinFun::parse("x + y * z");
  for (const auto& spec : enumerate_shadow_specs(3, 2)) {
    FinFun g = shadow(f, spec);
    CHECK(g.arity() == 3 - spec.fixed_prefix.size());
  }
}

TEST_CASE("shadow composition law on the full enumeration") {
  // shadow(shadow(f, inner), outer) == shadow(f, combine(outer, inner)).
  FinFun f = FinFun::parse("x + 2 * y + 4 * z");
  for (const auto& inner : enumerate_shadow_specs(3, 2)) {
    std::size_t rest = 3 - inner.fixed_prefix.size();
    if (rest < 1) continue;
    FinFun mid = shadow(f, inner);
    for (const auto& outer : enumerate_shadow_specs(rest, 2)) {
      FinFun two_step = shadow(mid, outer);
      ShadowSpec combined = combine_shadow_specs(outer, inner, 3);
      FinFun one_step = shadow(f, combined);
      CHECK(prefix_equal(two_step, one_step, 4).equal);
    }
  }
}

TEST_CASE("random expressions: shadows drop exactly the fixed arity") {
  std::mt19937_64 rng(0x5eed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const char* vars[3] = {"x", "y", "z"};
  for (int round = 0; round < 60; ++round) {
    std::size_t k = 1 + pick(3);
    // A random flat expression over the first k variables.
    std::string text = vars[pick(k)];
    for (int ops = static_cast<int>(pick(4)); ops-- > 0;) {
      const char* op = "+-*%"[pick(4)] == '+' ? " + " : "+-*%"[pick(4)] == '-' ? " - "
                       : "+-*%"[pick(4)] == '*' ? " * " : " % ";
      text += op;
      text += pick(2) == 0 ? std::string(vars[pick(k)]) : std::to_string(pick(9));
    }
    FinFun f = FinFun::parse(std::to_string(k) + "|" + text);
    auto specs = enumerate_shadow_specs(k, 3);
    const ShadowSpec& spec = specs[pick(specs.size())];
    CHECK(shadow(f, spec).arity() == k - spec.fixed_prefix.size());
  }
}
