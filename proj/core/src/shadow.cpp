#include <zdclone/shadow.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace zdclone {

namespace {

void validate_spec(const ShadowSpec& spec, std::size_t k, const char* who) {
  if (spec.permutation.size() != k)
    throw std::invalid_argument(std::string(who) + ": permutation size does not match arity");
  std::vector<bool> seen(k, false);
  for (std::size_t p : spec.permutation) {
    if (p >= k || seen[p])
      throw std::invalid_argument(std::string(who) + ": not a permutation of the argument slots");
    seen[p] = true;
  }
  if (spec.fixed_prefix.size() >= k)
    throw std::invalid_argument(std::string(who) +
                                ": must leave at least one argument unfixed");
}

// Where each argument slot of the underlying function draws its value from:
// a pinned constant or one of the result's variables.
using Source = std::variant<Nat, std::size_t>;

std::vector<Source> assignment_of(const ShadowSpec& spec, std::size_t k) {
  std::size_t l = spec.fixed_prefix.size();
  std::vector<Source> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t slot = spec.permutation[i];
    if (slot < l)
      out.emplace_back(spec.fixed_prefix[slot]);
    else
      out.emplace_back(slot - l);
  }
  return out;
}

ShadowSpec spec_of_assignment(const std::vector<Source>& assignment) {
  // Constants claim fresh prefix slots in argument order; variable v sits
  // at slot (number of constants) + v.
  std::size_t l = 0;
  for (const Source& s : assignment)
    if (std::holds_alternative<Nat>(s)) ++l;
  ShadowSpec out;
  out.permutation.resize(assignment.size());
  out.fixed_prefix.reserve(l);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (const Nat* c = std::get_if<Nat>(&assignment[i])) {
      out.permutation[i] = out.fixed_prefix.size();
      out.fixed_prefix.push_back(*c);
    } else {
      out.permutation[i] = l + std::get<std::size_t>(assignment[i]);
    }
  }
  return out;
}

}  // namespace

std::string ShadowSpec::to_text() const {
  std::ostringstream out;
  out << "perm=(";
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    if (i > 0) out << ' ';
    out << permutation[i];
  }
  out << ") fix=(";
  for (std::size_t i = 0; i < fixed_prefix.size(); ++i) {
    if (i > 0) out << ' ';
    out << fixed_prefix[i];
  }
  out << ')';
  return out.str();
}

FinFun shadow(const FinFun& f, const ShadowSpec& spec) {
  std::size_t k = f.arity();
  validate_spec(spec, k, "shadow");
  std::size_t l = spec.fixed_prefix.size();
  std::size_t result_arity = k - l;

  ShadowSpec copy = spec;
  FinFun base = f;
  return FinFun::host(
      result_arity,
      [base, copy, k, l](const std::vector<Nat>& ys) {
        std::vector<Nat> xs(k);
        for (std::size_t i = 0; i < k; ++i) {
          std::size_t slot = copy.permutation[i];
          xs[i] = slot < l ? copy.fixed_prefix[slot] : ys[slot - l];
        }
        return base(xs);
      },
      "shadow[" + spec.to_text() + "]");
}

std::vector<ShadowSpec> enumerate_shadow_specs(std::size_t k, const Nat& bound) {
  if (k == 0) throw std::invalid_argument("enumerate_shadow_specs: arity must be positive");
  std::vector<ShadowSpec> out;
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (std::size_t l = 0; l < k; ++l) {
      if (l > 0 && bound == 0) break;  // no constants available
      std::vector<Nat> fixed(l, Nat(0));
      while (true) {
        out.push_back(ShadowSpec{perm, fixed});
        // Advance the constant tuple in lexicographic order.
        std::size_t pos = l;
        bool done = (l == 0);
        while (pos > 0) {
          --pos;
          if (++fixed[pos] < bound) break;
          fixed[pos] = 0;
          if (pos == 0) done = true;
        }
        if (done) break;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

ShadowSpec combine_shadow_specs(const ShadowSpec& outer, const ShadowSpec& inner, std::size_t k) {
  validate_spec(inner, k, "combine_shadow_specs(inner)");
  std::size_t mid_arity = k - inner.fixed_prefix.size();
  validate_spec(outer, mid_arity, "combine_shadow_specs(outer)");

  std::vector<Source> inner_assign = assignment_of(inner, k);
  std::vector<Source> outer_assign = assignment_of(outer, mid_arity);

  // Substitute the outer assignment into every variable the inner one uses.
  std::vector<Source> composed;
  composed.reserve(k);
  for (const Source& s : inner_assign) {
    if (const std::size_t* v = std::get_if<std::size_t>(&s))
      composed.push_back(outer_assign[*v]);
    else
      composed.push_back(s);
  }
  return spec_of_assignment(composed);
}

}  // namespace zdclone
