#ifndef ZDCLONE_SHADOW_HPP
#define ZDCLONE_SHADOW_HPP

// Variable shadows: permute the arguments of a function, then pin a prefix
// of them to constants.
//
// For f : N^k -> N, a ShadowSpec (p, a) with p a permutation of {0..k-1} in
// one-line notation and a a tuple of l < k constants yields
//
//   g(y_1, ..., y_{k-l}) = f(z_{p(1)}, ..., z_{p(k)})
//   where (z_1, ..., z_k) = (a_1, ..., a_l, y_1, ..., y_{k-l}).
//
// Example: f(x, y) = x + 2y with p = (2 1) and a = (3) gives
// g(y) = f(y, 3) = y + 6.  Shadows are closed under composition, and
// combine_shadow_specs computes the composite spec exactly, so the law
//
//   shadow(shadow(f, inner-on-k), outer-on-(k-l))
//     == shadow(f, combine_shadow_specs(outer, inner, k))
//
// can be verified pointwise.

#include <zdclone/finfun.hpp>
#include <zdclone/nat.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace zdclone {

struct ShadowSpec {
  std::vector<std::size_t> permutation;  // one-line notation over {0..k-1}
  std::vector<Nat> fixed_prefix;         // l constants, l < k

  std::string to_text() const;  // e.g. "perm=(1 0) fix=(3)"
};

// Throws std::invalid_argument if the permutation is not a bijection on
// {0..k-1} for k = f.arity(), or if fixed_prefix.size() >= k.
FinFun shadow(const FinFun& f, const ShadowSpec& spec);

// All specs for arity k with every fixed constant drawn from [0, bound):
// permutations in lexicographic one-line order; for each, prefix lengths
// l = 0, 1, ..., k-1 ascending; for each l, constant tuples in lexicographic
// order.  Count: k! * sum over l < k of bound^l.
std::vector<ShadowSpec> enumerate_shadow_specs(std::size_t k, const Nat& bound);

// The spec equivalent to applying `inner` to an arity-k function and then
// `outer` to the result.  outer.permutation must have size
// k - inner.fixed_prefix.size().
ShadowSpec combine_shadow_specs(const ShadowSpec& outer, const ShadowSpec& inner, std::size_t k);

}  // namespace zdclone

#endif  // ZDCLONE_SHADOW_HPP
