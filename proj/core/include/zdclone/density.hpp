#ifndef ZDCLONE_DENSITY_HPP
#define ZDCLONE_DENSITY_HPP

// Finite-horizon density diagnostics.
//
// Nothing here computes a limit.  Every function takes an explicit horizon,
// reports exact rational ratios at that horizon, and leaves the horizon in
// the result so downstream reports can say precisely what was checked.

#include <zdclone/finfun.hpp>
#include <zdclone/nat.hpp>
#include <zdclone/natset.hpp>

#include <cstddef>
#include <vector>

namespace zdclone {

// One row per requested prefix length: the exact count and ratio there.
struct DensitySample {
  Nat horizon;
  Nat count;  // |S intersect [0, horizon)|
  Rat ratio;  // count / horizon
};

// Exact prefix ratios at caller-chosen horizons.  `estimate` is the largest
// ratio among them -- a lower-bound witness for the upper density, never a
// claim about the limit itself.
struct DensityReport {
  std::vector<DensitySample> samples;  // one per requested horizon, ascending
  Rat estimate;                        // max ratio over the samples
  Nat argmax_horizon;                  // least horizon attaining it
};

// horizons must be nonempty and strictly increasing with a positive first
// entry; anything else throws std::invalid_argument.
DensityReport upper_density_estimate(const NatSet& s, const std::vector<Nat>& horizons);

// The usual sampling ladder: 1, 2, 4, ... up to `horizon`, plus the horizon
// itself when it is not a power of two.
std::vector<Nat> dyadic_horizons(const Nat& horizon);

// Ratios |S intersect [2^k, 2^{k+1})| / 2^k for k = 0 .. k_max.
std::vector<Rat> dyadic_block_densities(const NatSet& s, std::size_t k_max);

// Checks the growth premise "f(x) >= x * epsilon for every x < ceil(n/epsilon)"
// and, alongside it, the exact prefix comparison
//
//   |f[A] intersect [0, n)|  <=  |A intersect [0, n/epsilon)|
//
// (both sides divided by n in the reported ratios).  The premise is what
// makes the left side computable: when it holds, any a in A with
// a * epsilon >= n satisfies f(a) >= n, so only the finite part
// A intersect [0, ceil(n/epsilon)) can contribute image points below n.
// When the premise fails, the counts reported are still those of the finite
// enumeration, and premise_holds / premise_counterexample say why they may
// undercount.
struct ScaleBoundResult {
  bool premise_holds = false;
  Nat premise_counterexample;  // least x in [0, input_horizon) violating it
  Nat input_horizon;           // ceil(n / epsilon) as an integer prefix bound
  Nat image_count;             // |f[A intersect [0, input_horizon)] intersect [0, n)|
  Nat input_count;             // |A intersect [0, input_horizon)|
  Rat image_ratio;             // image_count / n
  Rat input_ratio;             // input_count / n
  bool bound_holds = false;    // image_count <= input_count
};

// f must be unary; epsilon must be a positive rational; n must be positive.
ScaleBoundResult scale_bound_check(const FinFun& f, const NatSet& a, const Rat& epsilon,
                                   const Nat& n);

}  // namespace zdclone

#endif  // ZDCLONE_DENSITY_HPP
