#ifndef ZDCLONE_BADNESS_HPP
#define ZDCLONE_BADNESS_HPP

// Witness search, certificates, and diagnostics for the inflation property
// ("badness") of a finitary function against a reservoir set.
//
// A function f : N^k -> N is inflating at level i for a rational
// epsilon > 0 if there are n, t >= i and a set A contained in [i, n) that
// is 2^-i-sparse -- |A intersect [0, r)| <= r / 2^i for every r -- while
// the image is epsilon-dense at t:
//
//   |f[A^k] intersect [0, t)|  >=  epsilon * t.
//
// The searches here draw A from a caller-supplied reservoir B as a slice
// A = B intersect [m, n) and work entirely below explicit horizons
// (m_max, n_max, t_max).  A successful stage is recorded as a
// CertificateEntry; a failed one reports which phase failed and why.
// Entries for increasing i chain into a BadnessCertificate whose union
// witnesses the property at every level up to the last i, and the
// density-decay check quantifies how thin that union is on long prefixes.

#include <zdclone/finfun.hpp>
#include <zdclone/nat.hpp>
#include <zdclone/natset.hpp>
#include <zdclone/shadow.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace zdclone {

// --- certificates -----------------------------------------------------------

// One witnessed level: A = elements listed in `a`, drawn from [m, n),
// 2^-i-sparse, with |f[A^k] intersect [0, t)| >= epsilon * t.
struct CertificateEntry {
  Nat i;
  Nat m;
  Nat n;
  Nat t;
  std::vector<Nat> a;  // sorted ascending
};

struct BadnessCertificate {
  std::string function_text;  // FinFun::to_text() of the witnessed function
  std::size_t arity = 1;
  Rat epsilon;
  std::vector<CertificateEntry> entries;
};

// Plain-text round-trip format ("zdclone-certificate v1").
std::string serialize_certificate(const BadnessCertificate& cert);
BadnessCertificate parse_certificate(const std::string& text);

// Re-derives every claim of the certificate against f from scratch:
// per entry, element order and range, the per-element sparsity inequality
// (idx + 1) * 2^i <= a + 1, and the exact image-density inequality at t;
// across entries, strictly increasing i, n and t, and the chaining
// containment A_j within [n_{j-1}, n_j).  Stops at the first failure.
struct CertificateValidation {
  bool valid = false;
  std::size_t failed_entry = 0;  // 1-based; 0 when the failure is global
  std::string detail;            // empty when valid
};

CertificateValidation validate_certificate(const FinFun& f, const BadnessCertificate& cert);

// --- single-stage search ------------------------------------------------------

struct WitnessSearchLimits {
  Nat m_max;
  Nat n_max;
  Nat t_max;
};

// Lower bounds a chained search imposes on top of the definition's own
// constraints (all default to "no extra constraint").
struct WitnessSearchFloors {
  Nat m_floor;  // m >= m_floor
  Nat n_floor;  // n >= n_floor
  Nat t_floor;  // t >= t_floor
};

enum class WitnessFailure {
  none,
  no_sparse_start,  // every m <= m_max leaves a sparsity violation below n_max
  no_dense_t,       // no t <= t_max reaches epsilon-density
  no_stable_n,      // density needs image points from beyond n_max
};

std::string to_string(WitnessFailure f);

struct WitnessSearchResult {
  bool found = false;
  WitnessFailure failure = WitnessFailure::none;
  std::string detail;      // human-readable failure description
  CertificateEntry entry;  // populated when found
};

// Searches one level i.  Phases, each minimal subject to the previous:
//   m: least value >= max(i, m_floor) such that |B intersect [0, j)| <= j / 2^i
//      for every j in [m, n_max] (found by scanning the count runs of B);
//   t: least value >= max(i, t_floor) with
//      |f[(B intersect [m, n_max))^k] intersect [0, t)| >= epsilon * t;
//   n: least value >= max(n_floor, m + 1) such that the slice A = B
//      intersect [m, n) already supplies every image point counted at t.
WitnessSearchResult badness_from_witness(const FinFun& f, const NatSet& b, const Rat& epsilon,
                                         const Nat& i, const WitnessSearchLimits& limits,
                                         const WitnessSearchFloors& floors = {});

// --- chained assembly ---------------------------------------------------------

// Runs badness_from_witness for J chained stages: stage 1 at i = 0, and
// stage j at i_j = n_{j-1} with floors m >= n_{j-1}, n >= n_{j-1} + 1,
// t >= t_{j-1} + 1.  This keeps the per-stage sparsity moduli 2^{n_{j-1}}
// aligned with the slice boundaries, so the stages tile [0, n_J) into
// disjoint slices A_j within [n_{j-1}, n_j) and the union of the A_j
// witnesses every level i <= i_J at once.
struct GlobalWitnessResult {
  bool complete = false;            // all J stages found
  std::size_t stages_found = 0;     // number of entries in the certificate
  WitnessFailure failure = WitnessFailure::none;  // first failing stage's phase
  std::string detail;
  BadnessCertificate certificate;   // the stages that did succeed
};

GlobalWitnessResult assemble_global_witness(const FinFun& f, const NatSet& b, const Rat& epsilon,
                                            std::size_t stages,
                                            const WitnessSearchLimits& limits);

// --- density decay of an assembled union ---------------------------------------

// For the union A of a certificate's entries and a rational delta > 0,
// derives the decay threshold in two ways.
//
// Literal rule: v is the least index with 2^-v < delta / 2, the stage index
// is clamped to w = min(v - 1, J) (degenerate_index records whether the
// clamp fired), and s = least s with n_w / s < delta / 2.  Whenever
// v - 1 >= J this makes s > n_J, so the claimed range (s, n_J] is empty and
// the claim holds vacuously; range_empty records that.
//
// Effective rule: s_effective is the least s such that
// |A intersect [0, m)| / m < delta for every m in (s, n_J], computed by an
// exact scan of the count runs of A.  This is the non-vacuous content: the
// certified union really is delta-thin on every prefix past s_effective.
struct DensityDecayResult {
  Nat v;
  std::size_t clamped_index = 0;  // w above
  bool degenerate_index = false;
  Nat s;
  bool range_empty = false;
  bool literal_holds = false;     // the (s, n_J] claim, vacuous or not
  Nat s_effective;
  bool effective_holds = false;   // the (s_effective, n_J] claim (never vacuous)
  Nat union_size;                 // |A|
  Nat n_final;                    // n_J
};

DensityDecayResult density_decay_check(const BadnessCertificate& cert, const Rat& delta);

// --- quick diagnostics ----------------------------------------------------------

// Looks for a run of `consecutive` dyadic blocks [2^j, 2^{j+1}) on which the
// image f[(A intersect [0, horizon))^k] is dense (ratio >= image_threshold)
// while A itself is thin (ratio strictly below input_threshold).  Such a
// run is cheap evidence of inflation; its absence decides nothing.
struct ProbeThresholds {
  Rat image_threshold = Rat(1, 4);
  Rat input_threshold = Rat(1, 32);
  std::size_t consecutive = 3;
};

struct ProbeBlock {
  std::size_t k;
  Rat image_ratio;
  Rat input_ratio;
};

struct ProbeResult {
  bool witnessed = false;
  std::size_t first_block = 0;      // start of the qualifying run (when witnessed)
  std::vector<ProbeBlock> blocks;   // all fully-enumerated blocks inspected
  Nat horizon;
};

ProbeResult membership_probe(const FinFun& f, const NatSet& a, const Nat& horizon,
                             const ProbeThresholds& thresholds = {});

// Checks that a shadow g = shadow(f, spec) stays witnessable from the same
// material: every g-value on tuples from A intersect [0, horizon) lies in
// f[(A' )^k] for A' = (A intersect [0, horizon)) union spec.fixed_prefix.
// This holds whenever the fixed constants are themselves available, which
// they are by construction of A'; the check is pointwise and exact.
struct ShadowLiftResult {
  bool holds = true;
  std::vector<Nat> counterexample;  // g-argument tuple (when !holds)
  Nat value;                        // its image under g
};

ShadowLiftResult shadow_witness_lift(const FinFun& f, const ShadowSpec& spec, const NatSet& a,
                                     const Nat& horizon);

// For unary f: verifies the excision containments on [0, horizon),
//
//   f[B] \ f[[0, i]]  subset of  f[B \ [0, i]]  subset of  f[B],
//
// and reports whether each containment is strict (equality can genuinely
// fail, e.g. for constant functions).
struct ExcisionResult {
  bool lower_holds = false;   // first containment
  bool upper_holds = false;   // second containment
  bool lower_strict = false;
  bool upper_strict = false;
  Nat excised_image_size;     // |f[B \ [0,i]]| on the horizon
  Nat full_image_size;        // |f[B]| on the horizon
};

ExcisionResult image_excision_check(const FinFun& f, const NatSet& b, const Nat& i,
                                    const Nat& horizon);

}  // namespace zdclone

#endif  // ZDCLONE_BADNESS_HPP
