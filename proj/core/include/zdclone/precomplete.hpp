#ifndef ZDCLONE_PRECOMPLETE_HPP
#define ZDCLONE_PRECOMPLETE_HPP

// The completion pipeline: from one inflating function to every function.
//
// Given a unary g that blows a thin set A up to a dense image, the pipeline
// manufactures, in order:
//   1. the realized image B = g[A] below an enumeration horizon, and an
//      exact density estimate for it;
//   2. a scale factor e and a "large set" map f that pushes enough of B
//      onto full intervals [n_i, 2 n_i) while never shrinking any point by
//      more than the factor e;
//   3. an onto construction: a binary h and a thin column set D with
//      h[C x D] = N realized up to a value horizon, where C is the union
//      of the doubled anchor blocks;
//   4. the composite t(x, y) = h(f(g(x)), y), a right inverse (r1, r2) for
//      it below an output bound, and the combined witness set Z = A union D.
//
// With those parts, generate_function assembles for any target u the term
// t(r1(u(xs)), r2(u(xs))) and checks pointwise that it reproduces u.  Each
// stage is verifiable on its own and reports exact counts.

#include <zdclone/finfun.hpp>
#include <zdclone/nat.hpp>
#include <zdclone/natset.hpp>
#include <zdclone/term.hpp>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace zdclone {

// --- unarization --------------------------------------------------------------

// Largest c such that the diagonal index of the corner tuple
// (c-1, ..., c-1) of [0, c)^k is below index_horizon; [0, c)^k is then the
// largest full box whose tuples all have indices below that horizon.
Nat box_side(std::size_t k, const Nat& index_horizon);

// Carrier-indexed unarization of a k-ary g over an infinite set
// A = {a_0 < a_1 < ...}: the components map a_m to a_{coord_i(m)} where
// (coord_1(m), ..., coord_k(m)) is the tuple of index m under the iterated
// pairing of nat.hpp (and map anything outside A to 0), so that
//
//   h(a_m) = g(components[0](a_m), ..., components[k-1](a_m))
//
// runs through g over all k-tuples drawn from A.  Element lookups walk A
// lazily and are memoised, so repeated evaluation is cheap.
//
// The build enumerates A up to `horizon` and checks there that the index
// map is injective, that it covers the rank box [0, box)^k exactly once
// (box = box_side(k, enumerated)), and that h agrees with g through the
// components on every enumerated element.
struct Unarization {
  std::size_t k = 1;
  NatSet carrier;
  std::vector<FinFun> components;  // k unary host functions
  FinFun h;                        // unary host: g after the components

  Nat horizon;
  Nat enumerated;        // |A intersect [0, horizon)|
  Nat box;               // box_side(k, enumerated)
  bool verified = false;
};

// A must have at least one element below the horizon.
Unarization unarize(const FinFun& g, const NatSet& a, const Nat& horizon);

// --- large-set map --------------------------------------------------------------

// Anchors n_1 < n_2 < ... with |B intersect [n_i, e * n_i)| >= n_i and
// n_{i+1} > e * n_i, found by scanning n = 1, 2, ... below scan_horizon.
// The map sends the first n_i elements of B intersect [n_i, e * n_i)
// increasingly onto [n_i, 2 n_i) and fixes everything else; consequently
// f(x) * e >= x everywhere and each [n_i, 2 n_i) is covered by the image
// of B intersect [n_i, e * n_i).
struct LargeSetMap {
  bool complete = false;     // all requested anchors found below the horizon
  Nat e;
  std::vector<Nat> anchors;
  FinFun f;                  // unary host
};

LargeSetMap build_large_set_map(const NatSet& b, const Nat& e, std::size_t anchor_count,
                                const Nat& scan_horizon);

// --- onto construction ------------------------------------------------------------

// From a strictly increasing anchor sequence, builds the binary h and the
// column set D with h[C x D] covering [0, 2^{k_max + 1}).
//
// The working sequence always starts at the imposed base value 2 (input
// values <= 2 are dropped): the x-range of every value block must lie in
// C, and the k = 1 block needs x-range [2, 4).  For k = 1 .. k_max, with
// m(k) the largest working value <= 2^k:
//
//   d_k  = ceil(2^k / m(k))            (so 1 <= d_k <= 2^{k-1})
//   D_k  = (2^k - d_k, 2^k]            (the top d_k column indices)
//   R_k  = [m(k), 2 m(k)) x D_k        (candidate pairs, row-major order)
//   S_k  = the first 2^k pairs of R_k, sent bijectively onto [2^k, 2^{k+1}).
//
// h is 0 outside the S_k except at one designated pair sent to 1: the first
// surplus pair (R_k minus S_k, scanning k upward), or -- when every surplus
// is empty -- the first pair (x, y) with x in C, y in D and h(x, y) = 0,
// scanning k ascending, then y in D_k ascending, then x ascending.
struct OntoConstruction {
  std::vector<Nat> input_sequence;
  std::vector<Nat> working_sequence;  // base 2 first, then retained inputs
  std::size_t dropped_count = 0;      // inputs <= 2 that were dropped
  std::size_t k_max = 0;

  struct Block {
    std::size_t k;
    Nat m;            // anchor m(k)
    Nat d;            // column count d_k
    Nat rows;         // |[m, 2m)| = m, for reference
  };
  std::vector<Block> blocks;          // k = 1 .. k_max

  NatSet c;                           // union of [v, 2v) over the working sequence
  NatSet d;                           // union of the D_k (finite)
  FinFun h;                           // binary host, constant-time evaluation
  std::pair<Nat, Nat> one_pair;       // the designated preimage of 1
  bool one_from_surplus = true;       // false when the fallback rule fired
};

OntoConstruction build_onto_construction(const std::vector<Nat>& sequence, std::size_t k_max);

// Exhaustively confirms h[C x D] covers [0, value_horizon) by evaluating h
// on the finitely many pairs that can reach below the horizon.
struct OntoCoverage {
  bool covers = false;
  Nat first_missing;  // least value without a preimage (when !covers)
  Nat horizon;
};

OntoCoverage verify_onto(const OntoConstruction& oc, const Nat& value_horizon);

// Confirms the column set stays thin: exact block counts
// |D intersect [2^k, 2^{k+1})| == d_{k+1} for 1 <= k < k_max, and the ratio
// bound d_{k+1} / 2^k <= 2 / m(k+1) + 2^{-k}.  (The k = 0 block genuinely
// breaks the count identity -- it inherits no top element from a previous
// block -- so the check starts at k = 1.)
struct ColumnSparsity {
  bool counts_match = true;
  bool ratio_bound_holds = true;
  std::size_t first_failure_k = 0;
  std::vector<Rat> block_ratios;  // |D intersect [2^k, 2^{k+1})| / 2^k, k = 1 .. k_max - 1
};

ColumnSparsity verify_column_sparsity(const OntoConstruction& oc);

// The thin-set image bound, block by block: whenever a test set T satisfies
// both premises at block k --
//
//   |T intersect [m(k), 2 m(k))| <= m(k) * eps      (thin rows)
//   |T intersect D_k|            <= d_k             (thin columns)
//
// -- the image h[(T x T) intersect R_k] has at most 2 * eps * 2^k elements.
// Blocks where a premise fails are reported but carry no claim.
struct IdealBlockReport {
  std::size_t k = 0;
  bool row_premise = false;
  bool col_premise = false;
  Nat image_count;   // |h[(T x T) intersect R_k]|, distinct values
  Rat bound;         // 2 * eps * 2^k
  bool bound_holds = false;  // image_count <= bound
};

struct IdealPreservation {
  bool all_premised_blocks_pass = true;  // bound holds wherever both premises do
  std::vector<IdealBlockReport> blocks;  // k = k_lo .. k_hi
};

// eps must be positive; requires 1 <= k_lo <= k_hi <= oc.k_max.
IdealPreservation verify_onto_preserves_ideal(const OntoConstruction& oc, const NatSet& t,
                                              const Rat& eps, std::size_t k_lo,
                                              std::size_t k_hi);

// --- right inverses ------------------------------------------------------------------

// Sweeps pairs (z1, z2) of Z intersect [0, search_horizon) in lexicographic
// order and records, for each value n < n_out, the first pair with
// t(z1, z2) = n.  The sections r1, r2 are finite tables (default 0).
struct RightInverse {
  bool complete = false;
  Nat first_missing;  // least value below n_out never hit (when !complete)
  Nat n_out;
  FinFun r1;
  FinFun r2;
};

RightInverse right_inverse(const FinFun& t, const NatSet& z, const Nat& n_out,
                           const Nat& search_horizon);

// --- the pipeline -----------------------------------------------------------------------

struct PipelineConfig {
  Nat enum_horizon = Nat(1) << 20;           // where A is enumerated / g applied
  Nat e_max = 1024;                          // give up if the scale factor exceeds this
  std::size_t anchor_count = 5;
  Nat anchor_scan_horizon = Nat(1) << 20;
  std::size_t k_max = 14;
  Nat n_out = Nat(1) << 12;                  // right-inverse output bound
  Nat inverse_search_horizon = Nat(1) << 20;
};

struct PipelineResult {
  bool ok = false;
  std::string failure;      // which stage gave up and why (empty when ok)

  std::vector<Nat> image;   // B = g[A intersect [0, enum_horizon)], sorted
  Rat density_estimate;     // prefix ratio of B at its own horizon max(B) + 1
  Nat e;                    // least e with estimate > 3 / e
  LargeSetMap large_map;
  OntoConstruction onto;
  FinFun t;                 // t(x, y) = h(f(g(x)), y)
  NatSet z;                 // A union D
  Nat z_count;              // |Z intersect [0, enum_horizon)|
  RightInverse inverse;
};

// g must be unary.  Fails (ok = false, failure set) rather than throwing
// when a stage premise is unmet: empty image, scale factor above e_max,
// too few anchors, incomplete coverage or inverse.
PipelineResult run_precompleteness_pipeline(const FinFun& g, const NatSet& a,
                                            const PipelineConfig& config = {});

// Assembles t(r1(u(xs)), r2(u(xs))) for an arbitrary target u and compares
// it with u on the box [0, horizon)^arity(u).  Exact reproduction needs
// every u-value on the box to lie below the pipeline's n_out;
// values_in_range reports whether that held.
struct GeneratedFunction {
  Term term;
  PrefixComparison comparison;
  bool values_in_range = false;
  Nat max_value;  // largest u-value seen on the box
};

GeneratedFunction generate_function(const PipelineResult& pipeline, const FinFun& u,
                                    const Nat& horizon);

}  // namespace zdclone

#endif  // ZDCLONE_PRECOMPLETE_HPP
