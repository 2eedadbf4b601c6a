// Witness search and certificates.  The validator here is written from the
// inflation definition alone -- slice membership, the sparsity inequality,
// exact image density -- so library certificates are checked by code that
// shares nothing with the library's own validator.

#include <zdclone/badness.hpp>
#include <zdclone/finfun.hpp>
#include <zdclone/natset.hpp>

#include <doctest.h>

#include <set>
#include <string>
#include <vector>

using namespace zdclone;

namespace {

const WitnessSearchLimits kDeskLimits{pow2(35), pow2(36), pow2(20)};

// Brute-force inflation check for one entry, straight from the definition:
//   A subset of [i, n), strictly ascending;
//   |A intersect [0, r)| <= r / 2^i for every r  (it is enough to test the
//     right endpoint r = a + 1 of each element: between elements the count
//     stays put while the bound grows);
//   n, t >= i and |f[A^k] intersect [0, t)| >= eps * t, exactly.
bool entry_is_inflation_witness(const FinFun& f, const Rat& eps, const CertificateEntry& e) {
  if (e.n < e.i || e.t < e.i) return false;
  Nat modulus = pow2(e.i);
  for (std::size_t idx = 0; idx < e.a.size(); ++idx) {
    const Nat& a = e.a[idx];
    if (a < e.i || a >= e.n) return false;
    if (idx > 0 && e.a[idx - 1] >= a) return false;
    // |A intersect [0, a+1)| = idx + 1 must be <= (a + 1) / 2^i.
    if (Nat(idx + 1) * modulus > a + 1) return false;
  }
  // Exact image density at t over all k-tuples from A.
  std::set<Nat> image;
  std::size_t k = f.arity();
  std::vector<std::size_t> sel(k, 0);
  if (!e.a.empty()) {
    bool done = false;
    while (!done) {
      std::vector<Nat> args;
      args.reserve(k);
      for (std::size_t j = 0; j < k; ++j) args.push_back(e.a[sel[j]]);
      Nat value = f(args);
      if (value < e.t) image.insert(value);
      done = true;
      for (std::size_t j = k; j-- > 0;) {
        if (++sel[j] < e.a.size()) {
          done = false;
          break;
        }
        sel[j] = 0;
      }
    }
  }
  Nat num = boost::multiprecision::numerator(eps);
  Nat den = boost::multiprecision::denominator(eps);
  return Nat(image.size()) * den >= num * e.t;
}

bool certificate_is_valid(const FinFun& f, const BadnessCertificate& cert) {
  for (std::size_t j = 0; j < cert.entries.size(); ++j) {
    if (!entry_is_inflation_witness(f, cert.epsilon, cert.entries[j])) return false;
    if (j > 0 && cert.entries[j].i <= cert.entries[j - 1].i) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("single-stage search at level 0 on the square indicator") {
  auto res = badness_from_witness(FinFun::sqrt_indicator(), NatSet::squares(), Rat(1, 3), 0,
                                  kDeskLimits);
  REQUIRE(res.found);
  CHECK(res.entry.i == 0);
  CHECK(res.entry.m == 0);
  CHECK(res.entry.n == 1);
  CHECK(res.entry.t == 1);
  CHECK(res.entry.a == std::vector<Nat>{Nat(0)});
  CHECK(entry_is_inflation_witness(FinFun::sqrt_indicator(), Rat(1, 3), res.entry));
}

TEST_CASE("chained assembly reproduces the frozen three-stage certificate") {
  auto res = assemble_global_witness(FinFun::sqrt_indicator(), NatSet::squares(), Rat(1, 3), 3,
                                     kDeskLimits);
  REQUIRE(res.complete);
  REQUIRE(res.stages_found == 3);
  const auto& e = res.certificate.entries;

  CHECK(e[0].i == 0);
  CHECK(e[0].m == 0);
  CHECK(e[0].n == 1);
  CHECK(e[0].t == 1);
  CHECK(e[0].a == std::vector<Nat>{Nat(0)});

  CHECK(e[1].i == 1);
  CHECK(e[1].m == 6);
  CHECK(e[1].n == 17);
  CHECK(e[1].t == 5);
  CHECK(e[1].a == std::vector<Nat>{Nat(9), Nat(16)});

  CHECK(e[2].i == 17);
  CHECK(e[2].m == pow2(34) + pow2(17));
  CHECK(e[2].t == 196610);
  CHECK(e[2].n == Nat(196609) * Nat(196609) + 1);
  CHECK(e[2].a.size() == 65537);
  CHECK(e[2].a.front() == Nat(131073) * Nat(131073));
  CHECK(e[2].a.back() == Nat(196609) * Nat(196609));

  // The library's validator and the independent one both accept it.
  CHECK(validate_certificate(FinFun::sqrt_indicator(), res.certificate).valid);
  CHECK(certificate_is_valid(FinFun::sqrt_indicator(), res.certificate));

  // Stages chain: each slice starts where the previous ended.
  for (std::size_t j = 1; j < 3; ++j) {
    CHECK(e[j].i == e[j - 1].n);
    CHECK(e[j].a.front() >= e[j - 1].n);
    CHECK(e[j].a.back() < e[j].n);
  }
}

TEST_CASE("constant zero runs out of density at the third stage") {
  auto res = assemble_global_witness(FinFun::constant(1, 0), NatSet::squares(), Rat(1, 3), 3,
                                     kDeskLimits);
  CHECK(!res.complete);
  CHECK(res.stages_found == 2);
  CHECK(res.failure == WitnessFailure::no_dense_t);
  // The two stages that did succeed are genuine witnesses for constant 0.
  CHECK(certificate_is_valid(FinFun::constant(1, 0), res.certificate));
  const auto& e = res.certificate.entries;
  REQUIRE(e.size() == 2);
  CHECK(e[0].t == 1);             // |{0}| >= t/3 still holds at t = 1
  CHECK(e[1].i == 1);
  CHECK(e[1].m == 6);
  CHECK(e[1].t == 2);
  CHECK(e[1].n == 10);
  CHECK(e[1].a == std::vector<Nat>{Nat(9)});
}

TEST_CASE("epsilon = 2 is unreachable: density can never exceed 1") {
  auto res = assemble_global_witness(FinFun::sqrt_indicator(), NatSet::squares(), Rat(2), 3,
                                     kDeskLimits);
  CHECK(!res.complete);
  CHECK(res.stages_found == 0);
  CHECK(res.failure == WitnessFailure::no_dense_t);
  CHECK(!res.detail.empty());
}

TEST_CASE("failure phases have names") {
  CHECK(to_string(WitnessFailure::none) == "none");
  CHECK(!to_string(WitnessFailure::no_sparse_start).empty());
  CHECK(!to_string(WitnessFailure::no_dense_t).empty());
  CHECK(!to_string(WitnessFailure::no_stable_n).empty());
}

TEST_CASE("certificates round-trip through the text format") {
  auto res = assemble_global_witness(FinFun::sqrt_indicator(), NatSet::squares(), Rat(1, 3), 2,
                                     kDeskLimits);
  REQUIRE(res.complete);
  std::string text = serialize_certificate(res.certificate);
  CHECK(text.rfind("zdclone-certificate v1", 0) == 0);
  BadnessCertificate back = parse_certificate(text);
  CHECK(back.function_text == res.certificate.function_text);
  CHECK(back.arity == res.certificate.arity);
  CHECK(back.epsilon == res.certificate.epsilon);
  REQUIRE(back.entries.size() == res.certificate.entries.size());
  for (std::size_t j = 0; j < back.entries.size(); ++j) {
    CHECK(back.entries[j].i == res.certificate.entries[j].i);
    CHECK(back.entries[j].a == res.certificate.entries[j].a);
  }
  CHECK_THROWS_AS(parse_certificate("not a certificate"), std::invalid_argument);
}

TEST_CASE("both validators reject tampered certificates") {
  auto res = assemble_global_witness(FinFun::sqrt_indicator(), NatSet::squares(), Rat(1, 3), 2,
                                     kDeskLimits);
  REQUIRE(res.complete);

  // Raising t breaks the density claim.
  BadnessCertificate dense = res.certificate;
  dense.entries[1].t = dense.entries[1].t * 4;
  CHECK(!validate_certificate(FinFun::sqrt_indicator(), dense).valid);
  CHECK(!certificate_is_valid(FinFun::sqrt_indicator(), dense));

  // Two extra elements at the bottom overfill the 1/2-sparse prefix:
  // |A intersect [0, 3)| = 2 > 3/2.
  BadnessCertificate stuffed = res.certificate;
  auto& a = stuffed.entries[1].a;
  a.insert(a.begin(), {Nat(1), Nat(2)});
  CHECK(!validate_certificate(FinFun::sqrt_indicator(), stuffed).valid);
  CHECK(!certificate_is_valid(FinFun::sqrt_indicator(), stuffed));

  // A single in-range square below the slice start satisfies the bare
  // definition (sparsity at level 1 tolerates it), so only the library's
  // stricter slice-form validation rejects it.
  BadnessCertificate shifted = res.certificate;
  shifted.entries[1].a.insert(shifted.entries[1].a.begin(), Nat(4));
  CHECK(!validate_certificate(FinFun::sqrt_indicator(), shifted).valid);
  CHECK(certificate_is_valid(FinFun::sqrt_indicator(), shifted));

  // An out-of-order element violates ascending order.
  BadnessCertificate swapped = res.certificate;
  std::swap(swapped.entries[1].a.front(), swapped.entries[1].a.back());
  CHECK(!validate_certificate(FinFun::sqrt_indicator(), swapped).valid);
  CHECK(!certificate_is_valid(FinFun::sqrt_indicator(), swapped));

  // The valid one still passes after all that copying.
  CHECK(validate_certificate(FinFun::sqrt_indicator(), res.certificate).valid);
}

TEST_CASE("density decay: literal threshold is vacuous, effective one is not") {
  auto res = assemble_global_witness(FinFun::sqrt_indicator(), NatSet::squares(), Rat(1, 3), 3,
                                     kDeskLimits);
  REQUIRE(res.complete);
  auto decay = density_decay_check(res.certificate, Rat(1, 10));

  CHECK(decay.v == 5);                   // least v with 2^-v < 1/20
  CHECK(decay.clamped_index == 3);       // v - 1 = 4 clamps to J = 3
  CHECK(decay.degenerate_index);
  CHECK(decay.range_empty);              // s > n_J, so (s, n_J] is empty
  CHECK(decay.literal_holds);
  CHECK(decay.union_size == 65540);      // 1 + 2 + 65537
  CHECK(decay.n_final == Nat(196609) * Nat(196609) + 1);

  // The effective threshold is exact: 3/m < 1/10 first holds at m = 31 and
  // the union stays 1/10-thin from there through n_J.
  CHECK(decay.s_effective == 30);
  CHECK(decay.effective_holds);

  // Brute-force the effective claim on a window past s_effective.
  std::set<Nat> a_union;
  for (const auto& entry : res.certificate.entries)
    a_union.insert(entry.a.begin(), entry.a.end());
  Nat count = 0;
  for (Nat m = 1; m <= 2000; ++m) {
    if (a_union.count(m - 1)) ++count;
    if (m > 30) CHECK(count * 10 < m);
  }
  // ... and the bound genuinely fails at m = 30 (count 3, 3/30 == 1/10).
  CHECK(!(Nat(3) * 10 < Nat(30)));
}

TEST_CASE("membership probe: inconclusive below the needed horizon, witnessed above") {
  auto low = membership_probe(FinFun::sqrt_indicator(), NatSet::squares(), pow2(20));
  CHECK(!low.witnessed);

  auto high = membership_probe(FinFun::sqrt_indicator(), NatSet::squares(), pow2(22));
  CHECK(high.witnessed);
  CHECK(high.first_block == 8);

  // Block 7 is the exact boundary: squares fill [128, 256) at ratio
  // 4/128 == 1/32, and the input threshold is strict, so the qualifying
  // run cannot start there.
  bool saw_block7 = false;
  for (const auto& blk : high.blocks) {
    if (blk.k == 7) {
      saw_block7 = true;
      CHECK(blk.input_ratio == Rat(1, 32));
      CHECK(blk.image_ratio >= Rat(1, 4));
    }
    if (blk.k >= 8 && blk.k <= 10) {
      CHECK(blk.input_ratio < Rat(1, 32));
      CHECK(blk.image_ratio >= Rat(1, 4));
    }
  }
  CHECK(saw_block7);
}

TEST_CASE("probe ratios match brute force") {
  auto probe = membership_probe(FinFun::sqrt_indicator(), NatSet::squares(), pow2(12));
  std::set<Nat> image;
  for (Nat x = 0; x * x < pow2(12); ++x) image.insert(x);  // sqrt of each square
  for (const auto& blk : probe.blocks) {
    Nat lo = pow2(blk.k), hi = pow2(blk.k + 1);
    Nat img = 0, inp = 0;
    for (Nat v = lo; v < hi; ++v) {
      if (image.count(v)) ++img;
      if (is_square(v)) ++inp;
    }
    CHECK(blk.image_ratio == Rat(img, lo));
    CHECK(blk.input_ratio == Rat(inp, lo));
  }
}

TEST_CASE("shadow lift: shadowed values stay inside the lifted image") {
  FinFun f = FinFun::parse("x * y + 1");
  ShadowSpec spec;
  spec.permutation = {1, 0};
  spec.fixed_prefix = {Nat(6)};
  auto lift = shadow_witness_lift(f, spec, NatSet::squares(), 50);
  CHECK(lift.holds);

  FinFun g = FinFun::parse("min(x, max(y, z))");
  ShadowSpec spec3;
  spec3.permutation = {2, 0, 1};
  spec3.fixed_prefix = {Nat(3), Nat(7)};
  CHECK(shadow_witness_lift(g, spec3, NatSet::evens(), 40).holds);
}

TEST_CASE("image excision containments on the square indicator") {
  auto res = image_excision_check(FinFun::sqrt_indicator(), NatSet::squares(), 10, 1 << 12);
  CHECK(res.lower_holds);
  CHECK(res.upper_holds);
  // Excising [0, 10] removes exactly the roots 0..3 from the image.
  CHECK(res.full_image_size == 64);     // sqrt of squares below 2^12: 0..63
  CHECK(res.excised_image_size == 60);  // roots 4..63
  CHECK(res.upper_strict);

  // A constant function collapses both sides; containments hold, the
  // lower one degenerately (empty difference).
  auto flat = image_excision_check(FinFun::constant(1, 5), NatSet::evens(), 4, 100);
  CHECK(flat.lower_holds);
  CHECK(flat.upper_holds);
  CHECK(!flat.upper_strict);
}
