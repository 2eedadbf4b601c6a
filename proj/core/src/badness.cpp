#include <zdclone/badness.hpp>

#include "budget_detail.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace zdclone {

namespace {

using detail::BudgetScope;
using detail::spend_step;

Nat rat_num(const Rat& q) { return boost::multiprecision::numerator(q); }
Nat rat_den(const Rat& q) { return boost::multiprecision::denominator(q); }

// Guard before forming 2^i: certificate levels beyond this are rejected as
// unvalidatable rather than allowed to allocate gigabyte moduli.
constexpr unsigned kMaxLevelBits = 1u << 20;

// Largest j <= n_max with |B intersect [0, j)| > j / 2^i, if any.  Scans the
// count runs of B: between consecutive elements the count is constant, so
// each run [e_c + 1, e_{c+1}] contributes violations exactly below c * 2^i.
std::optional<Nat> max_sparsity_violation(const NatSet& b, const Nat& modulus, const Nat& n_max) {
  std::optional<Nat> worst;
  if (modulus == 1) return worst;  // counts of distinct naturals never exceed j
  Nat pos = 0;
  Nat c = 0;
  while (true) {
    spend_step("scanning count runs for a sparse start");
    auto e = b.next_element(pos);
    if (c > 0) {
      Nat run_lo = pos;  // previous element + 1
      Nat run_hi = (e && *e < n_max) ? *e : n_max;
      Nat cap = c * modulus;  // violations are the j < cap
      if (cap > run_lo) {
        Nat v = std::min(run_hi, Nat(cap - 1));
        if (v >= run_lo && (!worst || v > *worst)) worst = v;
      }
    }
    if (!e || *e >= n_max) break;
    ++c;
    pos = *e + 1;
  }
  return worst;
}

// Least t in [t_min, t_max] with count(t) * den >= num * t, where count(t)
// is the number of image values below t.  The count is a step function, so
// it suffices to test the left endpoint of each constant-count range.
std::optional<Nat> least_dense_t(const std::set<Nat>& image, const Nat& t_min, const Nat& t_max,
                                 const Nat& num, const Nat& den) {
  Nat count = 0;
  auto it = image.begin();
  Nat range_lo = t_min;
  while (true) {
    // The current count stays valid for t in [range_lo, range_hi].
    Nat range_hi = (it != image.end()) ? std::min(*it, t_max) : t_max;
    if (range_lo <= range_hi && range_lo >= 1) {
      // Densities only fall as t grows within the range, so the left
      // endpoint is the only candidate.
      if (count * den >= num * range_lo) return range_lo;
    }
    if (it == image.end() || *it >= t_max) return std::nullopt;
    range_lo = std::max(range_lo, Nat(*it + 1));
    ++count;
    ++it;
  }
}

// Apply f to every k-tuple over `elems` and offer each value to `sink`.
// Tuples are generated in lexicographic order.
template <typename Fn>
void for_each_image_value(const FinFun& f, const std::vector<Nat>& elems, Fn&& sink) {
  std::size_t k = f.arity();
  if (elems.empty()) return;
  std::vector<std::size_t> idx(k, 0);
  std::vector<Nat> tuple(k, elems[0]);
  while (true) {
    spend_step("enumerating image tuples");
    sink(f(tuple));
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < elems.size()) {
        tuple[pos] = elems[idx[pos]];
        break;
      }
      idx[pos] = 0;
      tuple[pos] = elems[0];
      if (pos == 0) return;
    }
  }
}

std::string entry_prefix(std::size_t index_1based) {
  return "entry " + std::to_string(index_1based) + ": ";
}

}  // namespace

std::string to_string(WitnessFailure f) {
  switch (f) {
    case WitnessFailure::none: return "none";
    case WitnessFailure::no_sparse_start: return "no-sparse-start";
    case WitnessFailure::no_dense_t: return "no-dense-t";
    case WitnessFailure::no_stable_n: return "no-stable-n";
  }
  return "unknown";
}

// --- single-stage search ---------------------------------------------------------

WitnessSearchResult badness_from_witness(const FinFun& f, const NatSet& b, const Rat& epsilon,
                                         const Nat& i, const WitnessSearchLimits& limits,
                                         const WitnessSearchFloors& floors) {
  if (epsilon <= 0) throw std::invalid_argument("badness_from_witness: epsilon must be positive");
  if (limits.m_max > limits.n_max)
    throw std::invalid_argument("badness_from_witness: m_max must not exceed n_max");
  if (i < 0 || i > kMaxLevelBits)
    throw std::invalid_argument("badness_from_witness: level out of range");

  BudgetScope scope;
  WitnessSearchResult out;
  Nat num = rat_num(epsilon);
  Nat den = rat_den(epsilon);
  Nat modulus = pow2(i);

  // Phase m: the least start so that counting B from 0 stays 2^-i-sparse on
  // [m, n_max]; any slice of B past m is then itself 2^-i-sparse.
  Nat m = std::max(i, floors.m_floor);
  std::optional<Nat> violation = max_sparsity_violation(b, modulus, limits.n_max);
  if (violation) m = std::max(m, Nat(*violation + 1));
  if (m > limits.m_max) {
    out.failure = WitnessFailure::no_sparse_start;
    std::ostringstream msg;
    msg << "sparsity violations up to position " << *violation << " force m = " << m
        << ", beyond m_max = " << limits.m_max;
    out.detail = msg.str();
    return out;
  }

  // Phase t: epsilon-density of the image of the full available slice
  // D = B intersect [m, n_max).
  std::vector<Nat> slice;
  {
    Nat pos = m;
    while (true) {
      spend_step("collecting the witness slice");
      auto e = b.next_element(pos);
      if (!e || *e >= limits.n_max) break;
      slice.push_back(*e);
      pos = *e + 1;
    }
  }
  std::set<Nat> image;
  for_each_image_value(f, slice, [&](Nat v) {
    if (v < limits.t_max) image.insert(std::move(v));
  });
  Nat t_min = std::max({i, floors.t_floor, Nat(1)});
  std::optional<Nat> t = least_dense_t(image, t_min, limits.t_max, num, den);
  if (!t) {
    out.failure = WitnessFailure::no_dense_t;
    std::ostringstream msg;
    msg << "no t in [" << t_min << ", " << limits.t_max << "] reaches density " << num << "/"
        << den << " (distinct image values below t_max: " << image.size() << ")";
    out.detail = msg.str();
    return out;
  }

  // Phase n: grow the slice until it supplies enough image points below t.
  Nat needed = ceil_div(num * *t, den);  // least count with count * den >= num * t
  Nat n = std::max(floors.n_floor, Nat(m + 1));
  if (n > limits.n_max) {
    out.failure = WitnessFailure::no_stable_n;
    out.detail = "the floor on n already exceeds n_max";
    return out;
  }
  bool reached = false;
  if (f.arity() == 1) {
    std::set<Nat> seen;
    for (const Nat& d : slice) {
      spend_step("stabilizing the slice end");
      Nat v = f(std::vector<Nat>{d});
      if (v < *t && seen.insert(std::move(v)).second && Nat(seen.size()) >= needed) {
        n = std::max(n, Nat(d + 1));
        reached = true;
        break;
      }
    }
  } else {
    // Add elements one at a time; after each, count the image of the grown
    // prefix box below t.  Small inputs only -- the work is quadratic in
    // the slice length.
    std::set<Nat> seen;
    std::vector<Nat> prefix;
    for (const Nat& d : slice) {
      prefix.push_back(d);
      seen.clear();
      for_each_image_value(f, prefix, [&](Nat v) {
        if (v < *t) seen.insert(std::move(v));
      });
      if (Nat(seen.size()) >= needed) {
        n = std::max(n, Nat(d + 1));
        reached = true;
        break;
      }
    }
  }
  if (!reached) {
    // Cannot happen when phase t succeeded over the same slice, but guard
    // against it rather than emit an entry whose density claim is false.
    out.failure = WitnessFailure::no_stable_n;
    out.detail = "the slice never accumulated the image points counted at t";
    return out;
  }

  out.found = true;
  out.entry.i = i;
  out.entry.m = m;
  out.entry.n = n;
  out.entry.t = *t;
  for (const Nat& d : slice) {
    if (d < n) out.entry.a.push_back(d);
  }
  return out;
}

// --- chained assembly ---------------------------------------------------------------

GlobalWitnessResult assemble_global_witness(const FinFun& f, const NatSet& b, const Rat& epsilon,
                                            std::size_t stages,
                                            const WitnessSearchLimits& limits) {
  if (stages == 0) throw std::invalid_argument("assemble_global_witness: need at least 1 stage");
  GlobalWitnessResult out;
  out.certificate.function_text = f.to_text();
  out.certificate.arity = f.arity();
  out.certificate.epsilon = epsilon;

  Nat i = 0;
  WitnessSearchFloors floors;
  for (std::size_t j = 0; j < stages; ++j) {
    WitnessSearchResult stage = badness_from_witness(f, b, epsilon, i, limits, floors);
    if (!stage.found) {
      out.failure = stage.failure;
      out.detail = "stage " + std::to_string(j + 1) + " (level i = " + i.str() +
                   "): " + stage.detail;
      return out;
    }
    out.certificate.entries.push_back(stage.entry);
    out.stages_found = j + 1;
    // Next stage: level and slice floor move to this stage's n, so the new
    // sparsity modulus matches the slice boundary and the slices tile.
    i = stage.entry.n;
    floors.m_floor = stage.entry.n;
    floors.n_floor = stage.entry.n + 1;
    floors.t_floor = stage.entry.t + 1;
  }
  out.complete = true;
  return out;
}

// --- certificate validation -----------------------------------------------------------

CertificateValidation validate_certificate(const FinFun& f, const BadnessCertificate& cert) {
  CertificateValidation out;
  auto fail = [&out](std::size_t entry, std::string detail) {
    out.valid = false;
    out.failed_entry = entry;
    out.detail = std::move(detail);
    return out;
  };

  if (cert.epsilon <= 0) return fail(0, "epsilon must be positive");
  if (cert.entries.empty()) return fail(0, "certificate has no entries");
  if (cert.arity != f.arity()) return fail(0, "certificate arity does not match the function");

  Nat num = rat_num(cert.epsilon);
  Nat den = rat_den(cert.epsilon);

  BudgetScope scope;
  for (std::size_t j = 0; j < cert.entries.size(); ++j) {
    const CertificateEntry& e = cert.entries[j];
    std::size_t human = j + 1;
    if (e.i < 0 || e.i > kMaxLevelBits) return fail(human, entry_prefix(human) + "level i out of range");
    if (e.t < 1 || e.t < e.i) return fail(human, entry_prefix(human) + "t must be >= max(i, 1)");
    if (e.m < e.i) return fail(human, entry_prefix(human) + "m must be >= i");
    if (e.n <= e.m) return fail(human, entry_prefix(human) + "n must exceed m");
    if (e.a.empty()) return fail(human, entry_prefix(human) + "empty witness set");

    Nat modulus = pow2(e.i);
    for (std::size_t idx = 0; idx < e.a.size(); ++idx) {
      const Nat& a = e.a[idx];
      if (idx > 0 && a <= e.a[idx - 1])
        return fail(human, entry_prefix(human) + "witness elements not strictly ascending");
      if (a < e.m || a >= e.n)
        return fail(human, entry_prefix(human) + "element " + a.str() + " outside [m, n)");
      // Sparsity |A intersect [0, r)| <= r / 2^i peaks at r = a + 1 for each
      // element, where the count is idx + 1.
      if (Nat(idx + 1) * modulus > a + 1)
        return fail(human, entry_prefix(human) + "sparsity fails at element " + a.str());
    }

    if (j > 0) {
      const CertificateEntry& prev = cert.entries[j - 1];
      if (e.i <= prev.i) return fail(human, entry_prefix(human) + "levels must increase");
      if (e.n <= prev.n) return fail(human, entry_prefix(human) + "slice ends must increase");
      if (e.t <= prev.t) return fail(human, entry_prefix(human) + "density points must increase");
      if (e.a.front() < prev.n)
        return fail(human, entry_prefix(human) + "witness set reaches below the previous slice end");
    }

    std::set<Nat> image;
    for_each_image_value(f, e.a, [&](Nat v) {
      if (v < e.t) image.insert(std::move(v));
    });
    if (Nat(image.size()) * den < num * e.t)
      return fail(human, entry_prefix(human) + "image density " + std::to_string(image.size()) +
                             "/" + e.t.str() + " falls short of epsilon");
  }

  out.valid = true;
  out.failed_entry = 0;
  out.detail.clear();
  return out;
}

// --- density decay -----------------------------------------------------------------------

DensityDecayResult density_decay_check(const BadnessCertificate& cert, const Rat& delta) {
  if (delta <= 0) throw std::invalid_argument("density_decay_check: delta must be positive");
  if (cert.entries.empty())
    throw std::invalid_argument("density_decay_check: certificate has no entries");

  DensityDecayResult out;
  Nat num = rat_num(delta);
  Nat den = rat_den(delta);
  std::size_t stage_count = cert.entries.size();
  out.n_final = cert.entries.back().n;

  // Union of the witness slices (entries are disjoint and ascending for a
  // valid certificate; sort defensively anyway).
  std::vector<Nat> a;
  for (const CertificateEntry& e : cert.entries) a.insert(a.end(), e.a.begin(), e.a.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  out.union_size = a.size();

  // Literal rule: v with 2^-v < delta / 2, stage w = min(v - 1, J) clamped
  // into [1, J], then s with n_w / s < delta / 2.
  Nat v = 0;
  while (pow2(v) * num <= 2 * den) ++v;
  out.v = v;
  Nat w = v == 0 ? Nat(0) : Nat(v - 1);
  out.degenerate_index = (w < 1) || (w > stage_count);
  if (w < 1) w = 1;
  if (w > stage_count) w = stage_count;
  out.clamped_index = static_cast<std::size_t>(w);
  const Nat& n_w = cert.entries[out.clamped_index - 1].n;
  out.s = 2 * n_w * den / num + 1;  // least s with s * num > 2 * n_w * den
  out.range_empty = out.s >= out.n_final;

  // Shared scan: the largest m <= n_final with |A intersect [0, m)| * den
  // >= num * m.  Ratios within a constant-count run peak at the left end,
  // but the violating region is an initial segment m <= c * den / num of
  // each run, so the largest violator is its right end.
  Nat worst = 0;  // 0 = no violation anywhere
  for (std::size_t c = 1; c <= a.size(); ++c) {
    Nat run_lo = a[c - 1] + 1;
    Nat run_hi = c < a.size() ? std::min(a[c], out.n_final) : out.n_final;
    if (run_lo > run_hi) continue;
    Nat cap = Nat(c) * den / num;  // violations are the m <= cap
    if (cap >= run_lo) worst = std::max(worst, std::min(run_hi, cap));
  }

  out.literal_holds = out.range_empty || worst <= out.s;
  out.s_effective = worst;
  out.effective_holds = out.s_effective < out.n_final;
  return out;
}

// --- serialization --------------------------------------------------------------------------

std::string serialize_certificate(const BadnessCertificate& cert) {
  std::ostringstream out;
  out << "zdclone-certificate v1\n";
  out << "function: " << cert.function_text << '\n';
  out << "arity: " << cert.arity << '\n';
  out << "epsilon: " << to_string(cert.epsilon) << '\n';
  out << "entries: " << cert.entries.size() << '\n';
  for (std::size_t j = 0; j < cert.entries.size(); ++j) {
    const CertificateEntry& e = cert.entries[j];
    out << "entry: " << (j + 1) << '\n';
    out << "i: " << e.i << '\n';
    out << "m: " << e.m << '\n';
    out << "n: " << e.n << '\n';
    out << "t: " << e.t << '\n';
    out << "a-count: " << e.a.size() << '\n';
    for (std::size_t idx = 0; idx < e.a.size(); idx += 8) {
      out << "a:";
      for (std::size_t col = idx; col < std::min(idx + 8, e.a.size()); ++col)
        out << ' ' << e.a[col];
      out << '\n';
    }
  }
  return out.str();
}

namespace {

class CertificateReader {
 public:
  explicit CertificateReader(const std::string& text) : in_(text) {}

  BadnessCertificate read() {
    expect_line("zdclone-certificate v1");
    BadnessCertificate cert;
    cert.function_text = tagged("function");
    cert.arity = static_cast<std::size_t>(parse_nat(tagged("arity")));
    cert.epsilon = parse_rat(tagged("epsilon"));
    std::size_t entries = static_cast<std::size_t>(parse_nat(tagged("entries")));
    cert.entries.reserve(entries);
    for (std::size_t j = 0; j < entries; ++j) {
      if (parse_nat(tagged("entry")) != j + 1) fail("entries must be numbered consecutively");
      CertificateEntry e;
      e.i = parse_nat(tagged("i"));
      e.m = parse_nat(tagged("m"));
      e.n = parse_nat(tagged("n"));
      e.t = parse_nat(tagged("t"));
      std::size_t count = static_cast<std::size_t>(parse_nat(tagged("a-count")));
      e.a.reserve(count);
      while (e.a.size() < count) {
        std::istringstream values(tagged("a"));
        std::string token;
        while (values >> token) e.a.push_back(parse_nat(token));
      }
      if (e.a.size() != count) fail("a-count does not match the number of listed elements");
      cert.entries.push_back(std::move(e));
    }
    return cert;
  }

 private:
  std::istringstream in_;
  std::size_t line_no_ = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("certificate parse error at line " + std::to_string(line_no_) +
                                ": " + what);
  }

  std::string next_line() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      // Allow blank lines between records.
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
    }
    fail("unexpected end of input");
  }

  void expect_line(const std::string& expected) {
    if (next_line() != expected) fail("expected '" + expected + "'");
  }

  std::string tagged(const std::string& tag) {
    std::string line = next_line();
    std::string prefix = tag + ":";
    if (line.rfind(prefix, 0) != 0) fail("expected a '" + tag + ":' line");
    std::string rest = line.substr(prefix.size());
    std::size_t start = rest.find_first_not_of(' ');
    return start == std::string::npos ? std::string() : rest.substr(start);
  }
};

}  // namespace

BadnessCertificate parse_certificate(const std::string& text) {
  return CertificateReader(text).read();
}

// --- quick diagnostics ------------------------------------------------------------------------

ProbeResult membership_probe(const FinFun& f, const NatSet& a, const Nat& horizon,
                             const ProbeThresholds& thresholds) {
  if (thresholds.consecutive == 0)
    throw std::invalid_argument("membership_probe: need at least one block");
  BudgetScope scope;
  ProbeResult out;
  out.horizon = horizon;

  std::vector<Nat> elems = a.elements_below(horizon);
  std::set<Nat> image;
  for_each_image_value(f, elems, [&](Nat v) { image.insert(std::move(v)); });

  // Only blocks whose inputs were fully enumerated are meaningful.
  std::size_t run = 0;
  for (std::size_t k = 0; pow2(k + 1) <= horizon; ++k) {
    Nat lo = pow2(k);
    Nat hi = pow2(k + 1);
    Nat img_count = Nat(std::distance(image.lower_bound(lo), image.lower_bound(hi)));
    Nat in_count = a.prefix_count(hi) - a.prefix_count(lo);
    ProbeBlock block;
    block.k = k;
    block.image_ratio = Rat(img_count, lo);
    block.input_ratio = Rat(in_count, lo);
    bool qualifies =
        block.image_ratio >= thresholds.image_threshold &&
        block.input_ratio < thresholds.input_threshold;
    out.blocks.push_back(std::move(block));
    run = qualifies ? run + 1 : 0;
    if (!out.witnessed && run >= thresholds.consecutive) {
      out.witnessed = true;
      out.first_block = k + 1 - thresholds.consecutive;
    }
  }
  return out;
}

ShadowLiftResult shadow_witness_lift(const FinFun& f, const ShadowSpec& spec, const NatSet& a,
                                     const Nat& horizon) {
  BudgetScope scope;
  FinFun g = shadow(f, spec);

  std::vector<Nat> base = a.elements_below(horizon);
  std::vector<Nat> enriched = base;
  enriched.insert(enriched.end(), spec.fixed_prefix.begin(), spec.fixed_prefix.end());
  std::sort(enriched.begin(), enriched.end());
  enriched.erase(std::unique(enriched.begin(), enriched.end()), enriched.end());

  std::set<Nat> image;
  for_each_image_value(f, enriched, [&](Nat v) { image.insert(std::move(v)); });

  ShadowLiftResult out;
  if (base.empty()) return out;
  std::size_t m = g.arity();
  std::vector<std::size_t> idx(m, 0);
  std::vector<Nat> tuple(m, base[0]);
  while (true) {
    spend_step("checking lifted witnesses");
    Nat v = g(tuple);
    if (image.find(v) == image.end()) {
      out.holds = false;
      out.counterexample = tuple;
      out.value = std::move(v);
      return out;
    }
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < base.size()) {
        tuple[pos] = base[idx[pos]];
        break;
      }
      idx[pos] = 0;
      tuple[pos] = base[0];
      if (pos == 0) return out;
    }
  }
}

ExcisionResult image_excision_check(const FinFun& f, const NatSet& b, const Nat& i,
                                    const Nat& horizon) {
  if (f.arity() != 1)
    throw std::invalid_argument("image_excision_check: function must be unary");
  BudgetScope scope;

  std::set<Nat> img_full;
  std::set<Nat> img_tail;  // f[B \ [0, i]]
  for (const Nat& x : b.elements_below(horizon)) {
    spend_step("building excision images");
    Nat v = f(std::vector<Nat>{x});
    if (x > i) img_tail.insert(v);
    img_full.insert(std::move(v));
  }
  std::set<Nat> img_low;  // f[[0, i]], over all naturals up to i
  for (Nat x = 0; x <= i && x < horizon; ++x) {
    spend_step("building excision images");
    img_low.insert(f(std::vector<Nat>{x}));
  }

  ExcisionResult out;
  out.excised_image_size = img_tail.size();
  out.full_image_size = img_full.size();

  // f[B] \ f[[0,i]] within f[B \ [0,i]]:
  out.lower_holds = true;
  Nat lhs_size = 0;
  for (const Nat& v : img_full) {
    if (img_low.count(v)) continue;
    ++lhs_size;
    if (!img_tail.count(v)) out.lower_holds = false;
  }
  out.lower_strict = out.lower_holds && lhs_size < Nat(img_tail.size());

  // f[B \ [0,i]] within f[B]:
  out.upper_holds = true;
  for (const Nat& v : img_tail) {
    if (!img_full.count(v)) out.upper_holds = false;
  }
  out.upper_strict = out.upper_holds && img_tail.size() < img_full.size();
  return out;
}

}  // namespace zdclone
