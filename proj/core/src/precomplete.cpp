#include <zdclone/precomplete.hpp>

#include <zdclone/density.hpp>

#include "budget_detail.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace zdclone {

namespace {

// Lazily grown ascending enumeration of a set, shared by the component
// closures of a unarization so they pool their walking work.
struct CarrierMemo {
  NatSet set;
  std::mutex mu;
  std::vector<Nat> elems;

  explicit CarrierMemo(NatSet s) : set(std::move(s)) {}

  // Element of rank r (0-based).
  Nat at(const Nat& r) {
    std::lock_guard<std::mutex> lock(mu);
    while (elems.size() <= r) {
      Nat from = elems.empty() ? Nat(0) : Nat(elems.back() + 1);
      auto next = set.next_element(from);
      if (!next)
        throw std::runtime_error("unarize: the carrier ran out of elements at rank " +
                                 to_string(Nat(elems.size())));
      elems.push_back(std::move(*next));
    }
    return elems[static_cast<std::size_t>(r)];
  }
};

}  // namespace

// --- unarization --------------------------------------------------------------

Nat box_side(std::size_t k, const Nat& index_horizon) {
  if (k == 0) throw std::invalid_argument("box_side: k must be positive");
  if (index_horizon == 0) return 0;

  auto corner_below = [k, &index_horizon](const Nat& c) {
    std::vector<Nat> corner(k, Nat(c - 1));
    return index_of_tuple(corner) < index_horizon;
  };

  // corner_below(1) always holds: the all-zero tuple has index 0.
  Nat lo = 1;
  Nat hi = 2;
  while (corner_below(hi)) {
    lo = hi;
    hi <<= 1;
  }
  while (hi - lo > 1) {
    Nat mid = (lo + hi) / 2;
    if (corner_below(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

Unarization unarize(const FinFun& g, const NatSet& a, const Nat& horizon) {
  detail::BudgetScope budget;
  std::size_t k = g.arity();

  auto memo = std::make_shared<CarrierMemo>(a);
  std::vector<Nat> below = a.elements_below(horizon);
  if (below.empty())
    throw std::invalid_argument("unarize: the carrier has no elements below the horizon");
  memo->elems = below;  // seed the shared enumeration with what we already walked

  Unarization out;
  out.k = k;
  out.carrier = a;
  out.horizon = horizon;
  out.enumerated = below.size();
  out.box = box_side(k, out.enumerated);

  for (std::size_t i = 0; i < k; ++i) {
    auto fn = [memo, set = a, i, k](const std::vector<Nat>& xs) -> Nat {
      const Nat& x = xs[0];
      if (!set.contains(x)) return 0;
      Nat rank = set.prefix_count(x);
      std::vector<Nat> coords = tuple_of_index(rank, k);
      return memo->at(coords[i]);
    };
    std::ostringstream label;
    label << "carrier-coordinate-" << (i + 1) << "-of-" << k;
    out.components.push_back(FinFun::host(1, fn, label.str()));
  }
  out.h = FinFun::compose(g, out.components);

  // Verification below the horizon: the index map is injective, covers the
  // rank box exactly, and h really is g routed through the components.
  out.verified = true;
  std::set<std::vector<Nat>> seen;
  Nat inside_box = 0;
  for (std::size_t m = 0; m < below.size(); ++m) {
    std::vector<Nat> coords = tuple_of_index(Nat(m), k);
    if (!seen.insert(coords).second) {
      out.verified = false;
      break;
    }
    bool in_box = std::all_of(coords.begin(), coords.end(),
                              [&](const Nat& c) { return c < out.box; });
    if (in_box) ++inside_box;

    std::vector<Nat> args;
    args.reserve(k);
    for (const Nat& c : coords) args.push_back(below[static_cast<std::size_t>(c)]);
    if (out.h(below[m]) != g(args)) {
      out.verified = false;
      break;
    }
  }
  if (inside_box != ipow(out.box, k)) out.verified = false;
  return out;
}

// --- large-set map --------------------------------------------------------------

namespace {

// One processed interval: the anchor n and |B intersect [0, n)|, kept so the
// map can turn a prefix count into a rank within the interval.
struct AnchorInterval {
  Nat n;
  Nat lo_count;
};

}  // namespace

LargeSetMap build_large_set_map(const NatSet& b, const Nat& e, std::size_t anchor_count,
                                const Nat& scan_horizon) {
  if (e < 2) throw std::invalid_argument("build_large_set_map: e must be at least 2");
  detail::BudgetScope budget;

  LargeSetMap out;
  out.e = e;

  auto table = std::make_shared<std::vector<AnchorInterval>>();
  Nat n = 1;
  while (table->size() < anchor_count && n <= scan_horizon) {
    Nat lo = b.prefix_count(n);
    Nat hi = b.prefix_count(e * n);
    if (hi - lo >= n) {
      table->push_back(AnchorInterval{n, lo});
      out.anchors.push_back(n);
      n = e * n + 1;  // the next interval must start past this one
    } else {
      ++n;
    }
  }
  out.complete = table->size() == anchor_count;

  auto fn = [set = b, table, e](const std::vector<Nat>& xs) -> Nat {
    const Nat& x = xs[0];
    auto it = std::upper_bound(
        table->begin(), table->end(), x,
        [](const Nat& v, const AnchorInterval& iv) { return v < iv.n; });
    if (it == table->begin()) return x;
    const AnchorInterval& iv = *std::prev(it);
    if (x >= e * iv.n) return x;          // past the half-open interval
    if (!set.contains(x)) return x;
    Nat rank = set.prefix_count(x) - iv.lo_count;
    if (rank < iv.n) return iv.n + rank;  // one of the first n elements
    return x;
  };
  out.f = FinFun::host(1, fn, "interval-fill[e=" + to_string(e) + "]");
  return out;
}

// --- onto construction ------------------------------------------------------------

namespace {

// Everything h needs per block, in a shape the closures can share.
struct BlockData {
  Nat p;     // 2^k
  Nat m;     // row base
  Nat d;     // column count
  Nat y_lo;  // least column index: 2^k - d + 1
};

// The unmodified map: the rank of (x, y) within its block when that rank is
// below 2^k, else 0.
Nat block_value(const std::vector<BlockData>& blocks, const Nat& x, const Nat& y) {
  // Find the block whose column range (which lives in (p/2, p]) holds y.
  auto it = std::lower_bound(blocks.begin(), blocks.end(), y,
                             [](const BlockData& bl, const Nat& v) { return bl.p < v; });
  if (it == blocks.end()) return 0;
  const BlockData& bl = *it;
  if (y < bl.y_lo) return 0;
  if (x < bl.m || x >= 2 * bl.m) return 0;
  Nat rank = (x - bl.m) * bl.d + (y - bl.y_lo);
  if (rank >= bl.p) return 0;
  return bl.p + rank;
}

}  // namespace

OntoConstruction build_onto_construction(const std::vector<Nat>& sequence, std::size_t k_max) {
  if (k_max == 0) throw std::invalid_argument("build_onto_construction: k_max must be positive");
  if (k_max > 24)
    throw std::invalid_argument(
        "build_onto_construction: k_max above 24 would materialise too many columns");
  for (std::size_t i = 1; i < sequence.size(); ++i) {
    if (sequence[i] <= sequence[i - 1])
      throw std::invalid_argument(
          "build_onto_construction: the anchor sequence must be strictly increasing");
  }

  OntoConstruction oc;
  oc.input_sequence = sequence;
  oc.k_max = k_max;

  oc.working_sequence.push_back(2);
  for (const Nat& v : sequence) {
    if (v <= 2) {
      ++oc.dropped_count;  // the imposed base already covers [2, 4)
      continue;
    }
    oc.working_sequence.push_back(v);
  }

  auto blocks = std::make_shared<std::vector<BlockData>>();
  std::vector<Nat> columns;
  std::vector<std::pair<Nat, Nat>> row_ranges;
  for (std::size_t k = 1; k <= k_max; ++k) {
    Nat p = pow2(k);
    auto it = std::upper_bound(oc.working_sequence.begin(), oc.working_sequence.end(), p);
    Nat m = *std::prev(it);  // exists: the base value 2 is <= 2^k for every k >= 1
    Nat d = ceil_div(p, m);
    Nat y_lo = p - d + 1;
    for (Nat y = y_lo; y <= p; ++y) columns.push_back(y);
    row_ranges.emplace_back(m, 2 * m);
    blocks->push_back(BlockData{p, m, d, y_lo});
    oc.blocks.push_back(OntoConstruction::Block{k, m, d, m});
  }

  oc.c = NatSet::intervals(std::move(row_ranges));
  oc.d = NatSet::finite(std::move(columns));

  // The designated preimage of 1: the first surplus pair (rank 2^k of the
  // lowest block with spare pairs), or the first zero pair of C x D.
  bool found = false;
  for (const BlockData& bl : *blocks) {
    if (bl.m * bl.d > bl.p) {
      oc.one_pair = {bl.m + bl.p / bl.d, bl.y_lo + bl.p % bl.d};
      oc.one_from_surplus = true;
      found = true;
      break;
    }
  }
  if (!found) {
    oc.one_from_surplus = false;
    for (const BlockData& bl : *blocks) {
      for (Nat y = bl.y_lo; y <= bl.p && !found; ++y) {
        for (auto x = oc.c.next_element(0); x && !found; x = oc.c.next_element(*x + 1)) {
          if (block_value(*blocks, *x, y) == 0) {
            oc.one_pair = {*x, y};
            found = true;
          }
        }
      }
      if (found) break;
    }
    if (!found)
      throw std::logic_error("build_onto_construction: no pair left to cover the value 1");
  }

  auto fn = [blocks, one_x = oc.one_pair.first,
             one_y = oc.one_pair.second](const std::vector<Nat>& xs) -> Nat {
    if (xs[0] == one_x && xs[1] == one_y) return 1;
    return block_value(*blocks, xs[0], xs[1]);
  };
  std::ostringstream label;
  label << "block-onto[k_max=" << k_max << "]";
  oc.h = FinFun::host(2, fn, label.str());
  return oc;
}

OntoCoverage verify_onto(const OntoConstruction& oc, const Nat& value_horizon) {
  OntoCoverage out;
  out.horizon = value_horizon;
  out.covers = true;

  std::vector<Nat> pows;
  pows.reserve(oc.k_max);
  for (const auto& bl : oc.blocks) pows.push_back(pow2(bl.k));

  for (Nat v = 0; v < value_horizon; ++v) {
    bool ok = false;
    if (v == 0) {
      // Any zero of h inside C x D will do; scan columns then rows.
      for (auto y = oc.d.next_element(0); y && !ok; y = oc.d.next_element(*y + 1)) {
        for (auto x = oc.c.next_element(0); x && !ok; x = oc.c.next_element(*x + 1)) {
          if (oc.h(*x, *y) == 0) ok = true;
        }
      }
    } else if (v == 1) {
      ok = oc.c.contains(oc.one_pair.first) && oc.d.contains(oc.one_pair.second) &&
           oc.h(oc.one_pair.first, oc.one_pair.second) == 1;
    } else {
      // v sits in [2^k, 2^{k+1}); reconstruct its pair and confirm by
      // evaluating h.
      auto it = std::upper_bound(pows.begin(), pows.end(), v);
      std::size_t idx = static_cast<std::size_t>(it - pows.begin());
      if (idx >= 1 && idx <= oc.blocks.size()) {
        const auto& bl = oc.blocks[idx - 1];
        Nat p = pows[idx - 1];
        Nat j = v - p;
        Nat x = bl.m + j / bl.d;
        Nat y = p - bl.d + 1 + j % bl.d;
        ok = oc.c.contains(x) && oc.d.contains(y) && oc.h(x, y) == v;
      }
    }
    if (!ok) {
      out.covers = false;
      out.first_missing = v;
      return out;
    }
  }
  return out;
}

ColumnSparsity verify_column_sparsity(const OntoConstruction& oc) {
  ColumnSparsity out;
  for (std::size_t k = 1; k + 1 <= oc.k_max; ++k) {
    Nat p = pow2(k);
    Nat count = oc.d.prefix_count(2 * p) - oc.d.prefix_count(p);
    const auto& next = oc.blocks[k];  // block k + 1
    out.block_ratios.emplace_back(Rat(count, p));

    bool count_ok = count == next.d;
    bool ratio_ok = Rat(count, p) <= Rat(2, next.m) + Rat(1, p);
    if (!count_ok && out.counts_match) {
      out.counts_match = false;
      if (out.first_failure_k == 0) out.first_failure_k = k;
    }
    if (!ratio_ok && out.ratio_bound_holds) {
      out.ratio_bound_holds = false;
      if (out.first_failure_k == 0) out.first_failure_k = k;
    }
  }
  return out;
}

IdealPreservation verify_onto_preserves_ideal(const OntoConstruction& oc, const NatSet& t,
                                              const Rat& eps, std::size_t k_lo,
                                              std::size_t k_hi) {
  if (eps <= 0)
    throw std::invalid_argument("verify_onto_preserves_ideal: eps must be positive");
  if (k_lo < 1 || k_lo > k_hi || k_hi > oc.k_max)
    throw std::invalid_argument("verify_onto_preserves_ideal: bad block range");
  detail::BudgetScope budget;

  Nat num = boost::multiprecision::numerator(eps);
  Nat den = boost::multiprecision::denominator(eps);

  IdealPreservation out;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    const auto& bl = oc.blocks[k - 1];
    Nat p = pow2(k);
    Nat y_lo = p - bl.d + 1;

    IdealBlockReport report;
    report.k = k;

    Nat row_count = t.prefix_count(2 * bl.m) - t.prefix_count(bl.m);
    report.row_premise = row_count * den <= bl.m * num;
    Nat col_count = t.prefix_count(p + 1) - t.prefix_count(y_lo);
    report.col_premise = col_count <= bl.d;

    std::set<Nat> values;
    for (auto x = t.next_element(bl.m); x && *x < 2 * bl.m; x = t.next_element(*x + 1)) {
      for (auto y = t.next_element(y_lo); y && *y <= p; y = t.next_element(*y + 1)) {
        values.insert(oc.h(*x, *y));
      }
    }
    report.image_count = values.size();
    report.bound = Rat(2 * p * num, den);
    report.bound_holds = report.image_count * den <= 2 * p * num;

    if (report.row_premise && report.col_premise && !report.bound_holds)
      out.all_premised_blocks_pass = false;
    out.blocks.push_back(std::move(report));
  }
  return out;
}

// --- right inverses ------------------------------------------------------------------

RightInverse right_inverse(const FinFun& t, const NatSet& z, const Nat& n_out,
                           const Nat& search_horizon) {
  if (t.arity() != 2) throw std::invalid_argument("right_inverse: t must be binary");
  detail::BudgetScope budget;

  RightInverse out;
  out.n_out = n_out;

  std::vector<Nat> zs = z.elements_below(search_horizon);
  std::map<Nat, std::pair<Nat, Nat>> hits;
  Nat found = 0;
  for (const Nat& z1 : zs) {
    if (found == n_out) break;
    for (const Nat& z2 : zs) {
      Nat v = t(z1, z2);
      if (v < n_out && hits.emplace(std::move(v), std::make_pair(z1, z2)).second) {
        ++found;
        if (found == n_out) break;
      }
    }
  }

  out.complete = found == n_out;
  if (!out.complete) {
    Nat missing = 0;
    while (hits.count(missing) != 0) ++missing;
    out.first_missing = missing;
  }

  std::map<std::vector<Nat>, Nat> table1;
  std::map<std::vector<Nat>, Nat> table2;
  for (const auto& [value, pair] : hits) {
    table1.emplace(std::vector<Nat>{value}, pair.first);
    table2.emplace(std::vector<Nat>{value}, pair.second);
  }
  out.r1 = FinFun::from_table(1, std::move(table1), 0);
  out.r2 = FinFun::from_table(1, std::move(table2), 0);
  return out;
}

// --- the pipeline -----------------------------------------------------------------------

PipelineResult run_precompleteness_pipeline(const FinFun& g, const NatSet& a,
                                            const PipelineConfig& config) {
  if (g.arity() != 1)
    throw std::invalid_argument("run_precompleteness_pipeline: g must be unary (unarize first)");
  detail::BudgetScope budget;

  PipelineResult out;

  // Stage 1: the realized image B and its density at its own horizon.
  std::set<Nat> image;
  for (const Nat& x : a.elements_below(config.enum_horizon)) image.insert(g(x));
  out.image.assign(image.begin(), image.end());
  if (out.image.empty()) {
    out.failure = "image: the carrier has no elements below the enumeration horizon";
    return out;
  }

  NatSet b = NatSet::finite(out.image);
  Nat b_horizon = out.image.back() + 1;
  out.density_estimate = upper_density_estimate(b, {b_horizon}).estimate;

  // Stage 2: the least e with estimate > 3/e, i.e. e > 3/estimate.
  Nat num = boost::multiprecision::numerator(out.density_estimate);
  Nat den = boost::multiprecision::denominator(out.density_estimate);
  out.e = 3 * den / num + 1;
  if (out.e > config.e_max) {
    out.failure = "scale: density premise unmet -- the image estimate " +
                  to_string(out.density_estimate) + " at horizon " + to_string(b_horizon) +
                  " needs e = " + to_string(out.e) + ", above the cap " +
                  to_string(config.e_max);
    return out;
  }

  out.large_map = build_large_set_map(b, out.e, config.anchor_count, config.anchor_scan_horizon);
  if (!out.large_map.complete) {
    out.failure = "large-set map: only " + to_string(Nat(out.large_map.anchors.size())) +
                  " of " + to_string(Nat(config.anchor_count)) +
                  " intervals found below the scan horizon";
    return out;
  }

  // Stage 3: the onto construction over the interval anchors.
  out.onto = build_onto_construction(out.large_map.anchors, config.k_max);

  // Stage 4: t(x, y) = h(f(g(x)), y).
  FinFun x1 = FinFun::projection(2, 0);
  FinFun x2 = FinFun::projection(2, 1);
  FinFun inner = FinFun::compose(out.large_map.f, {FinFun::compose(g, {std::move(x1)})});
  out.t = FinFun::compose(out.onto.h, {std::move(inner), std::move(x2)});

  // Stage 5: the witness set Z = A union D and a right inverse below n_out.
  out.z = NatSet::set_union(a, out.onto.d);
  out.z_count = out.z.prefix_count(config.enum_horizon);
  out.inverse = right_inverse(out.t, out.z, config.n_out, config.inverse_search_horizon);
  if (!out.inverse.complete) {
    out.failure = "right inverse: no preimage of " + to_string(out.inverse.first_missing) +
                  " below the search horizon";
    return out;
  }

  out.ok = true;
  return out;
}

GeneratedFunction generate_function(const PipelineResult& pipeline, const FinFun& u,
                                    const Nat& horizon) {
  if (!pipeline.ok)
    throw std::invalid_argument("generate_function: the pipeline did not complete");

  std::size_t m = u.arity();
  std::vector<Term> vars;
  vars.reserve(m);
  for (std::size_t i = 0; i < m; ++i) vars.push_back(Term::variable(m, i));
  Term ut = Term::apply("u", u, std::move(vars));
  Term r1t = Term::apply("r1", pipeline.inverse.r1, {ut});
  Term r2t = Term::apply("r2", pipeline.inverse.r2, {ut});
  Term composite = Term::apply("t", pipeline.t, {std::move(r1t), std::move(r2t)});

  // Largest u-value on the box, for the range report.
  Nat max_value = 0;
  if (horizon > 0) {
    std::vector<Nat> point(m, Nat(0));
    bool done = false;
    while (!done) {
      Nat v = u(point);
      if (v > max_value) max_value = v;
      done = true;  // stays true only if every coordinate rolls over
      for (std::size_t i = m; i-- > 0;) {
        if (++point[i] < horizon) {
          done = false;
          break;
        }
        point[i] = 0;
      }
    }
  }

  PrefixComparison comparison = prefix_equal(composite.to_finfun(), u, horizon);
  bool in_range = horizon == 0 || max_value < pipeline.inverse.n_out;
  return GeneratedFunction{std::move(composite), std::move(comparison), in_range,
                           std::move(max_value)};
}

}  // namespace zdclone
