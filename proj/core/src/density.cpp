#include <zdclone/density.hpp>

#include <set>
#include <stdexcept>

namespace zdclone {

DensityReport upper_density_estimate(const NatSet& s, const std::vector<Nat>& horizons) {
  if (horizons.empty())
    throw std::invalid_argument("upper_density_estimate: need at least one horizon");
  if (horizons.front() == 0)
    throw std::invalid_argument("upper_density_estimate: horizons must be positive");
  for (std::size_t i = 1; i < horizons.size(); ++i) {
    if (horizons[i] <= horizons[i - 1])
      throw std::invalid_argument("upper_density_estimate: horizons must be strictly increasing");
  }

  DensityReport out;
  out.samples.reserve(horizons.size());
  for (const Nat& n : horizons) {
    Nat count = s.prefix_count(n);
    Rat ratio = Rat(count, n);
    out.samples.push_back(DensitySample{n, std::move(count), std::move(ratio)});
  }

  out.estimate = 0;
  out.argmax_horizon = out.samples.front().horizon;
  for (const DensitySample& sample : out.samples) {
    if (sample.ratio > out.estimate) {
      out.estimate = sample.ratio;
      out.argmax_horizon = sample.horizon;
    }
  }
  return out;
}

std::vector<Nat> dyadic_horizons(const Nat& horizon) {
  if (horizon == 0) throw std::invalid_argument("dyadic_horizons: horizon must be positive");
  std::vector<Nat> out;
  for (Nat n = 1; n <= horizon; n <<= 1) out.push_back(n);
  if (out.back() != horizon) out.push_back(horizon);
  return out;
}

std::vector<Rat> dyadic_block_densities(const NatSet& s, std::size_t k_max) {
  std::vector<Rat> out;
  out.reserve(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) {
    Nat lo = pow2(k);
    Nat hi = pow2(k + 1);
    out.emplace_back(s.prefix_count(hi) - s.prefix_count(lo), lo);
  }
  return out;
}

ScaleBoundResult scale_bound_check(const FinFun& f, const NatSet& a, const Rat& epsilon,
                                   const Nat& n) {
  if (f.arity() != 1) throw std::invalid_argument("scale_bound_check: function must be unary");
  if (epsilon <= 0) throw std::invalid_argument("scale_bound_check: epsilon must be positive");
  if (n == 0) throw std::invalid_argument("scale_bound_check: n must be positive");

  Nat num = boost::multiprecision::numerator(epsilon);
  Nat den = boost::multiprecision::denominator(epsilon);

  ScaleBoundResult out;
  // x < n / epsilon for integer x is exactly x < ceil(n * den / num): when
  // the quotient is integral the two bounds coincide, otherwise the ceiling
  // rounds up to the next integer, which x < q already admits.
  out.input_horizon = ceil_div(n * den, num);

  out.premise_holds = true;
  for (Nat x = 0; x < out.input_horizon; ++x) {
    if (f(x) * den < x * num) {
      out.premise_holds = false;
      out.premise_counterexample = x;
      break;
    }
  }

  std::set<Nat> image;
  std::vector<Nat> elems = a.elements_below(out.input_horizon);
  for (const Nat& x : elems) {
    Nat v = f(x);
    if (v < n) image.insert(std::move(v));
  }
  out.input_count = elems.size();
  out.image_count = image.size();
  out.image_ratio = Rat(out.image_count, n);
  out.input_ratio = Rat(out.input_count, n);
  out.bound_holds = out.image_count <= out.input_count;
  return out;
}

}  // namespace zdclone
