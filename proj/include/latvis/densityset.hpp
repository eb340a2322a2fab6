#pragma once

// Structure of the achievable density set
//   D_n = { prod_{p | b} (1 - p^-n) : b in Z }  within  [1/zeta(n), 1]:
// greedy Euler-product approximation of a target, gap certificates
// (1 - 2^-n, prod_{p != 2} 1 - p^-n), the a_p <= sum_{q > p} a_q threshold
// with rigorous tails, the exact four-interval decomposition of the closure
// for n = 2, and value sampling for plots.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "latvis/arith.hpp"
#include "latvis/density.hpp"

namespace latvis {

// ---------------------------------------------------------------------------
// Greedy approximation
// ---------------------------------------------------------------------------

struct GreedyStep {
  uint64_t prime = 0;
  Rat partial = 1;        // exact running product after this step
  double partial_float = 1.0;
  double residual = 0.0;  // partial - target, always >= 0

  friend bool operator==(const GreedyStep&, const GreedyStep&) = default;
};

struct GreedyApproximation {
  double target = 0.0;
  Rat target_exact = 0;  // the binary value of `target`, exactly
  unsigned n = 1;
  std::vector<GreedyStep> steps;
  bool reached_exact = false;
  bool unreachable = false;           // tail product provably cannot reach down to target
  bool prime_bound_exhausted = false;
  uint64_t prime_bound = 0;

  friend bool operator==(const GreedyApproximation&, const GreedyApproximation&) = default;
};

namespace detail {

/// Rigorous lower bound on prod_{prime q > p0} (1 - q^-n), n >= 2:
/// 1 - sum_{q > p0} q^-n, with the sum capped by exact prime terms up to Q
/// plus the integral tail Q^{1-n}/(n-1).
inline double tail_product_lower_bound(unsigned n, uint64_t p0) {
  if (n < 2) return 0.0;
  const int64_t cap = 100000;
  long double s = 0.0L;
  for (int64_t q : primes_up_to(cap))
    if (uint64_t(q) > p0) s += powi_ld(1.0L / q, n);
  s += powi_ld(1.0L / cap, n - 1) / (n - 1);
  const double bound = 1.0 - static_cast<double>(s) - 1e-14;
  return std::max(bound, 0.0);
}

inline uint64_t next_prime_after(uint64_t p) {
  uint64_t q = p + 1;
  if (q <= 2) return 2;
  if (q % 2 == 0) ++q;
  while (!is_prime(q)) q += 2;
  return q;
}

}  // namespace detail

/// Greedy never-undershoot rule: each step picks the smallest prime above
/// the last one keeping the partial product >= alpha. For n = 1 any target
/// is eventually approached; for n >= 2 the run may stop early with an
/// unreachability or prime-bound flag.
inline GreedyApproximation greedy_approximate(double alpha, unsigned n, unsigned steps,
                                              uint64_t prime_bound = 1000000) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("greedy target must lie in (0, 1)");
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (steps < 1) throw std::domain_error("need at least one step");

  GreedyApproximation out;
  out.target = alpha;
  out.target_exact = Rat(alpha);
  out.n = n;
  out.prime_bound = prime_bound;

  Rat partial = 1;
  uint64_t last = 0;
  for (unsigned step = 0; step < steps; ++step) {
    if (partial == out.target_exact) {
      out.reached_exact = true;
      break;
    }
    if (n >= 2) {
      const double tail_lo = detail::tail_product_lower_bound(n, last);
      if (partial.convert_to<double>() * tail_lo > alpha * (1.0 + 1e-12)) {
        out.unreachable = true;
        break;
      }
    }
    uint64_t p = detail::next_prime_after(last);
    bool found = false;
    for (; p <= prime_bound; p = detail::next_prime_after(p)) {
      const Int pn = ipow(Int(p), n);
      const Rat candidate = partial * Rat(pn - 1, pn);
      if (candidate >= out.target_exact) {
        partial = candidate;
        last = p;
        found = true;
        break;
      }
    }
    if (!found) {
      out.prime_bound_exhausted = true;
      break;
    }
    GreedyStep gs;
    gs.prime = last;
    gs.partial = partial;
    gs.partial_float = partial.convert_to<double>();
    gs.residual = (partial - out.target_exact).convert_to<double>();
    out.steps.push_back(std::move(gs));
    if (partial == out.target_exact) out.reached_exact = true;
  }
  return out;
}

/// Companion line in R^2 for step i of an n = 1 greedy run: with
/// b_i = prod of the chosen primes through step i, the line
/// (b_i - 1) x + b_i y = b_i has visible-point density equal to the
/// partial product (the coefficients are consecutive integers, so the
/// equation is already primitive).
struct HyperplaneEquation {
  std::vector<Int> a;
  Int b;

  friend bool operator==(const HyperplaneEquation&, const HyperplaneEquation&) = default;
};

inline HyperplaneEquation hyperplane_for_approximation(const GreedyApproximation& approx, size_t step_index) {
  if (approx.n != 1) throw std::domain_error("companion hyperplanes are defined for n = 1 runs");
  if (step_index >= approx.steps.size()) throw std::out_of_range("step index out of range");
  Int b = 1;
  for (size_t i = 0; i <= step_index; ++i) b *= approx.steps[i].prime;
  return {{b - 1, b}, b};
}

// ---------------------------------------------------------------------------
// Gap certificates
// ---------------------------------------------------------------------------

/// Certified empty interval (left, right) = (1 - 2^-n, prod_{p != 2} 1 - p^-n)
/// disjoint from D_n. `right_lo` is a rigorous lower bound from a truncated
/// product with the integral tail bound; margin_lo = right_lo - left > 0 is
/// the certificate.
struct GapCertificate {
  unsigned n = 0;
  uint64_t prime = 2;
  Rat left = 0;            // 1 - 2^-n, exact
  double left_float = 0.0;
  double right_lo = 0.0;   // rigorous
  double right_hi = 0.0;   // rigorous
  double right_estimate = 0.0;
  double margin_lo = 0.0;  // rigorous
  double zeta_route = 0.0; // inv_zeta(n) / (1 - 2^-n), cross-check

  friend bool operator==(const GapCertificate&, const GapCertificate&) = default;
};

inline GapCertificate gap_certificate(unsigned n, double tol = 1e-6) {
  if (n < 2) throw std::domain_error("gap certificates exist for n >= 2");
  if (!(tol > 0)) throw std::domain_error("tolerance must be positive");

  GapCertificate out;
  out.n = n;
  const Int two_n = ipow(Int(2), n);
  out.left = Rat(two_n - 1, two_n);
  out.left_float = out.left.convert_to<double>();

  // Truncation point: integral tail P^{1-n}/(n-1) <= tol/4.
  double want = std::pow(4.0 / (tol * (n - 1)), 1.0 / (n - 1));
  const int64_t cap = 4000000;
  if (want > double(cap))
    throw std::domain_error("tolerance too tight for the truncated-product route at this n");
  const int64_t trunc = std::max<int64_t>(1000, int64_t(want) + 1);

  long double prod = 1.0L;
  size_t nfactors = 0;
  for (int64_t p : primes_up_to(trunc)) {
    if (p == 2) continue;
    prod *= 1.0L - detail::powi_ld(1.0L / p, n);
    ++nfactors;
  }
  const long double tail_sum = detail::powi_ld(1.0L / trunc, n - 1) / (n - 1);
  const double fp_slack = 4e-17 * double(nfactors + 4) * static_cast<double>(prod) + 1e-300;

  out.right_hi = static_cast<double>(prod) + fp_slack;                         // dropping factors only lowers the product
  out.right_lo = static_cast<double>(prod * (1.0L - tail_sum)) - fp_slack;
  out.right_estimate = static_cast<double>(prod * (1.0L - 0.5L * tail_sum));
  out.margin_lo = out.right_lo - std::nextafter(out.left_float, 1.0);

  out.zeta_route = inv_zeta(int(n), std::min(tol, 1e-12)) / out.left_float;
  if (std::abs(out.right_estimate - out.zeta_route) > tol)
    throw std::logic_error("truncated product and 1/zeta route disagree beyond tolerance");
  if (!(out.margin_lo > 0.0)) throw std::logic_error("gap certificate margin is not positive");
  return out;
}

// ---------------------------------------------------------------------------
// Finite-union threshold
// ---------------------------------------------------------------------------

struct PrimeCheck {
  uint64_t p = 0;
  bool pass = false;
  double lhs = 0.0;      // 1/(p^n - 1)
  double tail_lo = 0.0;  // rigorous lower bound on sum_{q > p} q^-n

  friend bool operator==(const PrimeCheck&, const PrimeCheck&) = default;
};

struct ThresholdReport {
  unsigned n = 0;
  uint64_t prime_bound = 0;
  uint64_t threshold = 0;                 // smallest prime from which every check passes
  std::vector<uint64_t> failing;          // primes whose check fails
  std::vector<uint64_t> below_threshold;  // all primes below the threshold
  std::vector<PrimeCheck> checks;

  friend bool operator==(const ThresholdReport&, const ThresholdReport&) = default;
};

/// Sufficient criterion for a_p <= sum_{q>p} a_q with a_p = -log(1 - p^-n):
/// since a_p <= 1/(p^n - 1) and sum a_q >= sum q^-n, it is enough that
/// 1/(p^n - 1) <= sum_{q>p} q^-n. The right side is bounded below by exact
/// partial sums over the sieved primes and, for p >= 17, by
/// n/(p^{n-1}(log p^{n-1} + 1)) - pi(p)/p^n with the exact pi(p).
inline ThresholdReport finite_union_threshold(unsigned n, uint64_t prime_bound) {
  if (n < 2) throw std::domain_error("the threshold criterion applies for n >= 2");
  if (prime_bound < 5) throw std::domain_error("prime bound too small");

  ThresholdReport out;
  out.n = n;
  out.prime_bound = prime_bound;

  const std::vector<int64_t> primes = primes_up_to(int64_t(prime_bound));
  std::vector<long double> suffix(primes.size() + 1, 0.0L);
  for (size_t i = primes.size(); i > 0; --i)
    suffix[i - 1] = suffix[i] + detail::powi_ld(1.0L / primes[i - 1], n);

  out.checks.reserve(primes.size());
  for (size_t i = 0; i < primes.size(); ++i) {
    const long double p = primes[i];
    PrimeCheck chk;
    chk.p = uint64_t(primes[i]);
    const long double pn = detail::powi_ld(p, n);
    chk.lhs = static_cast<double>(1.0L / (pn - 1.0L));
    long double lo = suffix[i + 1] * (1.0L - 1e-15L);
    if (primes[i] >= 17) {
      const long double pi_p = i + 1;  // exact prime count from the sieve
      const long double hopf =
          n / (detail::powi_ld(p, n - 1) * (std::log((long double)detail::powi_ld(p, n - 1)) + 1.0L)) - pi_p / pn;
      lo = std::max(lo, hopf * (1.0L - 1e-15L));
    }
    chk.tail_lo = static_cast<double>(lo);
    chk.pass = chk.lhs <= chk.tail_lo;
    out.checks.push_back(chk);
  }

  uint64_t last_fail = 0;
  for (const auto& chk : out.checks)
    if (!chk.pass) {
      out.failing.push_back(chk.p);
      last_fail = chk.p;
    }
  out.threshold = last_fail == 0 ? 2 : detail::next_prime_after(last_fail);
  for (const auto& chk : out.checks)
    if (chk.p < out.threshold) out.below_threshold.push_back(chk.p);
  return out;
}

// ---------------------------------------------------------------------------
// Interval decomposition of the closure
// ---------------------------------------------------------------------------

/// Exact endpoint descriptor: coeff * (1/zeta(zeta_arg))^zeta_power with
/// zeta_power in {0, 1}; a pure rational has zeta_power = 0.
struct IntervalEndpoint {
  Rat coeff = 0;
  unsigned zeta_power = 0;
  unsigned zeta_arg = 0;
  double value = 0.0;

  friend bool operator==(const IntervalEndpoint&, const IntervalEndpoint&) = default;
};

struct DensityInterval {
  IntervalEndpoint lo, hi;

  friend bool operator==(const DensityInterval&, const DensityInterval&) = default;
};

struct IntervalUnion {
  unsigned n = 0;
  bool certified = false;
  std::string note;
  std::vector<DensityInterval> intervals;  // sorted, pairwise disjoint when certified

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;
};

/// Closure decomposition built from the proof recipe: the primes below the
/// finite-union threshold are optional factors; every subset S of them
/// contributes the interval
///   [ prod_S (1 - p^-n) * prod_{p >= threshold} (1 - p^-n),  prod_S (1 - p^-n) ].
/// For n = 2 the threshold is 5 and the four resulting intervals are the
/// exact closure; for other n the output is a conjecture and is labelled
/// non-certified.
inline IntervalUnion dn_intervals(unsigned n, uint64_t prime_bound = 100000) {
  const ThresholdReport thr = finite_union_threshold(n, prime_bound);
  const std::vector<uint64_t>& below = thr.below_threshold;
  if (below.size() > 20) throw std::domain_error("too many below-threshold primes for subset construction");

  // prod_{p >= threshold} (1 - p^-n) = inv_zeta(n) / prod_{p < threshold} (1 - p^-n).
  Rat head = 1;
  for (uint64_t p : below) {
    const Int pn = ipow(Int(p), n);
    head *= Rat(pn - 1, pn);
  }
  const double invz = inv_zeta(int(n), 1e-13);

  IntervalUnion out;
  out.n = n;
  std::vector<DensityInterval> raw;
  for (uint64_t mask = 0; mask < (uint64_t(1) << below.size()); ++mask) {
    Rat sub = 1;
    for (size_t i = 0; i < below.size(); ++i)
      if (mask & (uint64_t(1) << i)) {
        const Int pn = ipow(Int(below[i]), n);
        sub *= Rat(pn - 1, pn);
      }
    DensityInterval iv;
    iv.lo = {sub / head, 1, n, (sub / head).convert_to<double>() * invz};
    iv.hi = {sub, 0, 0, sub.convert_to<double>()};
    raw.push_back(std::move(iv));
  }
  std::sort(raw.begin(), raw.end(),
            [](const DensityInterval& a, const DensityInterval& b) { return a.lo.value < b.lo.value; });

  // Merge overlaps (cannot occur for n = 2).
  for (auto& iv : raw) {
    if (!out.intervals.empty() && iv.lo.value <= out.intervals.back().hi.value + 1e-13) {
      if (iv.hi.value > out.intervals.back().hi.value) out.intervals.back().hi = iv.hi;
    } else {
      out.intervals.push_back(iv);
    }
  }

  if (n == 2) {
    if (out.intervals.size() != 4) throw std::logic_error("closure decomposition for n = 2 must have 4 intervals");
    out.certified = true;
  } else {
    out.certified = false;
    out.note = "heuristic: first-gap subset construction applied without full verification";
  }
  return out;
}

inline IntervalUnion d2_intervals() { return dn_intervals(2); }

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct SampleEntry {
  Int b = 1;                    // squarefree product of the prime set
  std::vector<uint64_t> primes;
  Rat value = 1;
  double value_float = 1.0;

  friend bool operator==(const SampleEntry&, const SampleEntry&) = default;
};

/// All densities prod_{p in S} (1 - p^-n) over subsets S of the primes up
/// to prime_bound, sorted ascending by exact value (ties by b). One entry
/// per prime set; b is its squarefree product.
inline std::vector<SampleEntry> dn_sample(unsigned n, uint64_t prime_bound, unsigned max_primes = 20) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (prime_bound < 2) throw std::domain_error("prime bound must be >= 2");
  const std::vector<int64_t> primes = primes_up_to(int64_t(prime_bound));
  if (primes.size() > max_primes)
    throw std::domain_error("prime bound admits " + std::to_string(primes.size()) + " primes, above the max_primes guard of " +
                            std::to_string(max_primes) + "; raise max_primes or lower the prime bound");

  std::vector<SampleEntry> out;
  out.reserve(size_t(1) << primes.size());
  SampleEntry cur;
  // Depth-first over prime subsets, sharing partial products.
  auto rec = [&](auto&& self, size_t idx) -> void {
    if (idx == primes.size()) {
      out.push_back(cur);
      return;
    }
    self(self, idx + 1);
    const uint64_t p = uint64_t(primes[idx]);
    const Int pn = ipow(Int(p), n);
    SampleEntry saved = cur;
    cur.b *= p;
    cur.primes.push_back(p);
    cur.value *= Rat(pn - 1, pn);
    cur.value_float = cur.value.convert_to<double>();
    self(self, idx + 1);
    cur = std::move(saved);
  };
  rec(rec, 0);

  std::sort(out.begin(), out.end(), [](const SampleEntry& a, const SampleEntry& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.b < b.b;
  });
  return out;
}

}  // namespace latvis
