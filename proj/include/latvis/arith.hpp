#pragma once

// Number-theoretic primitives: factorization, Mobius functions (classical
// and order-k), the Jordan totient, finite Euler products and 1/zeta(t).
//
// Everything exact runs on arbitrary-precision integers/rationals; floating
// point appears only as a derived view with an explicit error bound.
// Factoring is deterministic trial division with a 2-3-5 wheel; inputs are
// expected at desk scale (|b| < 2^64), not cryptographic scale.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace latvis {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline int64_t to_i64(const Int& v, const char* what = "value") {
  if (v < std::numeric_limits<int64_t>::min() || v > std::numeric_limits<int64_t>::max())
    throw std::overflow_error(std::string(what) + " does not fit in a 64-bit integer");
  return v.convert_to<int64_t>();
}

inline Int ipow(Int base, unsigned e) {
  Int r = 1;
  while (e) {
    if (e & 1u) r *= base;
    base *= base;
    e >>= 1u;
  }
  return r;
}

/// Primes in [2, n] by plain sieve of Eratosthenes.
inline std::vector<int64_t> primes_up_to(int64_t n) {
  std::vector<int64_t> out;
  if (n < 2) return out;
  std::vector<bool> composite(static_cast<size_t>(n) + 1, false);
  for (int64_t p = 2; p <= n; ++p) {
    if (composite[static_cast<size_t>(p)]) continue;
    out.push_back(p);
    for (int64_t q = p * p; q <= n; q += p) composite[static_cast<size_t>(q)] = true;
  }
  return out;
}

/// Deterministic trial-division primality check (desk scale).
inline bool is_prime(uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  if (n % 3 == 0) return n == 3;
  for (uint64_t p = 5; p <= n / p; p += 6) {
    if (n % p == 0) return false;
    if (n % (p + 2) == 0) return false;
  }
  return true;
}

struct PrimePower {
  uint64_t prime = 0;
  unsigned exponent = 0;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime-exponent decomposition of a nonzero integer. The sign of `value`
/// is retained; the factor list describes |value| with primes strictly
/// increasing and exponents >= 1, so the product of prime^exponent is |value|.
struct Factorization {
  int64_t value = 1;
  std::vector<PrimePower> factors;
};

inline Factorization factorize(int64_t b) {
  if (b == 0) throw std::domain_error("zero has no factorization");
  Factorization f;
  f.value = b;
  uint64_t m = b < 0 ? uint64_t(-(b + 1)) + 1u : uint64_t(b);
  auto strip = [&](uint64_t p) {
    if (m % p != 0) return;
    unsigned e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    f.factors.push_back({p, e});
  };
  strip(2);
  strip(3);
  for (uint64_t p = 5; p <= m / p; p += 6) {
    strip(p);
    strip(p + 2);
  }
  if (m > 1) f.factors.push_back({m, 1});
  return f;
}

/// All divisors of |b|, ascending.
inline std::vector<uint64_t> divisors(int64_t b) {
  std::vector<uint64_t> ds{1};
  for (const auto& pp : factorize(b).factors) {
    const size_t base = ds.size();
    uint64_t q = 1;
    for (unsigned e = 1; e <= pp.exponent; ++e) {
      q *= pp.prime;
      for (size_t i = 0; i < base; ++i) ds.push_back(ds[i] * q);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

inline int mobius(int64_t d) {
  if (d <= 0) throw std::domain_error("mobius requires a positive argument");
  const auto f = factorize(d);
  for (const auto& pp : f.factors)
    if (pp.exponent > 1) return 0;
  return f.factors.size() % 2 == 0 ? 1 : -1;
}

/// Floor of the k-th root of x, exact (no floating-point classification).
inline uint64_t kth_root_floor(uint64_t x, unsigned k) {
  if (k == 0) throw std::domain_error("kth_root_floor requires k >= 1");
  if (k == 1 || x <= 1) return x;
  auto pow_fits = [&](uint64_t m) {  // m^k <= x ?
    uint64_t r = 1;
    for (unsigned i = 0; i < k; ++i) {
      if (r > x / m) return false;
      r *= m;
    }
    return r <= x;
  };
  uint64_t lo = 1, hi = 2;
  while (pow_fits(hi)) {
    lo = hi;
    if (hi > std::numeric_limits<uint64_t>::max() / 2) break;
    hi *= 2;
  }
  while (lo < hi) {
    const uint64_t mid = lo + (hi - lo + 1) / 2;
    if (pow_fits(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

/// Order-k Mobius function: mu_k(d) = mu(m) when d = m^k, else 0.
/// mu_1 coincides with the classical Mobius function. (This is not
/// Apostol's "Mobius function of order k".)
inline int mobius_k(unsigned k, int64_t d) {
  if (k < 1) throw std::domain_error("mobius_k requires k >= 1");
  if (d <= 0) throw std::domain_error("mobius_k requires a positive argument");
  if (k == 1) return mobius(d);
  const uint64_t m = kth_root_floor(static_cast<uint64_t>(d), k);
  uint64_t mk = 1;
  for (unsigned i = 0; i < k; ++i) mk *= m;  // cannot overflow: m^k <= d
  if (mk != static_cast<uint64_t>(d)) return 0;
  return mobius(static_cast<int64_t>(m));
}

/// Jordan totient J_n(b): the number of n-tuples in [0, b-1]^n whose gcd
/// together with b is 1. Computed multiplicatively as
/// prod p^{n(e-1)} (p^n - 1) over the prime powers p^e || b.
inline Int jordan_totient(unsigned n, int64_t b) {
  if (n < 1) throw std::domain_error("jordan_totient requires n >= 1");
  if (b < 1) throw std::domain_error("jordan_totient requires b >= 1");
  Int j = 1;
  for (const auto& pp : factorize(b).factors) {
    const Int pn = ipow(Int(pp.prime), n);
    j *= ipow(Int(pp.prime), n * (pp.exponent - 1)) * (pn - 1);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Density values
// ---------------------------------------------------------------------------

/// A two-sided enclosure of a real number. `lo`/`hi` carry a small
/// floating-point cushion so the interval is safe to use in one-sided
/// certificates at tolerances down to ~1e-13.
struct RealBounds {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

namespace detail {
inline long double powi_ld(long double x, unsigned e) {
  long double r = 1.0L;
  while (e) {
    if (e & 1u) r *= x;
    x *= x;
    e >>= 1u;
  }
  return r;
}
}  // namespace detail

/// Encloses zeta(t) for t >= 2 by truncated summation plus the integral
/// sandwich on the tail: int_{N+1}^inf x^-t dx <= tail <= int_N^inf x^-t dx.
/// The bounds carry a cushion covering worst-case long-double accumulation,
/// so tolerances below ~1e-12 (at t = 2) are not reachable.
inline RealBounds zeta_enclosure(int t, double tol = 1e-12) {
  if (t < 2) throw std::domain_error("zeta_enclosure requires t >= 2");
  double n_target = std::pow(2.0 / std::max(tol, 1e-14), 1.0 / t);
  int64_t n = static_cast<int64_t>(std::clamp(n_target, 16.0, 8.0e6)) + 1;
  long double s = 0.0L;
  for (int64_t kk = n; kk >= 1; --kk) s += detail::powi_ld(1.0L / kk, static_cast<unsigned>(t));
  const long double tail_lo = detail::powi_ld(1.0L / (n + 1), static_cast<unsigned>(t - 1)) / (t - 1);
  const long double tail_hi = detail::powi_ld(1.0L / n, static_cast<unsigned>(t - 1)) / (t - 1);
  // 1.08e-19 per long-double op, ~(t+1) ops per term, plus double conversions
  const double slack = (1.1e-19 * double(t + 1) * static_cast<double>(n) + 4e-16) * static_cast<double>(s);
  return {static_cast<double>(s + tail_lo) - slack, static_cast<double>(s + tail_hi) + slack};
}

/// Enclosure of 1/zeta(t), t >= 2.
inline RealBounds inv_zeta_enclosure(int t, double tol = 1e-12) {
  const RealBounds z = zeta_enclosure(t, tol);
  const double slack = 1e-15;
  return {1.0 / z.hi - slack, 1.0 / z.lo + slack};
}

/// 1/zeta(t) within tol. 1/zeta(1) is defined as 0 (the harmonic series
/// diverges; this matches the density of visible points on a line through
/// the origin).
inline double inv_zeta(int t, double tol = 1e-12) {
  if (t <= 0) throw std::domain_error("inv_zeta requires t >= 1");
  if (t == 1) return 0.0;
  return inv_zeta_enclosure(t, tol).mid();
}

/// The universal output of the exact density engine: either a finite Euler
/// product prod_{p in primes} (1 - p^-t), held as an exact rational in
/// lowest terms, or the symbolic value 1/zeta(t) (whose numeric view is
/// computed on demand; argument 1 means exactly 0).
struct DensityValue {
  enum class Kind { FiniteProduct, InverseZeta };

  Kind kind = Kind::FiniteProduct;
  std::vector<uint64_t> primes;  // FiniteProduct: sorted distinct primes
  unsigned exponent = 1;         // FiniteProduct: the t in (1 - p^-t)
  unsigned zeta_argument = 0;    // InverseZeta: the t in 1/zeta(t)
  Rat value = 1;                 // FiniteProduct: exact value; InverseZeta: 0

  static DensityValue finite_product(std::vector<uint64_t> ps, unsigned t) {
    if (t < 1) throw std::domain_error("finite-product exponent must be >= 1");
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    DensityValue v;
    v.kind = Kind::FiniteProduct;
    v.exponent = t;
    Rat prod = 1;
    for (uint64_t p : ps) {
      const Int pt = ipow(Int(p), t);
      prod *= Rat(pt - 1, pt);
    }
    v.value = prod;
    v.primes = std::move(ps);
    return v;
  }

  static DensityValue inverse_zeta(unsigned t) {
    if (t < 1) throw std::domain_error("inverse-zeta argument must be >= 1");
    DensityValue v;
    v.kind = Kind::InverseZeta;
    v.exponent = 0;
    v.zeta_argument = t;
    v.value = 0;
    return v;
  }

  static DensityValue exact_one() { return finite_product({}, 1); }
  static DensityValue exact_zero() { return inverse_zeta(1); }

  bool is_exact() const { return kind == Kind::FiniteProduct || zeta_argument == 1; }

  Rat exact_value() const {
    if (kind == Kind::FiniteProduct) return value;
    if (zeta_argument == 1) return 0;
    throw std::domain_error("1/zeta(t) with t >= 2 has no exact rational value");
  }

  double numeric(double tol = 1e-12) const {
    if (kind == Kind::FiniteProduct) return value.convert_to<double>();
    return inv_zeta(static_cast<int>(zeta_argument), tol);
  }

  friend bool operator==(const DensityValue&, const DensityValue&) = default;
};

/// Finite version of the Euler product driven by the order-k Mobius sieve:
///   sum_{d | b} mu_k(d) / d^t  =  prod_{p^k | b} (1 - p^{-kt})    (b != 0)
/// For b = 0 the product runs over all primes and equals 1/zeta(kt).
/// |b| = 1 yields the empty product, exactly 1.
inline DensityValue euler_product(unsigned k, unsigned t, const Int& b) {
  if (k < 1 || t < 1) throw std::domain_error("euler_product requires k >= 1 and t >= 1");
  if (b == 0) return DensityValue::inverse_zeta(k * t);
  const Int ab = abs(b);
  if (ab == 1) return DensityValue::finite_product({}, k * t);
  const auto f = factorize(to_i64(ab, "euler_product operand"));
  std::vector<uint64_t> ps;
  for (const auto& pp : f.factors)
    if (pp.exponent >= k) ps.push_back(pp.prime);
  return DensityValue::finite_product(std::move(ps), k * t);
}

}  // namespace latvis
