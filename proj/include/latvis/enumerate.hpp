#pragma once

// Brute-force lattice enumeration: all integral points of a hyperplane
// intersection inside [-r,r]^n, sieve counts (visible / coprime-to-b /
// k-free), convergence traces against the exact engine, and the
// box-count lower bound check.
//
// Points are walked as p + sum_j c_j v_j over a column-echelon reduction of
// the null-space basis, so every coefficient range is pinned by its pivot
// row and the walk is exactly the box slice, in lexicographic (c_1, c_2,
// ...) order. Counting partitions by the outermost coefficient; tallies are
// integers, so partitioned totals are identical to sequential ones.

#include <cstdlib>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "latvis/arith.hpp"
#include "latvis/density.hpp"
#include "latvis/intlinalg.hpp"

namespace latvis {

namespace detail {

inline int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

inline int64_t ceil_div(int64_t a, int64_t b) { return -floor_div(-a, b); }

inline uint64_t sat_pow_u64(uint64_t base, unsigned e) {
  uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (base != 0 && r > std::numeric_limits<uint64_t>::max() / base)
      return std::numeric_limits<uint64_t>::max();
    r *= base;
  }
  return r;
}

inline uint64_t u_abs(int64_t v) { return v < 0 ? uint64_t(-(v + 1)) + 1u : uint64_t(v); }

}  // namespace detail

inline unsigned thread_count_from_env() {
  if (const char* env = std::getenv("LATVIS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 64) return unsigned(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : std::min(hw, 16u);
}

/// Walks the integral points of an affine sublattice restricted to boxes.
/// Built once per system; enumeration itself is allocation-free per point.
class LatticeEnumerator {
 public:
  explicit LatticeEnumerator(const HyperplaneSystem& sys) : n_(sys.ambient_dim()) {
    p_.reserve(size_t(n_));
    for (const Int& v : sys.base_point) p_.push_back(to_i64(v, "base point coordinate"));

    auto nb = nullspace_basis(sys.a);
    rank_ = nb.rank;
    std::vector<std::vector<Int>> cols = std::move(nb.vectors);

    // Column-echelon reduction (unimodular column ops; the lattice spanned
    // is unchanged). Afterwards column j has its topmost nonzero entry at
    // pivot_row_[j], pivot rows strictly increasing, and all later columns
    // vanish on earlier pivot rows.
    const int ncols = int(cols.size());
    int j = 0;
    for (int row = 0; row < n_ && j < ncols; ++row) {
      for (;;) {
        int best = -1;
        Int best_abs;
        for (int l = j; l < ncols; ++l) {
          if (cols[size_t(l)][size_t(row)] == 0) continue;
          Int m = abs(cols[size_t(l)][size_t(row)]);
          if (best < 0 || m < best_abs) {
            best_abs = m;
            best = l;
          }
        }
        if (best < 0) break;  // no pivot in this row
        std::swap(cols[size_t(j)], cols[size_t(best)]);
        bool clean = true;
        for (int l = j + 1; l < ncols; ++l) {
          Int& e = cols[size_t(l)][size_t(row)];
          if (e == 0) continue;
          const Int q = e / cols[size_t(j)][size_t(row)];
          if (q != 0)
            for (int i = 0; i < n_; ++i) cols[size_t(l)][size_t(i)] -= q * cols[size_t(j)][size_t(i)];
          if (cols[size_t(l)][size_t(row)] != 0) clean = false;
        }
        if (clean) {
          pivot_row_.push_back(row);
          ++j;
          break;
        }
      }
    }
    if (j != ncols) throw std::logic_error("null-space basis failed to echelonize");

    cols_.resize(size_t(ncols));
    for (int l = 0; l < ncols; ++l) {
      cols_[size_t(l)].reserve(size_t(n_));
      for (int i = 0; i < n_; ++i) cols_[size_t(l)].push_back(to_i64(cols[size_t(l)][size_t(i)], "basis entry"));
    }
    std::vector<bool> is_pivot(size_t(n_), false);
    for (int pr : pivot_row_) is_pivot[size_t(pr)] = true;
    for (int i = 0; i < n_; ++i)
      if (!is_pivot[size_t(i)]) nonpivot_rows_.push_back(i);
  }

  int ambient() const { return n_; }
  int rank() const { return rank_; }
  int free_dims() const { return int(cols_.size()); }

  /// Range of the outermost coefficient at radius r; lo > hi when empty.
  std::pair<int64_t, int64_t> outer_range(int64_t r) const {
    if (free_dims() == 0) return {0, 0};
    return coeff_range(p_[size_t(pivot_row_[0])], cols_[0][size_t(pivot_row_[0])], r);
  }

  /// Visits every point of the sublattice in [-r,r]^n once. The visitor
  /// returns false to stop early; enumerate returns false iff stopped.
  template <class F>
  bool enumerate(int64_t r, F&& f) const {
    const auto range = outer_range(r);
    return enumerate_chunk(r, range.first, range.second, std::forward<F>(f));
  }

  /// Same, with the outermost coefficient restricted to [c_lo, c_hi]
  /// (already intersected with outer_range by the caller).
  template <class F>
  bool enumerate_chunk(int64_t r, int64_t c_lo, int64_t c_hi, F&& f) const {
    if (r < 0) return true;
    check_radius(r);
    std::vector<int64_t> x = p_;
    if (free_dims() == 0) {
      for (int i = 0; i < n_; ++i)
        if (detail::u_abs(x[size_t(i)]) > uint64_t(r)) return true;
      return f(static_cast<const std::vector<int64_t>&>(x));
    }
    if (c_lo > c_hi) return true;
    add_mul(x, cols_[0], c_lo);
    bool alive = true;
    for (int64_t c = c_lo; alive && c <= c_hi; ++c) {
      alive = walk(1, r, x, f);
      if (c < c_hi) add_mul(x, cols_[0], 1);
    }
    return alive;
  }

  bool empty(int64_t r) const {
    bool found = false;
    enumerate(r, [&](const std::vector<int64_t>&) {
      found = true;
      return false;
    });
    return !found;
  }

  /// Smallest box half-width whose slice contains an integral point
  /// (0 when the base point is the origin / the system is R^n).
  int64_t min_enclosing_radius() const {
    int64_t hi = 0;
    for (int64_t v : p_) hi = std::max<int64_t>(hi, int64_t(detail::u_abs(v)));
    if (free_dims() == 0 || hi == 0) return hi;
    int64_t lo = 0;
    while (lo < hi) {  // nonemptiness is monotone in r
      const int64_t mid = lo + (hi - lo) / 2;
      if (empty(mid))
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

 private:
  template <class F>
  bool walk(int level, int64_t r, std::vector<int64_t>& x, F& f) const {
    if (level == free_dims()) {
      for (int i : nonpivot_rows_)
        if (detail::u_abs(x[size_t(i)]) > uint64_t(r)) return true;
      return f(static_cast<const std::vector<int64_t>&>(x));
    }
    const std::vector<int64_t>& col = cols_[size_t(level)];
    const int prow = pivot_row_[size_t(level)];
    const auto [c_lo, c_hi] = coeff_range(x[size_t(prow)], col[size_t(prow)], r);
    if (c_lo > c_hi) return true;
    add_mul(x, col, c_lo);
    int64_t applied = c_lo;
    bool alive = true;
    for (int64_t c = c_lo; c <= c_hi; ++c) {
      alive = walk(level + 1, r, x, f);
      if (!alive) break;
      if (c < c_hi) {
        add_mul(x, col, 1);
        ++applied;
      }
    }
    add_mul(x, col, -applied);
    return alive;
  }

  static std::pair<int64_t, int64_t> coeff_range(int64_t w, int64_t g, int64_t r) {
    if (g > 0) return {detail::ceil_div(-r - w, g), detail::floor_div(r - w, g)};
    return {detail::ceil_div(r - w, g), detail::floor_div(-r - w, g)};
  }

  static void add_mul(std::vector<int64_t>& x, const std::vector<int64_t>& col, int64_t c) {
    if (c == 0) return;
    for (size_t i = 0; i < x.size(); ++i) x[i] += c * col[i];
  }

  // Conservative exact bound on every intermediate coordinate; rejects
  // radii that could overflow the int64 walk.
  void check_radius(int64_t r) const {
    std::vector<Int> rowbound(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) rowbound[size_t(i)] = abs(Int(p_[size_t(i)]));
    for (int j = 0; j < free_dims(); ++j) {
      const int prow = pivot_row_[size_t(j)];
      const Int cmax = (Int(r) + rowbound[size_t(prow)]) / abs(Int(cols_[size_t(j)][size_t(prow)])) + 1;
      for (int i = 0; i < n_; ++i) rowbound[size_t(i)] += cmax * abs(Int(cols_[size_t(j)][size_t(i)]));
    }
    const Int limit = Int(std::numeric_limits<int64_t>::max()) / 2;
    for (int i = 0; i < n_; ++i)
      if (rowbound[size_t(i)] > limit)
        throw std::overflow_error("box radius too large: enumeration coordinates would overflow");
  }

  int n_;
  int rank_ = 0;
  std::vector<int64_t> p_;
  std::vector<std::vector<int64_t>> cols_;  // echelonized null-space basis columns
  std::vector<int> pivot_row_;
  std::vector<int> nonpivot_rows_;
};

/// Materialized point list (test/CLI convenience; prefer the visitor form
/// for big boxes).
template <class F>
bool for_each_point(const HyperplaneSystem& sys, int64_t r, F&& f) {
  if (r < 1) throw std::domain_error("box radius must be >= 1");
  return LatticeEnumerator(sys).enumerate(r, std::forward<F>(f));
}

inline std::vector<std::vector<int64_t>> enumerate_points(const HyperplaneSystem& sys, int64_t r) {
  std::vector<std::vector<int64_t>> out;
  for_each_point(sys, r, [&](const std::vector<int64_t>& x) {
    out.push_back(x);
    return true;
  });
  return out;
}

/// One box tally: total integral points, points passing the sieve, and the
/// exact ratio. The sieve is k-visibility, or k-free relative to b when b
/// is given (b = 0 is recorded but means plain k-visibility).
struct BoxCount {
  int64_t r = 0;
  uint64_t total = 0;
  uint64_t hits = 0;
  Rat ratio = 0;
  double ratio_float = 0.0;
  unsigned k = 1;
  std::optional<int64_t> b;

  friend bool operator==(const BoxCount&, const BoxCount&) = default;
};

inline BoxCount count_sieved(const HyperplaneSystem& sys, int64_t r, unsigned k,
                             std::optional<int64_t> b = std::nullopt, unsigned threads = 0) {
  if (r < 1) throw std::domain_error("box radius must be >= 1");
  if (k < 1) throw std::domain_error("k must be >= 1");
  const LatticeEnumerator en(sys);

  const bool use_b = b.has_value() && *b != 0;
  const uint64_t ab = use_b ? detail::u_abs(*b) : 0;

  // Sieve-relevant prime powers q^k | b for the direct test, and the
  // divisors d | b with mu_k(d) != 0 for the Mobius-sum route.
  std::vector<uint64_t> qpow;
  std::vector<std::pair<uint64_t, int>> mobius_divisors;
  if (use_b) {
    for (const auto& pp : factorize(int64_t(ab)).factors)
      if (pp.exponent >= k) qpow.push_back(detail::sat_pow_u64(pp.prime, k));
    for (uint64_t d : divisors(int64_t(ab))) {
      const int mu = mobius_k(k, int64_t(d));
      if (mu != 0) mobius_divisors.emplace_back(d, mu);
    }
  }

  // k-visibility table for k >= 2: g in [0, r] marked true iff no q^k | g.
  std::vector<uint8_t> kfree;
  if (!use_b && k >= 2) {
    kfree.assign(size_t(r) + 1, 1);
    kfree[0] = 0;
    for (int64_t q : primes_up_to(int64_t(kth_root_floor(uint64_t(r), k)))) {
      const uint64_t qk = detail::sat_pow_u64(uint64_t(q), k);
      for (uint64_t mlt = qk; mlt <= uint64_t(r); mlt += qk) kfree[size_t(mlt)] = 0;
    }
  }

  struct Tally {
    uint64_t total = 0;
    uint64_t hits = 0;
    int64_t sieve_sum = 0;
  };

  auto visit_tally = [&](const std::vector<int64_t>& x, Tally& t) {
    ++t.total;
    uint64_t g = 0;
    for (int64_t v : x) {
      g = std::gcd(g, detail::u_abs(v));
      if (g == 1) break;
    }
    if (use_b) {
      const uint64_t h = std::gcd(g, ab);
      bool hit = true;
      for (uint64_t q : qpow)
        if (h % q == 0) {
          hit = false;
          break;
        }
      if (hit) ++t.hits;
      for (const auto& [d, mu] : mobius_divisors)
        if (g % d == 0) t.sieve_sum += mu;
    } else {
      if (k == 1 ? (g == 1) : (g <= uint64_t(r) && kfree[size_t(g)] != 0)) ++t.hits;
    }
    return true;
  };

  std::vector<Tally> tallies;
  const auto range = en.outer_range(r);
  unsigned nthreads = threads == 0 ? thread_count_from_env() : threads;
  const int64_t span = en.free_dims() == 0 || range.first > range.second ? 0 : range.second - range.first + 1;
  if (nthreads <= 1 || span < 4 * int64_t(nthreads)) {
    tallies.resize(1);
    en.enumerate(r, [&](const std::vector<int64_t>& x) { return visit_tally(x, tallies[0]); });
  } else {
    tallies.resize(nthreads);
    std::vector<std::thread> pool;
    for (unsigned ti = 0; ti < nthreads; ++ti) {
      const int64_t lo = range.first + span * ti / nthreads;
      const int64_t hi = range.first + span * (ti + 1) / nthreads - 1;
      pool.emplace_back([&, ti, lo, hi] {
        en.enumerate_chunk(r, lo, hi, [&, ti](const std::vector<int64_t>& x) { return visit_tally(x, tallies[ti]); });
      });
    }
    for (auto& th : pool) th.join();
  }

  Tally sum;
  for (const Tally& t : tallies) {
    sum.total += t.total;
    sum.hits += t.hits;
    sum.sieve_sum += t.sieve_sum;
  }
  if (use_b && sum.sieve_sum != int64_t(sum.hits))
    throw std::logic_error("Mobius sieve disagrees with direct gcd count");

  BoxCount out;
  out.r = r;
  out.total = sum.total;
  out.hits = sum.hits;
  out.k = k;
  out.b = b;
  out.ratio = sum.total == 0 ? Rat(0) : Rat(Int(sum.hits), Int(sum.total));
  out.ratio_float = out.ratio.convert_to<double>();
  return out;
}

/// Exact density the box ratios should approach: the anchor gcd is cut with
/// b when counting relative to b.
inline DensityValue predicted_density(const HyperplaneSystem& sys, unsigned k,
                                      std::optional<int64_t> b = std::nullopt) {
  const DensityResult base = density_of_system(sys, k);
  if (!b.has_value() || *b == 0) return base.density;
  const Int anchor = boost::multiprecision::gcd(base.anchor_gcd, Int(detail::u_abs(*b)));
  bool extrapolated = false;
  return detail::density_from_anchor(anchor, base.ambient, base.codim, k, &extrapolated);
}

struct TraceRow {
  BoxCount box;
  double deviation = 0.0;
  bool deviation_grew = false;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  DensityValue predicted;
  double final_deviation = 0.0;
  bool any_blowup = false;

  friend bool operator==(const ConvergenceTrace&, const ConvergenceTrace&) = default;
};

inline ConvergenceTrace convergence_trace(const HyperplaneSystem& sys, unsigned k,
                                          std::optional<int64_t> b,
                                          const std::vector<int64_t>& schedule,
                                          unsigned threads = 0) {
  if (schedule.empty()) throw std::domain_error("empty radius schedule");
  for (size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1]) throw std::domain_error("radius schedule must be strictly increasing");

  ConvergenceTrace tr;
  tr.predicted = predicted_density(sys, k, b);
  const double target = tr.predicted.numeric();
  double prev = -1.0;
  for (int64_t r : schedule) {
    TraceRow row;
    row.box = count_sieved(sys, r, k, b, threads);
    row.deviation = std::abs(row.box.ratio_float - target);
    row.deviation_grew = prev >= 0.0 && row.deviation > prev;
    tr.any_blowup = tr.any_blowup || row.deviation_grew;
    prev = row.deviation;
    tr.rows.push_back(std::move(row));
  }
  tr.final_deviation = tr.rows.back().deviation;
  return tr;
}

/// Box-count lower bound: |points(r)| >= (2 floor((r-r0)/c) + 1)^{n-m} with
/// c from the null-space basis, or floor((r-r0)/sum|a_i|)^{n-1} for a
/// single hyperplane.
struct LowerBoundCheck {
  uint64_t actual = 0;
  uint64_t bound = 0;
  bool ok = false;
  int64_t r0 = 0;
  Int c = 0;

  friend bool operator==(const LowerBoundCheck&, const LowerBoundCheck&) = default;
};

inline LowerBoundCheck lower_bound_check(const HyperplaneSystem& sys, int64_t r) {
  if (r < 1) throw std::domain_error("box radius must be >= 1");
  const LatticeEnumerator en(sys);
  LowerBoundCheck out;
  out.r0 = en.min_enclosing_radius();
  if (r < out.r0)
    throw std::domain_error("box radius below r0 = " + std::to_string(out.r0) +
                            ", the smallest half-width containing an integral point");

  en.enumerate(r, [&](const std::vector<int64_t>&) {
    ++out.actual;
    return true;
  });

  const int n = sys.ambient_dim(), m = en.rank();
  if (sys.equation_count() == 1 && m == 1) {
    Int c = 0;
    for (int j = 0; j < n; ++j) c += abs(sys.a.at(0, j));
    out.c = c;
    const uint64_t q = ((Int(r) - out.r0) / c).convert_to<uint64_t>();
    out.bound = detail::sat_pow_u64(q, unsigned(n - 1));
  } else if (m < n) {
    out.c = *nullspace_basis(sys.a).c;
    const uint64_t q = ((Int(r) - out.r0) / out.c).convert_to<uint64_t>();
    out.bound = detail::sat_pow_u64(2 * q + 1, unsigned(n - m));
  } else {
    out.bound = 1;
  }
  out.ok = out.actual >= out.bound;
  return out;
}

}  // namespace latvis
