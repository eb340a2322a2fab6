#pragma once

// Exact densities of k-visible lattice points on hyperplanes and their
// intersections. Given A x = A p with rank m in n variables, the density is
//
//     prod_{q^k | b'} (1 - q^{-k(n-m)}),   b' = gcd(p'_1, ..., p'_m),
//
// where p' = V^{-1} p for a Smith Normal Form UAV = D. b' = 0 yields the
// full product 1/zeta(k(n-m)).

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "latvis/arith.hpp"
#include "latvis/intlinalg.hpp"

namespace latvis {

/// Integral solution of A p = b via the SNF (y_i = (Ub)_i / d_i, p = V y).
/// Throws "no integral solution" when the system is insoluble over Z.
inline std::vector<Int> solve_integral(const IntMatrix& a, const std::vector<Int>& b) {
  if (int(b.size()) != a.rows()) throw std::invalid_argument("rhs length must match row count");
  const auto snf = smith_normal_form(a);
  const std::vector<Int> ub = snf.u * b;
  const int n = a.cols(), m = snf.rank;
  std::vector<Int> y(static_cast<size_t>(n));
  for (int i = 0; i < m; ++i) {
    const Int& di = snf.invariant_factors[size_t(i)];
    if (ub[size_t(i)] % di != 0) throw std::domain_error("no integral solution");
    y[size_t(i)] = ub[size_t(i)] / di;
  }
  for (int i = m; i < a.rows(); ++i)
    if (ub[size_t(i)] != 0) throw std::domain_error("no integral solution");
  return snf.v * y;
}

/// An s x n integer system A x = b carrying one integral base point p with
/// A p = b. Construction from a right-hand side verifies integral
/// solvability. A single row is normalized by its content g = gcd(row):
/// g | b divides the equation through, g not dividing b means the
/// hyperplane misses Z^n entirely.
struct HyperplaneSystem {
  IntMatrix a;
  std::vector<Int> base_point;
  std::vector<Int> rhs;

  int ambient_dim() const { return a.cols(); }
  int equation_count() const { return a.rows(); }

  static HyperplaneSystem from_base_point(IntMatrix a_in, std::vector<Int> p) {
    if (int(p.size()) != a_in.cols()) throw std::invalid_argument("base point length must match column count");
    normalize_single_row(a_in, nullptr);
    std::vector<Int> b = a_in * p;
    return {std::move(a_in), std::move(p), std::move(b)};
  }

  static HyperplaneSystem from_rhs(IntMatrix a_in, std::vector<Int> b) {
    if (int(b.size()) != a_in.rows()) throw std::invalid_argument("rhs length must match row count");
    normalize_single_row(a_in, &b);
    std::vector<Int> p = solve_integral(a_in, b);
    return {std::move(a_in), std::move(p), std::move(b)};
  }

 private:
  static void normalize_single_row(IntMatrix& a, std::vector<Int>* b) {
    if (a.rows() != 1) return;
    Int g = 0;
    for (int j = 0; j < a.cols(); ++j) g = boost::multiprecision::gcd(g, a.at(0, j));
    if (g <= 1) return;
    if (b != nullptr) {
      if ((*b)[0] % g != 0) throw std::domain_error("hyperplane contains no integral points");
      (*b)[0] /= g;
    }
    for (int j = 0; j < a.cols(); ++j) a.at(0, j) /= g;
  }
};

enum class DensityPath { GeneralHyperplane, DmOne, FullSnf, PointDeterminant };

inline const char* to_string(DensityPath p) {
  switch (p) {
    case DensityPath::GeneralHyperplane: return "general-hyperplane";
    case DensityPath::DmOne: return "dm=1";
    case DensityPath::FullSnf: return "full-snf";
    case DensityPath::PointDeterminant: return "point-determinant";
  }
  return "?";
}

struct DensityResult {
  DensityValue density;
  int codim = 0;    // m = rank(A)
  int ambient = 0;  // n
  unsigned k = 1;
  Int anchor_gcd = 0;                  // b' = gcd(p'_1..p'_m), by absolute value
  std::vector<Int> transformed_prefix; // p'_1..p'_m
  SnfDecomposition snf;
  DensityPath path = DensityPath::FullSnf;
  bool extrapolated = false;           // m = n point case, or b' = 0 on a line
  std::optional<Int> point_determinant;

  friend bool operator==(const DensityResult&, const DensityResult&) = default;
};

namespace detail {

/// k-visibility of the single point whose coordinate gcd is g: no prime q
/// with q^k | g, and the origin (g = 0) is never visible.
inline bool point_is_k_visible(const Int& g, unsigned k) {
  if (g == 0) return false;
  const Int ag = abs(g);
  if (ag == 1) return true;
  for (const auto& pp : factorize(to_i64(ag, "point gcd")).factors)
    if (pp.exponent >= k) return false;
  return true;
}

inline DensityValue density_from_anchor(const Int& anchor, int n, int m, unsigned k, bool* extrapolated) {
  if (m == n) {
    // Zero-dimensional intersection: the density of the one-point set.
    *extrapolated = true;
    return point_is_k_visible(anchor, k) ? DensityValue::exact_one() : DensityValue::exact_zero();
  }
  if (anchor == 0 && n - m == 1) *extrapolated = true;  // line through the origin
  return euler_product(k, unsigned(n - m), anchor);
}

}  // namespace detail

/// Density of k-visible points on the intersection of the system's
/// hyperplanes (k = 1 is ordinary visibility).
inline DensityResult density_of_system(const HyperplaneSystem& sys, unsigned k) {
  if (k < 1) throw std::domain_error("k must be >= 1");
  DensityResult res;
  res.ambient = sys.ambient_dim();
  res.k = k;
  res.snf = smith_normal_form(sys.a);
  res.codim = res.snf.rank;
  const IntMatrix vinv = inverse_unimodular(res.snf.v);
  const std::vector<Int> pp = vinv * sys.base_point;
  res.transformed_prefix.assign(pp.begin(), pp.begin() + res.codim);
  Int anchor = 0;
  for (const Int& x : res.transformed_prefix) anchor = boost::multiprecision::gcd(anchor, x);
  res.anchor_gcd = anchor;
  res.density = detail::density_from_anchor(anchor, res.ambient, res.codim, k, &res.extrapolated);
  res.path = DensityPath::FullSnf;
  return res;
}

/// Density of k-visible points on the single hyperplane a . x = b in R^n.
/// Requires a nonzero coefficient vector; the equation is normalized by its
/// content. For k = 1 and b != 0 the result is cross-checked against the
/// Jordan totient identity J_{n-1}(|b|)/|b|^{n-1}.
inline DensityResult density_of_hyperplane(std::vector<Int> a, Int b, unsigned k) {
  const int n = int(a.size());
  if (n < 1) throw std::invalid_argument("empty coefficient vector");
  bool all_zero = true;
  for (const Int& x : a)
    if (x != 0) all_zero = false;
  if (all_zero) throw std::domain_error("hyperplane coefficients are all zero");
  IntMatrix row(1, n, std::move(a));
  auto sys = HyperplaneSystem::from_rhs(std::move(row), {std::move(b)});
  DensityResult res = density_of_system(sys, k);
  res.path = DensityPath::GeneralHyperplane;
  if (k == 1 && n >= 2 && res.anchor_gcd != 0) {
    const Int ab = abs(res.anchor_gcd);
    const Rat viaJordan(jordan_totient(unsigned(n - 1), to_i64(ab)), ipow(ab, unsigned(n - 1)));
    if (res.density.exact_value() != viaJordan)
      throw std::logic_error("density/Jordan-totient cross-check failed");
  }
  return res;
}

/// Density of visible points on the hyperplane through n integral points in
/// general position, via the bordered-determinant interpolation. The
/// absolute constant term equals det of the matrix with rows p_i; the
/// resulting equation is normalized before evaluation.
inline DensityResult density_from_points(const std::vector<std::vector<Int>>& points) {
  const int n = int(points.size());
  if (n < 1) throw std::invalid_argument("need at least one point");
  for (const auto& p : points)
    if (int(p.size()) != n) throw std::invalid_argument("need exactly n points of dimension n");

  IntMatrix rows(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rows.at(i, j) = points[size_t(i)][size_t(j)];
  const Int d = determinant(rows);

  // Coefficients: expand det[(p_i, 1); (x, 1)] along the bottom row.
  std::vector<Int> coeff(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    IntMatrix minor(n, n);  // delete column j of the bordered matrix, keep the 1s column
    for (int i = 0; i < n; ++i) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor.at(i, cc++) = points[size_t(i)][size_t(c)];
      }
      minor.at(i, n - 1) = 1;
    }
    Int m = determinant(minor);
    if ((n + j) % 2 != 0) m = -m;
    coeff[size_t(j)] = m;
  }
  bool all_zero = true;
  for (const Int& cje : coeff)
    if (cje != 0) all_zero = false;
  if (all_zero) throw std::domain_error("points not in general position");

  // det[(p_i,1);(x,1)] = sum_j coeff_j x_j + (-1)^{2n} det(rows) = 0.
  DensityResult res = density_of_hyperplane(std::move(coeff), -d, 1);
  res.path = DensityPath::PointDeterminant;
  res.point_determinant = abs(d);
  return res;
}

/// Shortcut of the d_m = 1 case: the anchor gcd equals gcd(b_1, ..., b_s)
/// directly, no transform needed. Returns nullopt when the last invariant
/// factor is not 1. Must agree exactly with density_of_system.
inline std::optional<DensityResult> dm1_shortcut(const HyperplaneSystem& sys, unsigned k) {
  if (k < 1) throw std::domain_error("k must be >= 1");
  DensityResult res;
  res.ambient = sys.ambient_dim();
  res.k = k;
  res.snf = smith_normal_form(sys.a);
  res.codim = res.snf.rank;
  if (res.codim > 0 && res.snf.invariant_factors[size_t(res.codim - 1)] != 1) return std::nullopt;
  Int anchor = abs(vec_gcd(sys.rhs));
  res.anchor_gcd = anchor;
  if (res.codim > 0) {
    // With all invariant factors 1, p'_i = (Ub)_i; keep the prefix for reporting.
    const std::vector<Int> ub = res.snf.u * sys.rhs;
    res.transformed_prefix.assign(ub.begin(), ub.begin() + res.codim);
  }
  res.density = detail::density_from_anchor(anchor, res.ambient, res.codim, k, &res.extrapolated);
  res.path = DensityPath::DmOne;
  return res;
}

}  // namespace latvis
