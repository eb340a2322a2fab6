#pragma once

// Shared helpers for the unit suites: a fixed-seed RNG, random matrix /
// unimodular-matrix generators, and small independent oracles (minor gcds,
// rational solves) used to cross-check the library.

#include <cstdint>
#include <random>
#include <vector>

#include "latvis/density.hpp"
#include "latvis/intlinalg.hpp"

namespace testutil {

using latvis::Int;
using latvis::IntMatrix;
using latvis::Rat;

using Rng = std::mt19937_64;

inline int64_t rand_int(Rng& rng, int64_t lo, int64_t hi) {
  return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
}

inline IntMatrix random_matrix(Rng& rng, int rows, int cols, int64_t lo, int64_t hi) {
  IntMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.at(i, j) = rand_int(rng, lo, hi);
  return m;
}

/// Random element of GL_n(Z) as a product of transvections (identity plus
/// one off-diagonal entry), row swaps and a sign flip. Factors are kept
/// small so entries stay desk-scale.
inline IntMatrix random_unimodular(Rng& rng, int n, int ops = 6) {
  IntMatrix w = IntMatrix::identity(n);
  for (int t = 0; t < ops; ++t) {
    const int choice = int(rand_int(rng, 0, 3));
    if (choice == 0 && n >= 2) {
      int i = int(rand_int(rng, 0, n - 1)), j = int(rand_int(rng, 0, n - 1));
      if (i != j) w.add_row(i, j, Int(rand_int(rng, -3, 3)));
    } else if (choice == 1 && n >= 2) {
      w.swap_rows(int(rand_int(rng, 0, n - 1)), int(rand_int(rng, 0, n - 1)));
    } else if (choice == 2) {
      w.negate_row(int(rand_int(rng, 0, n - 1)));
    } else if (n >= 2) {
      int i = int(rand_int(rng, 0, n - 1)), j = int(rand_int(rng, 0, n - 1));
      if (i != j) w.add_col(i, j, Int(rand_int(rng, -3, 3)));
    }
  }
  return w;
}

/// gcd of all i x i minors by brute-force enumeration of row/column subsets.
inline Int minor_gcd(const IntMatrix& a, int order) {
  std::vector<int> rows(static_cast<size_t>(order)), cols(static_cast<size_t>(order));
  Int g = 0;

  auto det_of = [&]() {
    IntMatrix sub(order, order);
    for (int i = 0; i < order; ++i)
      for (int j = 0; j < order; ++j) sub.at(i, j) = a.at(rows[size_t(i)], cols[size_t(j)]);
    return latvis::determinant(std::move(sub));
  };

  auto rec_cols = [&](auto&& self, int idx, int start) -> void {
    if (idx == order) {
      g = boost::multiprecision::gcd(g, det_of());
      return;
    }
    for (int c = start; c < a.cols(); ++c) {
      cols[size_t(idx)] = c;
      self(self, idx + 1, c + 1);
    }
  };
  auto rec_rows = [&](auto&& self, int idx, int start) -> void {
    if (idx == order) {
      rec_cols(rec_cols, 0, 0);
      return;
    }
    for (int r = start; r < a.rows(); ++r) {
      rows[size_t(idx)] = r;
      self(self, idx + 1, r + 1);
    }
  };
  rec_rows(rec_rows, 0, 0);
  return g;
}

/// Rational Gaussian elimination solving M c = x exactly; returns false when
/// the system is insoluble. Used as an independent membership oracle for
/// lattice bases (integrality of c is checked by the caller).
inline bool solve_rational(const std::vector<std::vector<Int>>& columns, const std::vector<Int>& x,
                           std::vector<Rat>* out) {
  const size_t nrows = x.size(), ncols = columns.size();
  std::vector<std::vector<Rat>> m(nrows, std::vector<Rat>(ncols + 1));
  for (size_t i = 0; i < nrows; ++i) {
    for (size_t j = 0; j < ncols; ++j) m[i][j] = Rat(columns[j][i]);
    m[i][ncols] = Rat(x[i]);
  }
  size_t row = 0;
  std::vector<size_t> pivot_col;
  for (size_t col = 0; col < ncols && row < nrows; ++col) {
    size_t sel = row;
    while (sel < nrows && m[sel][col] == 0) ++sel;
    if (sel == nrows) continue;
    std::swap(m[sel], m[row]);
    for (size_t i = 0; i < nrows; ++i) {
      if (i == row || m[i][col] == 0) continue;
      const Rat f = m[i][col] / m[row][col];
      for (size_t j = col; j <= ncols; ++j) m[i][j] -= f * m[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (size_t i = row; i < nrows; ++i)
    if (m[i][ncols] != 0) return false;
  std::vector<Rat> c(ncols, Rat(0));
  for (size_t i = 0; i < pivot_col.size(); ++i) c[pivot_col[i]] = m[i][ncols] / m[i][pivot_col[i]];
  if (out) *out = std::move(c);
  return true;
}

/// Random consistent hyperplane system (built from a random base point, so
/// solvability is guaranteed).
inline latvis::HyperplaneSystem random_system(Rng& rng, int max_rows, int max_cols, int64_t coeff_mag,
                                              int64_t point_mag) {
  const int n = int(rand_int(rng, 1, max_cols));
  const int s = int(rand_int(rng, 1, max_rows));
  IntMatrix a = random_matrix(rng, s, n, -coeff_mag, coeff_mag);
  std::vector<Int> p(static_cast<size_t>(n));
  for (auto& v : p) v = rand_int(rng, -point_mag, point_mag);
  return latvis::HyperplaneSystem::from_base_point(std::move(a), std::move(p));
}

}  // namespace testutil
