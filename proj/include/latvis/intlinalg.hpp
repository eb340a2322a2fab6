#pragma once

// Exact integer linear algebra on arbitrary-precision entries: vector gcd,
// determinants (fraction-free Bareiss), Smith Normal Form with its
// unimodular transforms, and integer null-space bases.

#include <optional>
#include <stdexcept>
#include <vector>

#include "latvis/arith.hpp"

namespace latvis {

class IntMatrix {
 public:
  IntMatrix() : IntMatrix(1, 1) {}

  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {
    if (rows < 1 || cols < 1) throw std::domain_error("matrix dimensions must be >= 1");
  }

  IntMatrix(int rows, int cols, std::vector<Int> entries) : IntMatrix(rows, cols) {
    if (entries.size() != a_.size()) throw std::invalid_argument("entry count mismatch");
    a_ = std::move(entries);
  }

  static IntMatrix identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Int& at(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const Int& at(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  std::vector<Int> row(int i) const {
    return {a_.begin() + size_t(i) * cols_, a_.begin() + size_t(i + 1) * cols_};
  }

  std::vector<Int> col(int j) const {
    std::vector<Int> c(rows_);
    for (int i = 0; i < rows_; ++i) c[size_t(i)] = at(i, j);
    return c;
  }

  IntMatrix operator*(const IntMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
    IntMatrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        if (at(i, k) == 0) continue;
        for (int j = 0; j < o.cols_; ++j) r.at(i, j) += at(i, k) * o.at(k, j);
      }
    return r;
  }

  std::vector<Int> operator*(const std::vector<Int>& x) const {
    if (int(x.size()) != cols_) throw std::invalid_argument("matrix-vector shape mismatch");
    std::vector<Int> r(rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r[size_t(i)] += at(i, j) * x[size_t(j)];
    return r;
  }

  void swap_rows(int i, int j) {
    if (i == j) return;
    for (int c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
  }

  void swap_cols(int i, int j) {
    if (i == j) return;
    for (int r = 0; r < rows_; ++r) std::swap(at(r, i), at(r, j));
  }

  // row[dst] += f * row[src]
  void add_row(int dst, int src, const Int& f) {
    for (int c = 0; c < cols_; ++c) at(dst, c) += f * at(src, c);
  }

  // col[dst] += f * col[src]
  void add_col(int dst, int src, const Int& f) {
    for (int r = 0; r < rows_; ++r) at(r, dst) += f * at(r, src);
  }

  void negate_row(int i) {
    for (int c = 0; c < cols_; ++c) at(i, c) = -at(i, c);
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  int rows_, cols_;
  std::vector<Int> a_;
};

/// gcd of a vector's entries; all-zero gives 0 by convention.
inline Int vec_gcd(const std::vector<Int>& x) {
  if (x.empty()) throw std::domain_error("vec_gcd of an empty vector");
  Int g = 0;
  for (const Int& v : x) g = boost::multiprecision::gcd(g, v);
  return g;
}

/// Exact determinant by fraction-free (Bareiss) elimination.
inline Int determinant(IntMatrix m) {
  if (m.rows() != m.cols()) throw std::domain_error("determinant of a non-square matrix");
  const int n = m.rows();
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (m.at(k, k) == 0) {
      int r = k + 1;
      while (r < n && m.at(r, k) == 0) ++r;
      if (r == n) return 0;
      m.swap_rows(k, r);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
    prev = m.at(k, k);
  }
  return sign > 0 ? m.at(n - 1, n - 1) : -m.at(n - 1, n - 1);
}

/// True iff M is square with determinant +-1 (an element of GL_n(Z); such
/// matrices preserve the gcd of integer vectors).
inline bool is_unimodular(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw std::domain_error("unimodularity is defined for square matrices");
  const Int d = determinant(m);
  return d == 1 || d == -1;
}

/// Exact inverse of a unimodular matrix: adjugate times det (det is +-1 so
/// the inverse is integral).
inline IntMatrix inverse_unimodular(const IntMatrix& m) {
  const int n = m.rows();
  if (m.cols() != n) throw std::domain_error("inverse of a non-square matrix");
  const Int d = determinant(m);
  if (d != 1 && d != -1) throw std::domain_error("matrix is not unimodular");
  IntMatrix inv(n, n);
  if (n == 1) {
    inv.at(0, 0) = d;
    return inv;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      IntMatrix minor(n - 1, n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor.at(rr, cc) = m.at(r, c);
          ++cc;
        }
        ++rr;
      }
      Int cof = determinant(std::move(minor));
      if ((i + j) % 2 != 0) cof = -cof;
      inv.at(j, i) = d * cof;  // adj(m)_{ji} = cofactor_{ij}; times det = inverse
    }
  return inv;
}

/// UAV = D with U, V unimodular and D diagonal; invariant_factors are the
/// positive diagonal entries d_1 | d_2 | ... | d_m, m = rank. The pivot
/// rule (minimal nonzero absolute value, ties by lowest row then column)
/// makes the decomposition deterministic.
struct SnfDecomposition {
  IntMatrix d;
  IntMatrix u;
  IntMatrix v;
  std::vector<Int> invariant_factors;
  int rank = 0;

  friend bool operator==(const SnfDecomposition&, const SnfDecomposition&) = default;
};

inline SnfDecomposition smith_normal_form(const IntMatrix& a) {
  const int s = a.rows(), n = a.cols();
  SnfDecomposition out{a, IntMatrix::identity(s), IntMatrix::identity(n), {}, 0};
  IntMatrix& d = out.d;
  IntMatrix& u = out.u;
  IntMatrix& v = out.v;
  const int t = std::min(s, n);

  for (int i = 0; i < t; ++i) {
    for (;;) {
      // Pivot: minimal nonzero |entry| in d[i.., i..], ties by (row, col).
      int pr = -1, pc = -1;
      Int best;
      for (int r = i; r < s; ++r)
        for (int c = i; c < n; ++c) {
          if (d.at(r, c) == 0) continue;
          Int m = abs(d.at(r, c));
          if (pr < 0 || m < best) {
            best = m;
            pr = r;
            pc = c;
          }
        }
      if (pr < 0) {
        i = t;  // remaining block is zero
        break;
      }
      d.swap_rows(i, pr);
      u.swap_rows(i, pr);
      d.swap_cols(i, pc);
      v.swap_cols(i, pc);

      bool dirty = false;
      for (int r = i + 1; r < s; ++r) {
        if (d.at(r, i) == 0) continue;
        const Int q = d.at(r, i) / d.at(i, i);
        if (q != 0) {
          d.add_row(r, i, -q);
          u.add_row(r, i, -q);
        }
        if (d.at(r, i) != 0) dirty = true;
      }
      for (int c = i + 1; c < n; ++c) {
        if (d.at(i, c) == 0) continue;
        const Int q = d.at(i, c) / d.at(i, i);
        if (q != 0) {
          d.add_col(c, i, -q);
          v.add_col(c, i, -q);
        }
        if (d.at(i, c) != 0) dirty = true;
      }
      if (dirty) continue;

      // Row i and column i are clear; enforce that the pivot divides the
      // remaining block, otherwise fold an offending row in and repeat.
      bool divides_all = true;
      for (int r = i + 1; r < s && divides_all; ++r)
        for (int c = i + 1; c < n; ++c)
          if (d.at(r, c) % d.at(i, i) != 0) {
            d.add_row(i, r, 1);
            u.add_row(i, r, 1);
            divides_all = false;
            break;
          }
      if (divides_all) break;
    }
    if (i >= t) break;
    if (d.at(i, i) < 0) {
      d.negate_row(i);
      u.negate_row(i);
    }
  }

  for (int i = 0; i < t && d.at(i, i) != 0; ++i) out.invariant_factors.push_back(d.at(i, i));
  out.rank = int(out.invariant_factors.size());
  return out;
}

/// Lattice basis of {x in Z^n : Ax = 0} (the last n-m columns of the SNF's
/// V), together with c = max_k sum_j |v_jk|, the box-growth constant of the
/// enumeration lower bound. Full column rank gives an empty basis and no c.
struct NullspaceBasis {
  std::vector<std::vector<Int>> vectors;
  std::optional<Int> c;
  int rank = 0;
};

inline NullspaceBasis nullspace_basis(const IntMatrix& a) {
  const auto snf = smith_normal_form(a);
  const int n = a.cols(), m = snf.rank;
  NullspaceBasis out;
  out.rank = m;
  for (int j = m; j < n; ++j) out.vectors.push_back(snf.v.col(j));
  if (m < n) {
    Int c = 0;
    for (int kcoord = 0; kcoord < n; ++kcoord) {
      Int s = 0;
      for (const auto& vec : out.vectors) s += abs(vec[size_t(kcoord)]);
      c = std::max(c, s);
    }
    out.c = c;
  }
  return out;
}

}  // namespace latvis
