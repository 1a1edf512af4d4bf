#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "pathlp/dense_matrix.hpp"
#include "pathlp/errors.hpp"
#include "pathlp/vector_ops.hpp"

namespace pathlp {

// Relative pivot threshold below which a factorization is declared failed.
inline constexpr double kPivotRelTol = 1e-12;
inline constexpr double kSpdSolveRelTol = 1e-8;

// Cholesky factorization M = L L^T of a symmetric positive definite matrix.
// The factor is reusable across right-hand sides.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const DenseMatrix& m) : n_(m.rows()), l_(m) {
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      max_diag = std::max(max_diag, std::fabs(m(i, i)));
    const double pivot_floor = kPivotRelTol * max_diag;
    for (std::size_t k = 0; k < n_; ++k) {
      double d = l_(k, k);
      for (std::size_t j = 0; j < k; ++j) d -= l_(k, j) * l_(k, j);
      if (!(d > pivot_floor))
        throw NotPositiveDefinite("cholesky pivot " + std::to_string(d) +
                                  " at row " + std::to_string(k));
      const double lkk = std::sqrt(d);
      l_(k, k) = lkk;
      for (std::size_t i = k + 1; i < n_; ++i) {
        double v = l_(i, k);
        for (std::size_t j = 0; j < k; ++j) v -= l_(i, j) * l_(k, j);
        l_(i, k) = v / lkk;
      }
    }
  }

  std::size_t size() const { return n_; }

  Vector solve(const Vector& rhs) const {
    Vector z = rhs;
    // forward: L y = rhs
    for (std::size_t i = 0; i < n_; ++i) {
      double v = z[i];
      const double* row = l_.row_data(i);
      for (std::size_t j = 0; j < i; ++j) v -= row[j] * z[j];
      z[i] = v / row[i];
    }
    // backward: L^T x = y
    for (std::size_t ii = n_; ii-- > 0;) {
      double v = z[ii];
      for (std::size_t j = ii + 1; j < n_; ++j) v -= l_(j, ii) * z[j];
      z[ii] = v / l_(ii, ii);
    }
    return z;
  }

 private:
  std::size_t n_;
  DenseMatrix l_;
};

namespace detail {

inline void check_symmetric(const DenseMatrix& m, double rel_tol) {
  const double scale = m.max_abs();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::fabs(m(i, j) - m(j, i)) > rel_tol * scale)
        throw PreconditionViolation("matrix not symmetric at (" +
                                    std::to_string(i) + "," +
                                    std::to_string(j) + ")");
}

}  // namespace detail

// Solves M z = rhs for symmetric positive definite M. One pass of iterative
// refinement keeps the residual near the 1e-8 relative contract even for
// moderately conditioned systems.
inline Vector spd_solve(const DenseMatrix& m, const Vector& rhs) {
  if (m.rows() != m.cols() || m.rows() != rhs.size())
    throw PreconditionViolation("spd_solve dimension mismatch");
  detail::check_symmetric(m, 1e-10);
  CholeskyFactor factor(m);
  Vector z = factor.solve(rhs);
  const double rhs_norm = norm2(rhs);
  for (int pass = 0; pass < 3; ++pass) {
    Vector res = matvec(m, z);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = rhs[i] - res[i];
    if (norm2(res) <= 0.5 * kSpdSolveRelTol * rhs_norm) break;
    Vector corr = factor.solve(res);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += corr[i];
  }
  return z;
}

// LU factorization with partial pivoting, used for the small Woodbury middle
// systems and for inverting the (nonsymmetric) Newton block matrix.
class LuFactor {
 public:
  explicit LuFactor(const DenseMatrix& m)
      : n_(m.rows()), lu_(m), perm_(m.rows()) {
    const double singular_floor = kPivotRelTol * std::max(m.max_abs(), 1e-300);
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t piv = k;
      double best = std::fabs(lu_(k, k));
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double v = std::fabs(lu_(i, k));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (!(best > singular_floor))
        throw SingularUpdate("singular pivot at column " + std::to_string(k));
      if (piv != k) {
        for (std::size_t j = 0; j < n_; ++j)
          std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
      }
      const double inv_pivot = 1.0 / lu_(k, k);
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double f = lu_(i, k) * inv_pivot;
        lu_(i, k) = f;
        if (f == 0.0) continue;
        for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  Vector solve(const Vector& rhs) const {
    Vector z(n_);
    for (std::size_t i = 0; i < n_; ++i) z[i] = rhs[perm_[i]];
    for (std::size_t i = 1; i < n_; ++i) {
      double v = z[i];
      const double* row = lu_.row_data(i);
      for (std::size_t j = 0; j < i; ++j) v -= row[j] * z[j];
      z[i] = v;
    }
    for (std::size_t ii = n_; ii-- > 0;) {
      double v = z[ii];
      const double* row = lu_.row_data(ii);
      for (std::size_t j = ii + 1; j < n_; ++j) v -= row[j] * z[j];
      z[ii] = v / row[ii];
    }
    return z;
  }

 private:
  std::size_t n_;
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
};

// Dense inverse through row-equilibrated LU. Equilibration keeps the inverse
// accurate when row scales differ by many orders of magnitude.
inline DenseMatrix invert_dense(const DenseMatrix& m) {
  const std::size_t n = m.rows();
  DenseMatrix scaled = m;
  Vector row_scale(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      mx = std::max(mx, std::fabs(scaled(i, j)));
    if (mx > 0.0) {
      row_scale[i] = 1.0 / mx;
      for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= row_scale[i];
    }
  }
  LuFactor lu(scaled);
  DenseMatrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = row_scale[j];
    Vector col = lu.solve(e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

// Minimum-norm solution of A x = b: x = A^T (A A^T)^{-1} b. The output lies
// in the row space of A by construction.
inline Vector min_norm_point(const DenseMatrix& a, const Vector& b) {
  Vector w(a.cols(), 1.0);
  DenseMatrix gram = weighted_normal_matrix(a, w);
  Vector z = spd_solve(gram, b);
  return matvec_transpose(a, z);
}

// A set of replacement columns for a square matrix. The low-rank structure
// of the inverse update is derived from these plus the old inverse.
struct LowRankDelta {
  std::vector<std::size_t> col_indices;  // strictly increasing
  DenseMatrix new_columns;               // m x q, column j replaces col_indices[j]

  std::size_t rank() const { return col_indices.size(); }

  void validate(std::size_t dim) const {
    if (new_columns.cols() != col_indices.size())
      throw PreconditionViolation("delta column count mismatch");
    if (!col_indices.empty() && new_columns.rows() != dim)
      throw PreconditionViolation("delta column length mismatch");
    for (std::size_t j = 0; j < col_indices.size(); ++j) {
      if (col_indices[j] >= dim)
        throw PreconditionViolation("delta column index out of range");
      if (j > 0 && col_indices[j] <= col_indices[j - 1])
        throw PreconditionViolation("delta column indices not increasing");
    }
  }
};

namespace detail {

// Middle matrix K of the column-replacement Woodbury identity. With
// M1 = M0 + (N - M0 E) V, V the selector rows, one has
//   T M1 = I + (T N - E) V,  K = (T N)[idx, idx-block] trimmed to q x q.
// K coincides with I_q + V M0^{-1} U for U C V the entry-level factorization.
inline DenseMatrix woodbury_middle(const DenseMatrix& t,
                                   const LowRankDelta& delta) {
  const std::size_t q = delta.rank();
  const std::size_t m = t.rows();
  DenseMatrix k(q, q);
  for (std::size_t i = 0; i < q; ++i) {
    const double* trow = t.row_data(delta.col_indices[i]);
    for (std::size_t j = 0; j < q; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < m; ++r)
        acc += trow[r] * delta.new_columns(r, j);
      k(i, j) = acc;
    }
  }
  return k;
}

}  // namespace detail

// Given T = M0^{-1} and a set of replacement columns defining M1, returns
// M1^{-1} without refactorizing:
//   M1^{-1} = T - (T N - E) K^{-1} T[idx,:]
// where N holds the new columns, E the matching identity columns and
// K = (T N)[idx,:]. Cost O(m^2 q).
inline DenseMatrix woodbury_update(const DenseMatrix& t,
                                   const LowRankDelta& delta) {
  const std::size_t m = t.rows();
  delta.validate(m);
  const std::size_t q = delta.rank();
  if (q == 0) return t;

  // B = T N
  DenseMatrix b(m, q);
  for (std::size_t i = 0; i < m; ++i) {
    const double* trow = t.row_data(i);
    for (std::size_t j = 0; j < q; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < m; ++r)
        acc += trow[r] * delta.new_columns(r, j);
      b(i, j) = acc;
    }
  }
  DenseMatrix k(q, q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) k(i, j) = b(delta.col_indices[i], j);
  LuFactor klu(k);

  // W = K^{-1} T[idx,:]
  DenseMatrix w(q, m);
  Vector rhs(q);
  Vector col(q);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < q; ++i) rhs[i] = t(delta.col_indices[i], c);
    col = klu.solve(rhs);
    for (std::size_t i = 0; i < q; ++i) w(i, c) = col[i];
  }

  // T' = T - (B - E) W
  DenseMatrix out = t;
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out.row_data(i);
    for (std::size_t j = 0; j < q; ++j) {
      double bij = b(i, j);
      if (i == delta.col_indices[j]) bij -= 1.0;
      if (bij == 0.0) continue;
      const double* wrow = w.row_data(j);
      for (std::size_t c = 0; c < m; ++c) orow[c] -= bij * wrow[c];
    }
  }
  return out;
}

// Given T = M0^{-1}, u = M0^{-1} b and the replacement columns defining M1,
// returns M1^{-1} b without forming M1^{-1}:
//   M1^{-1} b = u - (T N - E) K^{-1} u[idx].
inline Vector woodbury_apply(const DenseMatrix& t, const Vector& u,
                             const LowRankDelta& delta, const Vector& b) {
  (void)b;  // consistency of u with (T, b) is the caller's contract
  const std::size_t m = t.rows();
  delta.validate(m);
  const std::size_t q = delta.rank();
  if (q == 0) return u;

  DenseMatrix k = detail::woodbury_middle(t, delta);
  Vector u_sel(q);
  for (std::size_t i = 0; i < q; ++i) u_sel[i] = u[delta.col_indices[i]];
  LuFactor klu(k);
  Vector w = klu.solve(u_sel);

  // out = u - T (N w) + E w
  Vector nw(m, 0.0);
  for (std::size_t j = 0; j < q; ++j) {
    const double wj = w[j];
    if (wj == 0.0) continue;
    for (std::size_t r = 0; r < m; ++r) nw[r] += delta.new_columns(r, j) * wj;
  }
  Vector out = u;
  for (std::size_t i = 0; i < m; ++i) {
    const double* trow = t.row_data(i);
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) acc += trow[r] * nw[r];
    out[i] -= acc;
  }
  for (std::size_t j = 0; j < q; ++j) out[delta.col_indices[j]] += w[j];
  return out;
}

// Last column of the inverse of [[M, v], [0, -1]], which is (M^{-1} v, -1).
// Folding a right-hand side into the matrix this way turns vector drift into
// column drift.
inline Vector block_inverse_extend(const DenseMatrix& minv, const Vector& v) {
  if (minv.cols() != v.size())
    throw PreconditionViolation("block_inverse_extend dimension mismatch");
  Vector out = matvec(minv, v);
  out.push_back(-1.0);
  return out;
}

// Solves H z = v where H = Abar Diag(w1, w2, alpha) Abar^T for the bordered
// constraint matrix Abar = [A, -A, 0; 1^T, 0^T, 1]. Block elimination gives
//   H = [[G, p], [p^T, sigma0]],  G = A (W1 + W2) A^T,  p = A w1,
//   sigma0 = ||w1||_1 + alpha,
// so two SPD solves against G and a scalar Schur complement suffice.
inline Vector modified_normal_solve(const DenseMatrix& a, const Vector& w1,
                                    const Vector& w2, double alpha,
                                    const Vector& v) {
  const std::size_t d = a.rows();
  const std::size_t n = a.cols();
  if (w1.size() != n || w2.size() != n || v.size() != d + 1)
    throw PreconditionViolation("modified_normal_solve dimension mismatch");
  if (!(alpha > 0.0) || !all_positive(w1) || !all_positive(w2))
    throw PreconditionViolation("modified_normal_solve weights not positive");

  Vector wsum(n);
  for (std::size_t i = 0; i < n; ++i) wsum[i] = w1[i] + w2[i];
  CholeskyFactor g(weighted_normal_matrix(a, wsum));

  Vector p = matvec(a, w1);
  const double sigma0 = norm1(w1) + alpha;

  Vector v_top(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(d));
  Vector z1 = g.solve(v_top);
  Vector z2 = g.solve(p);

  const double schur = sigma0 - dot(p, z2);
  if (!(std::fabs(schur) > kPivotRelTol * sigma0))
    throw NotPositiveDefinite("modified normal matrix schur complement");
  const double y2 = (v[d] - dot(p, z1)) / schur;

  Vector out(d + 1);
  for (std::size_t i = 0; i < d; ++i) out[i] = z1[i] - y2 * z2[i];
  out[d] = y2;
  return out;
}

}  // namespace pathlp
