#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pathlp/dense_matrix.hpp"
#include "pathlp/errors.hpp"
#include "pathlp/linalg.hpp"
#include "pathlp/vector_ops.hpp"

namespace pathlp {

// Solution of the centering system
//   Sbar dx + Xbar ds = delta_mu,  A dx = 0,  A^T dy + ds = 0.
struct NewtonDirection {
  Vector dx;
  Vector ds;
  Vector dy;
};

// Steppers re-derive s from c - A^T y and project x back onto A x = b at
// this cadence; the identities hold per step but their floating-point error
// random-walks over long runs.
inline constexpr std::size_t kConsistencyRefreshPeriod = 2048;

// Strategy for solving the weighted normal system (A Diag(w) A^T) z = rhs.
// The default assembles the matrix densely; structured constraint matrices
// can substitute a specialized factorization.
using NormalSolver =
    std::function<Vector(const Vector& w, const Vector& rhs)>;

inline NormalSolver make_dense_normal_solver(const DenseMatrix& a) {
  return [&a](const Vector& w, const Vector& rhs) {
    CholeskyFactor factor(weighted_normal_matrix(a, w));
    return factor.solve(rhs);
  };
}

// Closed-form solve of the centering system. dy is computed first from the
// normal equations
//   (A Sbar^{-1} Xbar A^T) dy = -A Sbar^{-1} delta_mu,
// then ds = -A^T dy holds exactly and dx = (delta_mu - xbar ds) / sbar makes
// the first block row exact as well. The projection
// P = Sbar^{-1} A^T (A Sbar^{-1} Xbar A^T)^{-1} A Xbar is never materialized.
inline NewtonDirection solve_newton(const DenseMatrix& a, const Vector& xbar,
                                    const Vector& sbar, const Vector& delta_mu,
                                    const NormalSolver& normal_solver) {
  const std::size_t n = a.cols();
  const std::size_t d = a.rows();
  if (xbar.size() != n || sbar.size() != n || delta_mu.size() != n)
    throw PreconditionViolation("solve_newton dimension mismatch");
  if (!all_positive(xbar) || !all_positive(sbar))
    throw PreconditionViolation("solve_newton requires positive xbar, sbar");

  Vector w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = xbar[i] / sbar[i];

  Vector rhs(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const double* row = a.row_data(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * delta_mu[j] / sbar[j];
    rhs[i] = -acc;
  }

  NewtonDirection dir;
  dir.dy = normal_solver(w, rhs);
  Vector at_dy = matvec_transpose(a, dir.dy);
  dir.ds.resize(n);
  dir.dx.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    dir.ds[i] = -at_dy[i];
    dir.dx[i] = (delta_mu[i] - xbar[i] * dir.ds[i]) / sbar[i];
  }
  return dir;
}

inline NewtonDirection solve_newton(const DenseMatrix& a, const Vector& xbar,
                                    const Vector& sbar,
                                    const Vector& delta_mu) {
  return solve_newton(a, xbar, sbar, delta_mu, make_dense_normal_solver(a));
}

// Projects x onto {A x = b} through the minimum-norm correction, shifting
// it by the accumulated feasibility drift only. The dual identity is left
// alone: re-deriving s from c - A^T y cancels catastrophically when c
// carries the large embedding costs.
inline void refresh_primal_feasibility(const DenseMatrix& a, const Vector& b,
                                       const NormalSolver& solver, Vector& x) {
  Vector res = matvec(a, x);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = b[i] - res[i];
  Vector w = solver(Vector(a.cols(), 1.0), res);
  Vector corr = matvec_transpose(a, w);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] += corr[i];
    if (!(x[i] > 0.0))
      throw InvariantViolation("primal refresh left the positive orthant");
  }
}

// Applies the projection P v through the same normal solve. Test surface:
// the stepping code never forms P.
inline Vector apply_projection(const DenseMatrix& a, const Vector& xbar,
                               const Vector& sbar, const Vector& v) {
  const std::size_t n = a.cols();
  Vector w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = xbar[i] / sbar[i];
  Vector xv(n);
  for (std::size_t i = 0; i < n; ++i) xv[i] = xbar[i] * v[i];
  Vector z = spd_solve(weighted_normal_matrix(a, w), matvec(a, xv));
  Vector at_z = matvec_transpose(a, z);
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = at_z[i] / sbar[i];
  return out;
}

}  // namespace pathlp
