#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathlp/dense_matrix.hpp"
#include "pathlp/errors.hpp"
#include "pathlp/linalg.hpp"
#include "pathlp/vector_ops.hpp"

namespace pathlp {

inline constexpr double kFeasibilityRelTol = 1e-8;

// A standard-form linear program: min c^T x subject to A x = b, x >= 0.
// A must have full row rank; rank-deficient inputs are rejected outright
// rather than repaired.
class LpInstance {
 public:
  LpInstance(DenseMatrix a, Vector b, Vector c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    if (a_.rows() == 0 || a_.cols() == 0)
      throw PreconditionViolation("empty constraint matrix");
    if (a_.rows() > a_.cols())
      throw RankDeficient("more constraints than variables (d > n)");
    if (b_.size() != a_.rows() || c_.size() != a_.cols())
      throw PreconditionViolation("b or c dimension mismatch");
    if (!a_.all_finite() || !all_finite(b_) || !all_finite(c_))
      throw PreconditionViolation("non-finite entries in instance");
    try {
      Vector ones(a_.cols(), 1.0);
      CholeskyFactor check(weighted_normal_matrix(a_, ones));
    } catch (const NotPositiveDefinite&) {
      throw RankDeficient("constraint matrix is numerically rank deficient");
    }
  }

  const DenseMatrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  const Vector& c() const { return c_; }
  std::size_t num_constraints() const { return a_.rows(); }
  std::size_t num_variables() const { return a_.cols(); }

 private:
  DenseMatrix a_;
  Vector b_;
  Vector c_;
};

// Conditioning parameters of an instance: a ball of radius r inside the
// feasible set, an outer bound R on feasible points and a bound L on ||c||_2.
struct LpParameters {
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  double lipschitz = 0.0;

  void validate() const {
    if (!(inner_radius > 0.0) || !(outer_radius > 0.0) || !(lipschitz > 0.0))
      throw PreconditionViolation("LP parameters must be positive");
    if (inner_radius > outer_radius)
      throw PreconditionViolation("inner radius exceeds outer radius");
  }

  void validate_against(const Vector& c) const {
    validate();
    const double cnorm = norm2(c);
    if (lipschitz < cnorm * (1.0 - 1e-12))
      throw PreconditionViolation("lipschitz constant below ||c||_2 = " +
                                  std::to_string(cnorm));
  }
};

// A strictly positive primal-dual pair with its dual certificate y.
// Feasibility is a construction invariant, not a warning.
class PrimalDualPoint {
 public:
  PrimalDualPoint(const LpInstance& lp, Vector x, Vector s, Vector y,
                  double rel_tol = kFeasibilityRelTol)
      : x_(std::move(x)), s_(std::move(s)), y_(std::move(y)) {
    if (x_.size() != lp.num_variables() || s_.size() != lp.num_variables() ||
        y_.size() != lp.num_constraints())
      throw PreconditionViolation("point dimension mismatch");
    if (!all_positive(x_)) throw PreconditionViolation("x not strictly positive");
    if (!all_positive(s_)) throw PreconditionViolation("s not strictly positive");
    Vector primal_res = matvec(lp.a(), x_);
    for (std::size_t i = 0; i < primal_res.size(); ++i)
      primal_res[i] -= lp.b()[i];
    if (norm2(primal_res) > rel_tol * (1.0 + norm2(lp.b())))
      throw PreconditionViolation("primal residual " +
                                  std::to_string(norm2(primal_res)));
    Vector dual_res = matvec_transpose(lp.a(), y_);
    for (std::size_t i = 0; i < dual_res.size(); ++i)
      dual_res[i] += s_[i] - lp.c()[i];
    if (norm2(dual_res) > rel_tol * (1.0 + norm2(lp.c())))
      throw PreconditionViolation("dual residual " +
                                  std::to_string(norm2(dual_res)));
  }

  const Vector& x() const { return x_; }
  const Vector& s() const { return s_; }
  const Vector& y() const { return y_; }

 private:
  Vector x_;
  Vector s_;
  Vector y_;
};

// A point tagged with its path parameter t. mu caches the componentwise
// product x s and matches it bit for bit.
class PathState {
 public:
  PathState(PrimalDualPoint point, double t)
      : point_(std::move(point)),
        t_(t),
        mu_(elementwise_mul(point_.x(), point_.s())) {
    if (!(t_ > 0.0)) throw PreconditionViolation("path parameter t <= 0");
  }

  const PrimalDualPoint& point() const { return point_; }
  double t() const { return t_; }
  const Vector& mu() const { return mu_; }

 private:
  PrimalDualPoint point_;
  double t_;
  Vector mu_;
};

// Duality gap x^T s of a feasible pair, cross-checked against the objective
// difference c^T x - b^T y it must equal.
inline double duality_gap(const LpInstance& lp, const PrimalDualPoint& p) {
  const double gap = dot(p.x(), p.s());
  const double obj_diff = dot(lp.c(), p.x()) - dot(lp.b(), p.y());
  if (std::fabs(obj_diff - gap) > 1e-6 * (1.0 + std::fabs(dot(lp.c(), p.x()))))
    throw InvariantViolation("duality gap mismatch: x^T s = " +
                             std::to_string(gap) + ", c^T x - b^T y = " +
                             std::to_string(obj_diff));
  return gap;
}

// ||x s - t 1||_2 / t, the scaled l2 distance from the central path.
inline double l2_centrality(const PathState& st) {
  double acc = 0.0;
  for (double m : st.mu()) {
    const double r = m - st.t();
    acc += r * r;
  }
  return std::sqrt(acc) / st.t();
}

struct CentralPathOracleOptions {
  int max_iterations = 500;
  double centrality_tol = 1e-10;
  std::optional<Vector> start;  // strictly positive, not necessarily feasible
};

// Test-scale ground truth for points on the central path: minimizes the
// barrier f_mu(x) = c^T x - sum_i mu_i ln x_i over {A x = b} by an
// infeasible-start damped Newton iteration. Deliberately a different
// algorithm from the production steppers.
inline PrimalDualPoint central_path_oracle(
    const LpInstance& lp, const Vector& mu,
    const CentralPathOracleOptions& opts = {}) {
  const std::size_t n = lp.num_variables();
  const std::size_t d = lp.num_constraints();
  if (n > 16)
    throw PreconditionViolation("central_path_oracle is capped at n <= 16");
  if (mu.size() != n || !all_positive(mu))
    throw PreconditionViolation("mu must be positive of length n");

  Vector x = opts.start.value_or(Vector(n, 1.0));
  if (x.size() != n || !all_positive(x))
    throw PreconditionViolation("oracle start must be positive of length n");
  Vector nu(d, 0.0);

  const double mu_inf = norm_inf(mu);
  const double b_scale = 1.0 + norm2(lp.b());

  auto residual_norm = [&](const Vector& xv, const Vector& nuv) {
    Vector rd = matvec_transpose(lp.a(), nuv);
    for (std::size_t i = 0; i < n; ++i)
      rd[i] += lp.c()[i] - mu[i] / xv[i];
    Vector rp = matvec(lp.a(), xv);
    for (std::size_t i = 0; i < d; ++i) rp[i] -= lp.b()[i];
    return std::sqrt(dot(rd, rd) + dot(rp, rp));
  };

  for (int it = 0; it < opts.max_iterations; ++it) {
    // Convergence: primal feasibility plus componentwise centrality of the
    // dual slack c - A^T y with y = -nu.
    Vector aty = matvec_transpose(lp.a(), nu);
    Vector rp = matvec(lp.a(), x);
    for (std::size_t i = 0; i < d; ++i) rp[i] -= lp.b()[i];
    double cent = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double slack = lp.c()[i] + aty[i];  // c - A^T y, y = -nu
      cent = std::max(cent, std::fabs(x[i] * slack - mu[i]));
    }
    if (cent <= opts.centrality_tol * mu_inf &&
        norm2(rp) <= kFeasibilityRelTol * b_scale) {
      Vector s(n);
      for (std::size_t i = 0; i < n; ++i) s[i] = mu[i] / x[i];
      Vector y(d);
      for (std::size_t i = 0; i < d; ++i) y[i] = -nu[i];
      return PrimalDualPoint(lp, std::move(x), std::move(s), std::move(y));
    }

    // Newton system on the KKT residual:
    //   [H A^T; A 0] (dx, dnu) = -(grad f + A^T nu, A x - b),  H = Diag(mu/x^2)
    Vector hinv(n);
    Vector g(n);
    for (std::size_t i = 0; i < n; ++i) {
      hinv[i] = x[i] * x[i] / mu[i];
      g[i] = lp.c()[i] - mu[i] / x[i] + aty[i];
    }
    Vector rhs = matvec(lp.a(), elementwise_mul(hinv, g));
    for (std::size_t i = 0; i < d; ++i) rhs[i] = rp[i] - rhs[i];
    Vector dnu = spd_solve(weighted_normal_matrix(lp.a(), hinv), rhs);
    Vector at_dnu = matvec_transpose(lp.a(), dnu);
    Vector dx(n);
    for (std::size_t i = 0; i < n; ++i)
      dx[i] = -hinv[i] * (g[i] + at_dnu[i]);

    // Damping: stay strictly positive, then backtrack on the KKT residual.
    double alpha = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (dx[i] < 0.0) alpha = std::min(alpha, -0.99 * x[i] / dx[i]);
    const double res0 = residual_norm(x, nu);
    Vector x_try(n), nu_try(d);
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) x_try[i] = x[i] + alpha * dx[i];
      for (std::size_t i = 0; i < d; ++i) nu_try[i] = nu[i] + alpha * dnu[i];
      if (residual_norm(x_try, nu_try) <= (1.0 - 0.01 * alpha) * res0) break;
      alpha *= 0.5;
    }
    x = x_try;
    nu = nu_try;
  }
  throw NoConvergence("central path oracle did not converge");
}

}  // namespace pathlp
