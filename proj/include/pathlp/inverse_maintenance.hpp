#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pathlp/linalg.hpp"
#include "pathlp/lp.hpp"
#include "pathlp/newton.hpp"
#include "pathlp/potential.hpp"
#include "pathlp/robust_step.hpp"
#include "pathlp/trace.hpp"
#include "pathlp/vector_ops.hpp"

namespace pathlp {

// Acceptable residual of a maintained solution column before the update
// chain is declared stale and rebuilt densely.
inline constexpr double kMaintainResidualTol = 1e-8;

// Dense assembly of the Newton block matrix
//   M = [ Sbar  Xbar  0    grad Phi(rbar) ]
//       [ A     0     0    0              ]
//       [ 0     I     A^T  0              ]
//       [ 0     0     0    -1             ]
// of dimension 2n + d + 1. The last column folds the right-hand side into
// the matrix, so vector drift and matrix drift share one update stream.
inline DenseMatrix assemble_block(const DenseMatrix& a, const Vector& xbar,
                                  const Vector& sbar, const Vector& rbar,
                                  const PotentialConfig& cfg) {
  const std::size_t n = a.cols();
  const std::size_t d = a.rows();
  if (!all_positive(xbar) || !all_positive(sbar))
    throw PreconditionViolation("assemble_block requires positive xbar, sbar");
  Vector g = potential_gradient(rbar, cfg);
  const std::size_t m = 2 * n + d + 1;
  DenseMatrix out(m, m);
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = sbar[i];
    out(i, n + i) = xbar[i];
    out(i, 2 * n + d) = g[i];
  }
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i) out(n + j, i) = a(j, i);
  for (std::size_t i = 0; i < n; ++i) {
    out(n + d + i, n + i) = 1.0;
    for (std::size_t j = 0; j < d; ++j) out(n + d + i, 2 * n + j) = a(j, i);
  }
  out(m - 1, m - 1) = -1.0;
  return out;
}

namespace maintain_detail {

// M v exploiting the block sparsity; O(nd) instead of O(m^2).
inline Vector block_matvec(const DenseMatrix& a, const Vector& xbar,
                           const Vector& sbar, const Vector& g,
                           const Vector& v) {
  const std::size_t n = a.cols();
  const std::size_t d = a.rows();
  const std::size_t m = 2 * n + d + 1;
  Vector out(m, 0.0);
  const double v_last = v[m - 1];
  for (std::size_t i = 0; i < n; ++i)
    out[i] = sbar[i] * v[i] + xbar[i] * v[n + i] + g[i] * v_last;
  for (std::size_t j = 0; j < d; ++j) {
    const double* row = a.row_data(j);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += row[i] * v[i];
    out[n + j] = acc;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double acc = v[n + i];
    for (std::size_t j = 0; j < d; ++j) acc += a(j, i) * v[2 * n + j];
    out[n + d + i] = acc;
  }
  out[m - 1] = -v_last;
  return out;
}

}  // namespace maintain_detail

struct MaintainCounters {
  std::size_t refreshes = 0;
  std::size_t dense_rebuilds = 0;   // initial build plus fallbacks
  std::size_t dense_fallbacks = 0;  // rescues outside the schedule
  std::size_t solve_columns = 0;    // sum of pending ranks over lazy solves
  std::size_t refresh_columns = 0;  // sum of pending ranks over refreshes
  std::size_t qq_solves = 0;        // middle-system factorizations
  std::size_t max_pending = 0;
};

// Snapshot inverse T of the Newton block matrix plus the maintained solution
// column. Between snapshots, solves are answered through the Woodbury
// identity against the pending column drift; every 2^{ell_star} steps the
// snapshot itself is advanced.
class MaintainedInverse {
 public:
  MaintainedInverse(const DenseMatrix& a, Vector xbar, Vector sbar, Vector g,
                    std::size_t ell_star)
      : a_(&a),
        n_(a.cols()),
        d_(a.rows()),
        m_(2 * a.cols() + a.rows() + 1),
        ell_star_(ell_star),
        xbar0_(std::move(xbar)),
        sbar0_(std::move(sbar)),
        g0_(std::move(g)) {
    rebuild_dense(xbar0_, sbar0_, g0_);
    counters_.dense_rebuilds = 1;  // initial build is not a fallback
  }

  std::size_t ell_star() const { return ell_star_; }
  std::size_t refresh_period() const { return std::size_t{1} << ell_star_; }
  const Vector& maintained_column() const { return u_; }
  const Vector& last_solution() const { return v_; }
  const MaintainCounters& counters() const { return counters_; }
  bool stale() const { return stale_; }

  // Pending drift of the current triple against the snapshot, as
  // replacement columns of M.
  LowRankDelta pending_delta(const Vector& xbar, const Vector& sbar,
                             const Vector& g) const {
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < n_; ++i)
      if (sbar[i] != sbar0_[i]) cols.push_back(i);
    for (std::size_t i = 0; i < n_; ++i)
      if (xbar[i] != xbar0_[i]) cols.push_back(n_ + i);
    bool g_changed = false;
    for (std::size_t i = 0; i < n_; ++i)
      if (g[i] != g0_[i]) {
        g_changed = true;
        break;
      }
    if (g_changed) cols.push_back(m_ - 1);

    LowRankDelta delta;
    delta.col_indices = cols;
    delta.new_columns = DenseMatrix(m_, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const std::size_t c = cols[j];
      if (c < n_) {
        delta.new_columns(c, j) = sbar[c];
        for (std::size_t row = 0; row < d_; ++row)
          delta.new_columns(n_ + row, j) = (*a_)(row, c);
      } else if (c < 2 * n_) {
        const std::size_t i = c - n_;
        delta.new_columns(i, j) = xbar[i];
        delta.new_columns(n_ + d_ + i, j) = 1.0;
      } else {
        for (std::size_t i = 0; i < n_; ++i)
          delta.new_columns(i, j) = g[i];
        delta.new_columns(m_ - 1, j) = -1.0;
      }
    }
    return delta;
  }

  // Lazy solve: v = M^{-1} e_m through the Woodbury identity against the
  // snapshot column u. Falls back to the normal-equation route when the
  // update chain has lost accuracy.
  const Vector& solve(const Vector& xbar, const Vector& sbar,
                      const Vector& g) {
    LowRankDelta delta = pending_delta(xbar, sbar, g);
    const std::size_t q = delta.rank();
    counters_.solve_columns += q;
    counters_.max_pending = std::max(counters_.max_pending, q);
    last_rank_ = q;
    bool ok = !stale_;
    if (ok && q == 0) {
      v_ = u_;  // verified against the snapshot at the last refresh
      return v_;
    }
    if (ok) {
      try {
        counters_.qq_solves += 1;
        Vector e(m_, 0.0);
        e[m_ - 1] = 1.0;
        v_ = woodbury_apply(t_, u_, delta, e);
        ok = residual_ok(xbar, sbar, g, v_);
      } catch (const SingularUpdate&) {
        ok = false;
      }
    }
    if (!ok) {
      counters_.dense_fallbacks += 1;
      stale_ = true;
      NewtonDirection dir = solve_newton(*a_, xbar, sbar, g);
      v_.assign(m_, 0.0);
      for (std::size_t i = 0; i < n_; ++i) {
        v_[i] = dir.dx[i];
        v_[n_ + i] = dir.ds[i];
      }
      for (std::size_t j = 0; j < d_; ++j) v_[2 * n_ + j] = dir.dy[j];
      v_[m_ - 1] = -1.0;
    }
    return v_;
  }

  // Scheduled snapshot advance: T absorbs the pending columns through
  // woodbury_update, u becomes the last column of the new T. A stale or
  // singular chain is rebuilt densely instead.
  void refresh(const Vector& xbar, const Vector& sbar, const Vector& g) {
    LowRankDelta delta = pending_delta(xbar, sbar, g);
    counters_.refreshes += 1;
    counters_.refresh_columns += delta.rank();
    last_rank_ = delta.rank();
    bool ok = !stale_;
    if (ok && delta.rank() > 0) {
      try {
        counters_.qq_solves += 1;
        DenseMatrix t_next = woodbury_update(t_, delta);
        Vector u_next(m_);
        for (std::size_t i = 0; i < m_; ++i) u_next[i] = t_next(i, m_ - 1);
        if (residual_ok(xbar, sbar, g, u_next)) {
          t_ = std::move(t_next);
          u_ = std::move(u_next);
        } else {
          ok = false;
        }
      } catch (const SingularUpdate&) {
        ok = false;
      }
    }
    if (!ok) {
      counters_.dense_fallbacks += 1;
      rebuild_dense(xbar, sbar, g);
      counters_.dense_rebuilds += 1;
    }
    xbar0_ = xbar;
    sbar0_ = sbar;
    g0_ = g;
    v_ = u_;
    stale_ = false;
  }

  std::size_t last_rank() const { return last_rank_; }

  double solution_residual(const Vector& xbar, const Vector& sbar,
                           const Vector& g, const Vector& v) const {
    Vector res = maintain_detail::block_matvec(*a_, xbar, sbar, g, v);
    res[m_ - 1] -= 1.0;
    return norm_inf(res);
  }

 private:
  bool residual_ok(const Vector& xbar, const Vector& sbar, const Vector& g,
                   const Vector& v) const {
    return solution_residual(xbar, sbar, g, v) <= kMaintainResidualTol;
  }

  void rebuild_dense(const Vector& xbar, const Vector& sbar, const Vector& g) {
    const std::size_t n = n_;
    DenseMatrix m(m_, m_);
    for (std::size_t i = 0; i < n; ++i) {
      m(i, i) = sbar[i];
      m(i, n + i) = xbar[i];
      m(i, m_ - 1) = g[i];
    }
    for (std::size_t j = 0; j < d_; ++j)
      for (std::size_t i = 0; i < n; ++i) m(n + j, i) = (*a_)(j, i);
    for (std::size_t i = 0; i < n; ++i) {
      m(n + d_ + i, n + i) = 1.0;
      for (std::size_t j = 0; j < d_; ++j) m(n + d_ + i, 2 * n + j) = (*a_)(j, i);
    }
    m(m_ - 1, m_ - 1) = -1.0;
    t_ = invert_dense(m);
    u_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) u_[i] = t_(i, m_ - 1);
    v_ = u_;
  }

  const DenseMatrix* a_;
  std::size_t n_, d_, m_;
  std::size_t ell_star_;
  Vector xbar0_, sbar0_, g0_;
  DenseMatrix t_;
  Vector u_;
  Vector v_;
  bool stale_ = false;
  std::size_t last_rank_ = 0;
  MaintainCounters counters_;
};

// 2^{2 ell*} = min(n^alpha, n^{2/3}) with the conservative alpha = 0.31;
// only measured costs depend on the choice.
inline std::size_t default_ell_star(std::size_t n) {
  const double nn = static_cast<double>(n);
  const double target = std::min(std::pow(nn, 0.31), std::pow(nn, 2.0 / 3.0));
  std::size_t ell = 0;
  while (std::pow(2.0, 2.0 * static_cast<double>(ell + 1)) <= target) ++ell;
  return ell;
}

struct FastRobustOptions {
  int phase = 0;
  std::size_t iter_offset = 0;
  bool check_against_dense = false;  // compare every solve with a dense solve
  double dense_check_tol = 1e-6;
};

struct FastRobustStats {
  std::size_t iterations = 0;
  MaintainCounters maintain;
  double max_dense_mismatch = 0.0;
};

// The robust stepper with its linear algebra served by the maintained
// inverse. Semantics match robust_step_path with the SelectVector oracle;
// only the solve route differs.
inline PathState fast_robust_step_path(const LpInstance& lp,
                                       const PathState& start, double t_end,
                                       const PotentialConfig& cfg,
                                       std::size_t ell_star,
                                       const TraceSink& trace = {},
                                       const FastRobustOptions& opts = {},
                                       FastRobustStats* stats = nullptr) {
  const std::size_t n = lp.num_variables();
  const std::size_t d = lp.num_constraints();
  const std::size_t m = 2 * n + d + 1;
  cfg.validate(n);
  if (!(t_end > 0.0)) throw PreconditionViolation("t_end must be positive");
  const double h = cfg.step;

  Vector x = start.point().x();
  Vector s = start.point().s();
  Vector y = start.point().y();
  double t = start.t();

  Vector r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = (x[i] * s[i] - t) / t;
  double phi = potential(r, cfg);
  if (phi > cfg.phi_cap * (1.0 + 1e-6))
    throw InvariantViolation("start potential above cap");

  SelectVectorOracle oracle(cfg.lambda);
  ApproxTriple triple = oracle.select(x, s, r);
  Vector g = potential_gradient(triple.rbar, cfg);

  MaintainedInverse mi(lp.a(), triple.xbar, triple.sbar, g, ell_star);
  const NormalSolver consistency_solver = make_dense_normal_solver(lp.a());

  std::size_t iter = opts.iter_offset;
  std::size_t k = 0;
  Vector r_prev(n);
  const bool decreasing = t_end <= t;

  while (t != t_end) {
    if (k > 0 && k % kConsistencyRefreshPeriod == 0) {
      refresh_primal_feasibility(lp.a(), lp.b(), consistency_solver, x);
      for (std::size_t i = 0; i < n; ++i) r[i] = (x[i] * s[i] - t) / t;
    }
    bool refreshed = false;
    Vector v;
    if (k % mi.refresh_period() == 0) {
      mi.refresh(triple.xbar, triple.sbar, g);
      v = mi.maintained_column();
      refreshed = true;
    } else {
      v = mi.solve(triple.xbar, triple.sbar, g);
    }
    const std::size_t rank_used = mi.last_rank();

    if (opts.check_against_dense) {
      DenseMatrix dense = assemble_block(lp.a(), triple.xbar, triple.sbar,
                                         triple.rbar, cfg);
      Vector e(m, 0.0);
      e[m - 1] = 1.0;
      LuFactor lu(dense);
      Vector v_ref = lu.solve(e);
      double mismatch = 0.0;
      const double scale = std::max(1.0, norm_inf(v_ref));
      for (std::size_t i = 0; i < m; ++i)
        mismatch = std::max(mismatch, std::fabs(v[i] - v_ref[i]) / scale);
      if (stats)
        stats->max_dense_mismatch =
            std::max(stats->max_dense_mismatch, mismatch);
      if (mismatch > opts.dense_check_tol)
        throw InvariantViolation("maintained solve deviates from dense by " +
                                 std::to_string(mismatch));
    }

    const double t_next = decreasing ? std::max(t / (1.0 + h), t_end)
                                     : std::min(t * (1.0 + h), t_end);
    const double g_norm = norm2(g);
    double lnx_drift = 0.0, lns_drift = 0.0;
    double x_rel = 0.0, s_rel = 0.0;
    if (g_norm > 1e-300) {
      const double scale = -t_next / (32.0 * cfg.lambda * g_norm);
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = scale * v[i];
        const double ds = scale * v[n + i];
        const double rx = dx / x[i];
        const double rs = ds / s[i];
        x_rel += rx * rx;
        s_rel += rs * rs;
        lnx_drift += std::log1p(rx) * std::log1p(rx);
        lns_drift += std::log1p(rs) * std::log1p(rs);
        x[i] += dx;
        s[i] += ds;
        if (!(x[i] > 0.0) || !(s[i] > 0.0))
          throw InvariantViolation("iterate left the positive orthant");
      }
      for (std::size_t j = 0; j < d; ++j) y[j] += scale * v[2 * n + j];
    }
    t = t_next;
    r_prev = r;
    for (std::size_t i = 0; i < n; ++i) r[i] = (x[i] * s[i] - t) / t;
    phi = potential(r, cfg);
    if (phi > cfg.phi_cap * (1.0 + 1e-6))
      throw InvariantViolation("potential above cap after step");

    triple = oracle.select(x, s, r);
    if (!oracle.last_changed_r().empty()) {
      detail::check_potential_arg(triple.rbar, cfg.lambda);
      for (std::size_t i : oracle.last_changed_r())
        g[i] = cfg.lambda * std::sinh(cfg.lambda * triple.rbar[i]);
    }

    ++k;
    ++iter;
    if (trace) {
      TraceRecord rec;
      rec.iter = iter;
      rec.phase = opts.phase;
      rec.t = t;
      double cent = 0.0, gap = 0.0, r_drift = 0.0, r_inf = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cent += r[i] * r[i];
        gap += x[i] * s[i];
        const double dr = r[i] - r_prev[i];
        r_drift += dr * dr;
        r_inf = std::max(r_inf, std::fabs(r[i]));
      }
      rec.l2_centrality = std::sqrt(cent);
      rec.phi = phi;
      rec.gap = gap;
      rec.update_rank = rank_used;
      rec.snapshot_refresh = refreshed;
      rec.r_step_norm = std::sqrt(r_drift);
      rec.ln_x_step_norm = std::sqrt(lnx_drift);
      rec.ln_s_step_norm = std::sqrt(lns_drift);
      rec.x_rel_step_norm = std::sqrt(x_rel);
      rec.s_rel_step_norm = std::sqrt(s_rel);
      rec.mu_inf_gap = r_inf;
      trace(rec);
    }
  }

  if (stats) {
    stats->iterations = k;
    stats->maintain = mi.counters();
  }
  return PathState(PrimalDualPoint(lp, std::move(x), std::move(s), std::move(y)),
                   t);
}

}  // namespace pathlp
