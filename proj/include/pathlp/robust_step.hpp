#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pathlp/lp.hpp"
#include "pathlp/newton.hpp"
#include "pathlp/potential.hpp"
#include "pathlp/shadow_vector.hpp"
#include "pathlp/trace.hpp"
#include "pathlp/vector_ops.hpp"

namespace pathlp {

// Slowly updated surrogates for the true iterates, close in the scales the
// stepping analysis needs:
//   ||ln xbar - ln x||_inf <= 1/48, ||ln sbar - ln s||_inf <= 1/48,
//   ||rbar - r||_inf <= 1/(48 lambda).
struct ApproxTriple {
  Vector xbar;
  Vector sbar;
  Vector rbar;
};

inline constexpr double kLnBound = 1.0 / 48.0;

// Supplies the surrogate triple once per iteration. Implementations see the
// true (x, s, r) after every step, in order.
class ApproxOracle {
 public:
  virtual ~ApproxOracle() = default;
  virtual ApproxTriple select(const Vector& x, const Vector& s,
                              const Vector& r) = 0;
};

// xbar = x, sbar = s, rbar = r. Ground truth for tests.
class ExactOracle : public ApproxOracle {
 public:
  ApproxTriple select(const Vector& x, const Vector& s,
                      const Vector& r) override {
    return ApproxTriple{x, s, r};
  }
};

// Lazy oracle: three shadow vectors over ln x, ln s and r with tolerances
// 1/48, 1/48 and 1/(48 lambda). Coordinate rewrites follow the dyadic
// schedule, so consecutive triples differ in few positions.
class SelectVectorOracle : public ApproxOracle {
 public:
  explicit SelectVectorOracle(double lambda) : lambda_(lambda) {}

  ApproxTriple select(const Vector& x, const Vector& s,
                      const Vector& r) override {
    const std::size_t n = x.size();
    Vector ln_x(n), ln_s(n);
    for (std::size_t i = 0; i < n; ++i) {
      ln_x[i] = std::log(x[i]);
      ln_s[i] = std::log(s[i]);
    }
    if (!shadow_ln_x_) {
      shadow_ln_x_ = std::make_unique<ShadowVector>(ln_x, kLnBound);
      shadow_ln_s_ = std::make_unique<ShadowVector>(ln_s, kLnBound);
      shadow_r_ = std::make_unique<ShadowVector>(r, 1.0 / (48.0 * lambda_));
      xbar_ = x;
      sbar_ = s;
      last_changed_x_.clear();
      last_changed_s_.clear();
      last_changed_r_.clear();
    } else {
      last_changed_x_ = shadow_ln_x_->advance(ln_x);
      last_changed_s_ = shadow_ln_s_->advance(ln_s);
      last_changed_r_ = shadow_r_->advance(r);
      for (std::size_t i : last_changed_x_)
        xbar_[i] = std::exp(shadow_ln_x_->value()[i]);
      for (std::size_t i : last_changed_s_)
        sbar_[i] = std::exp(shadow_ln_s_->value()[i]);
    }
    return ApproxTriple{xbar_, sbar_, shadow_r_->value()};
  }

  const std::vector<std::size_t>& last_changed_x() const {
    return last_changed_x_;
  }
  const std::vector<std::size_t>& last_changed_s() const {
    return last_changed_s_;
  }
  const std::vector<std::size_t>& last_changed_r() const {
    return last_changed_r_;
  }

 private:
  double lambda_;
  std::unique_ptr<ShadowVector> shadow_ln_x_;
  std::unique_ptr<ShadowVector> shadow_ln_s_;
  std::unique_ptr<ShadowVector> shadow_r_;
  Vector xbar_;
  Vector sbar_;
  std::vector<std::size_t> last_changed_x_;
  std::vector<std::size_t> last_changed_s_;
  std::vector<std::size_t> last_changed_r_;
};

struct RobustStepOptions {
  int phase = 0;
  std::size_t iter_offset = 0;
  bool check_oracle = false;     // verify the surrogate contract every step
  NormalSolver normal_solver;
};

namespace robust_detail {

inline void check_triple(const ApproxTriple& triple, const Vector& x,
                         const Vector& s, const Vector& r, double lambda) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::fabs(std::log(triple.xbar[i]) - std::log(x[i])) >
        kLnBound * (1.0 + 1e-9))
      throw OracleContractViolation("xbar drifted at " + std::to_string(i));
    if (std::fabs(std::log(triple.sbar[i]) - std::log(s[i])) >
        kLnBound * (1.0 + 1e-9))
      throw OracleContractViolation("sbar drifted at " + std::to_string(i));
    if (std::fabs(triple.rbar[i] - r[i]) >
        (1.0 / (48.0 * lambda)) * (1.0 + 1e-9))
      throw OracleContractViolation("rbar drifted at " + std::to_string(i));
  }
}

}  // namespace robust_detail

// Path following in the cosh-potential neighborhood Phi(r) <= 16n. Each
// iteration takes the step delta_mu = -(t'/(32 lambda)) g / ||g||_2 with
// g = grad Phi(rbar), solved against the surrogate (xbar, sbar). The exact
// iterates only enter through the oracle.
inline PathState robust_step_path(const LpInstance& lp, const PathState& start,
                                  double t_end, const PotentialConfig& cfg,
                                  ApproxOracle& oracle,
                                  const TraceSink& trace = {},
                                  const RobustStepOptions& opts = {}) {
  const std::size_t n = lp.num_variables();
  cfg.validate(n);
  if (!(t_end > 0.0)) throw PreconditionViolation("t_end must be positive");
  const double h = cfg.step;
  const NormalSolver solver = opts.normal_solver
                                  ? opts.normal_solver
                                  : make_dense_normal_solver(lp.a());

  Vector x = start.point().x();
  Vector s = start.point().s();
  Vector y = start.point().y();
  double t = start.t();

  Vector r(n);
  auto refresh_r = [&]() {
    for (std::size_t i = 0; i < n; ++i) r[i] = (x[i] * s[i] - t) / t;
  };
  refresh_r();

  double phi = potential(r, cfg);
  if (phi > cfg.phi_cap * (1.0 + 1e-6))
    throw InvariantViolation("start potential " + std::to_string(phi) +
                             " above cap " + std::to_string(cfg.phi_cap));

  std::size_t iter = opts.iter_offset;
  Vector delta_mu(n), r_prev(n);

  const bool decreasing = t_end <= t;
  std::size_t steps_taken = 0;
  while (t != t_end) {
    if (++steps_taken % kConsistencyRefreshPeriod == 0) {
      refresh_primal_feasibility(lp.a(), lp.b(), solver, x);
      refresh_r();
    }
    ApproxTriple triple = oracle.select(x, s, r);
    if (opts.check_oracle)
      robust_detail::check_triple(triple, x, s, r, cfg.lambda);

    const double t_next = decreasing ? std::max(t / (1.0 + h), t_end)
                                     : std::min(t * (1.0 + h), t_end);
    Vector g = potential_gradient(triple.rbar, cfg);
    const double g_norm = norm2(g);

    double lnx_drift = 0.0, lns_drift = 0.0;
    double x_rel = 0.0, s_rel = 0.0;
    if (g_norm > 1e-300) {
      const double scale = -t_next / (32.0 * cfg.lambda * g_norm);
      for (std::size_t i = 0; i < n; ++i) delta_mu[i] = scale * g[i];
      NewtonDirection dir =
          solve_newton(lp.a(), triple.xbar, triple.sbar, delta_mu, solver);
      for (std::size_t i = 0; i < n; ++i) {
        const double rx = dir.dx[i] / x[i];
        const double rs = dir.ds[i] / s[i];
        x_rel += rx * rx;
        s_rel += rs * rs;
        lnx_drift += std::log1p(rx) * std::log1p(rx);
        lns_drift += std::log1p(rs) * std::log1p(rs);
        x[i] += dir.dx[i];
        s[i] += dir.ds[i];
        if (!(x[i] > 0.0) || !(s[i] > 0.0))
          throw InvariantViolation("iterate left the positive orthant at " +
                                   std::to_string(i));
      }
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += dir.dy[i];
    }
    // On the path exactly (g = 0): only t moves.
    t = t_next;
    r_prev = r;
    refresh_r();
    phi = potential(r, cfg);
    if (phi > cfg.phi_cap * (1.0 + 1e-6))
      throw InvariantViolation("potential " + std::to_string(phi) +
                               " above cap after step");
    ++iter;
    if (trace) {
      TraceRecord rec;
      rec.iter = iter;
      rec.phase = opts.phase;
      rec.t = t;
      double cent = 0.0, gap = 0.0;
      double r_drift = 0.0, r_inf = 0.0;
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
      rec.r_step_norm = std::sqrt(r_drift);
      rec.ln_x_step_norm = std::sqrt(lnx_drift);
      rec.ln_s_step_norm = std::sqrt(lns_drift);
      rec.x_rel_step_norm = std::sqrt(x_rel);
      rec.s_rel_step_norm = std::sqrt(s_rel);
      rec.mu_inf_gap = r_inf;
      trace(rec);
    }
  }

  return PathState(PrimalDualPoint(lp, std::move(x), std::move(s), std::move(y)),
                   t);
}

// Centering at fixed t: gradient steps only, until Phi(r) <= phi_target.
// Used to restore the potential invariant after a phase handoff perturbs
// the iterate.
inline PathState robust_recenter(const LpInstance& lp, const PathState& start,
                                 const PotentialConfig& cfg,
                                 ApproxOracle& oracle, double phi_target,
                                 int max_iterations,
                                 const TraceSink& trace = {},
                                 const RobustStepOptions& opts = {}) {
  const std::size_t n = lp.num_variables();
  const double t = start.t();
  const NormalSolver solver = opts.normal_solver
                                  ? opts.normal_solver
                                  : make_dense_normal_solver(lp.a());

  Vector x = start.point().x();
  Vector s = start.point().s();
  Vector y = start.point().y();
  Vector r(n), delta_mu(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = (x[i] * s[i] - t) / t;

  std::size_t iter = opts.iter_offset;
  for (int k = 0; k < max_iterations; ++k) {
    double phi = potential(r, cfg);
    if (phi <= phi_target) break;
    ApproxTriple triple = oracle.select(x, s, r);
    Vector g = potential_gradient(triple.rbar, cfg);
    const double g_norm = norm2(g);
    if (g_norm <= 1e-300) break;
    const double scale = -t / (32.0 * cfg.lambda * g_norm);
    for (std::size_t i = 0; i < n; ++i) delta_mu[i] = scale * g[i];
    NewtonDirection dir =
        solve_newton(lp.a(), triple.xbar, triple.sbar, delta_mu, solver);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += dir.dx[i];
      s[i] += dir.ds[i];
      if (!(x[i] > 0.0) || !(s[i] > 0.0))
        throw InvariantViolation("recentering left the positive orthant");
      r[i] = (x[i] * s[i] - t) / t;
    }
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += dir.dy[i];
    ++iter;
    if (trace) {
      TraceRecord rec;
      rec.iter = iter;
      rec.phase = opts.phase;
      rec.t = t;
      double cent = 0.0, gap = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cent += r[i] * r[i];
        gap += x[i] * s[i];
      }
      rec.l2_centrality = std::sqrt(cent);
      rec.phi = potential(r, cfg);
      rec.gap = gap;
      trace(rec);
    }
  }
  const double phi = potential(r, cfg);
  if (phi > phi_target)
    throw NoConvergence("recentering stalled at potential " +
                        std::to_string(phi));
  return PathState(PrimalDualPoint(lp, std::move(x), std::move(s), std::move(y)),
                   t);
}

}  // namespace pathlp
