#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "pathlp/lp.hpp"
#include "pathlp/newton.hpp"
#include "pathlp/potential.hpp"
#include "pathlp/trace.hpp"
#include "pathlp/vector_ops.hpp"

namespace pathlp {

// Short-step configuration. The invariant region is ||x s - t||_2 <= t/4;
// steps of h = 1/(16 sqrt(n)) keep every iterate inside it.
struct L2Config {
  double step = 0.0;             // 0 selects the default 1/(16 sqrt(n))
  double centrality_cap = 0.25;
  int phase = 0;
  std::size_t iter_offset = 0;   // numbering offset for trace rows
  NormalSolver normal_solver;    // optional structured normal solve

  double effective_step(std::size_t n) const {
    const double def = 1.0 / (16.0 * std::sqrt(static_cast<double>(n)));
    if (step == 0.0) return def;
    if (!(step > 0.0) || step > def * (1.0 + 1e-12))
      throw PreconditionViolation("l2 step must lie in (0, 1/(16 sqrt(n))]");
    return step;
  }

  void validate(std::size_t n) const {
    effective_step(n);
    if (!(centrality_cap > 0.0) || centrality_cap > 0.25 * (1.0 + 1e-12))
      throw PreconditionViolation("centrality cap must lie in (0, 1/4]");
  }
};

namespace detail {

inline double phi_or_zero(const Vector& mu, double t,
                          const PotentialConfig& pot) {
  Vector r(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) r[i] = (mu[i] - t) / t;
  if (pot.lambda * norm_inf(r) > kPotentialArgCap) return 0.0;
  return potential(r, pot);
}

}  // namespace detail

// Path following in the l2 neighborhood: walks t geometrically toward t_end,
// recentering with one exact Newton step per move. Both decreasing and
// increasing t are supported; the contraction argument is direction
// agnostic. Returns the state at t_end with ||x s - t_end||_2 <= t_end / 6.
inline PathState l2_step_path(const LpInstance& lp, const PathState& start,
                              double t_end, const L2Config& cfg = {},
                              const TraceSink& trace = {}) {
  const std::size_t n = lp.num_variables();
  cfg.validate(n);
  if (!(t_end > 0.0)) throw PreconditionViolation("t_end must be positive");
  const double h = cfg.effective_step(n);
  const PotentialConfig pot = PotentialConfig::for_dimension(n);
  const NormalSolver solver =
      cfg.normal_solver ? cfg.normal_solver : make_dense_normal_solver(lp.a());

  Vector x = start.point().x();
  Vector s = start.point().s();
  Vector y = start.point().y();
  Vector mu = start.mu();
  double t = start.t();

  auto centrality = [&]() {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = mu[i] - t;
      acc += r * r;
    }
    return std::sqrt(acc) / t;
  };

  if (centrality() > cfg.centrality_cap * (1.0 + 1e-12))
    throw InvariantViolation("start violates ||xs - t||_2 <= t/4");

  std::size_t iter = cfg.iter_offset;
  Vector delta_mu(n);

  auto take_step = [&](double t_next) {
    for (std::size_t i = 0; i < n; ++i) delta_mu[i] = t_next - mu[i];
    // ||delta_mu / mu||_mu^2 bounds the post-step distance (and must stay
    // below min_i mu_i for the step to remain interior).
    double step_bound = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      step_bound += delta_mu[i] * delta_mu[i] / mu[i];

    NewtonDirection dir = solve_newton(lp.a(), x, s, delta_mu, solver);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += dir.dx[i];
      s[i] += dir.ds[i];
    }
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += dir.dy[i];
    t = t_next;
    for (std::size_t i = 0; i < n; ++i) {
      mu[i] = x[i] * s[i];
      if (!(x[i] > 0.0) || !(s[i] > 0.0))
        throw InvariantViolation("iterate left the positive orthant at " +
                                 std::to_string(i));
    }
    const double cent = centrality();
    if (cent * t > step_bound * (1.0 + 1e-8) + 1e-300)
      throw InvariantViolation("step exceeded quadratic contraction bound");
    if (cent > cfg.centrality_cap * (1.0 + 1e-12))
      throw InvariantViolation("centrality " + std::to_string(cent) +
                               " above cap after step");
    ++iter;
    if (trace) {
      TraceRecord rec;
      rec.iter = iter;
      rec.phase = cfg.phase;
      rec.t = t;
      rec.l2_centrality = cent;
      rec.phi = detail::phi_or_zero(mu, t, pot);
      rec.gap = 0.0;
      for (double m : mu) rec.gap += m;
      trace(rec);
    }
  };

  const bool decreasing = t_end <= t;
  std::size_t steps_taken = 0;
  while (t != t_end) {
    if (++steps_taken % kConsistencyRefreshPeriod == 0) {
      refresh_primal_feasibility(lp.a(), lp.b(), solver, x);
      for (std::size_t i = 0; i < n; ++i) mu[i] = x[i] * s[i];
    }
    const double t_next = decreasing ? std::max(t / (1.0 + h), t_end)
                                     : std::min(t * (1.0 + h), t_end);
    take_step(t_next);
  }
  // A start already at t_end only satisfies the t/4 cap; one centering step
  // tightens it to t/6.
  if (centrality() > 1.0 / 6.0) take_step(t);

  return PathState(PrimalDualPoint(lp, std::move(x), std::move(s), std::move(y)),
                   t);
}

}  // namespace pathlp
