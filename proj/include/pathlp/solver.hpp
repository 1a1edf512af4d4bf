#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "pathlp/initializer.hpp"
#include "pathlp/inverse_maintenance.hpp"
#include "pathlp/l2_step.hpp"
#include "pathlp/lp.hpp"
#include "pathlp/robust_step.hpp"
#include "pathlp/trace.hpp"

namespace pathlp {

enum class SolveMode { l2, robust, fast };

inline const char* mode_name(SolveMode mode) {
  switch (mode) {
    case SolveMode::l2: return "l2";
    case SolveMode::robust: return "robust";
    case SolveMode::fast: return "fast";
  }
  return "?";
}

struct SolveConfig {
  std::optional<std::size_t> ell_star;  // fast mode snapshot exponent
  TraceSink trace;
  bool check_oracle = false;
  bool check_against_dense = false;
  int max_recenter_iterations = 1 << 20;
};

struct SolveReport {
  Vector x;
  double objective = 0.0;
  double gap_certificate = 0.0;
  std::size_t iterations = 0;
  SolveMode mode = SolveMode::l2;
  std::size_t fallback_count = 0;
  double wall_time = 0.0;
};

// End-to-end driver. Phase 1 walks the modified program from its explicit
// central point at t0 down to t = LR, extraction maps the iterate back to
// the original program, and phase 2 walks from LR down to
// t_end = delta L R / (2n), certifying c^T x <= OPT + delta L R through the
// duality gap.
inline SolveReport solve(const LpInstance& lp, LpParameters params,
                         double delta, SolveMode mode,
                         const SolveConfig& config = {}) {
  const auto t_begin = std::chrono::steady_clock::now();
  if (!(delta > 0.0)) throw PreconditionViolation("delta must be positive");
  const std::size_t n = lp.num_variables();
  if (params.lipschitz == 0.0) params.lipschitz = norm2(lp.c());
  params.validate_against(lp.c());

  const double epsilon = 1.0 / (100.0 * std::sqrt(static_cast<double>(n)));
  auto [modified, start] = build_modified(lp, params, epsilon);

  const double lr = params.lipschitz * params.outer_radius;
  const double t_end = delta * lr / (2.0 * static_cast<double>(n));

  std::size_t iterations = 0;
  TraceSink counting_trace = [&](const TraceRecord& rec) {
    ++iterations;
    if (config.trace) config.trace(rec);
  };

  SolveReport report;
  report.mode = mode;

  const std::size_t n_mod = modified.lp().num_variables();
  NormalSolver phase1_solver =
      make_modified_normal_solver(modified.original().a());

  PathState at_lr = [&]() -> PathState {
    switch (mode) {
      case SolveMode::l2: {
        L2Config cfg;
        cfg.phase = 1;
        cfg.normal_solver = phase1_solver;
        return l2_step_path(modified.lp(), start, lr, cfg, counting_trace);
      }
      case SolveMode::robust: {
        PotentialConfig cfg = PotentialConfig::for_dimension(n_mod);
        SelectVectorOracle oracle(cfg.lambda);
        RobustStepOptions opts;
        opts.phase = 1;
        opts.check_oracle = config.check_oracle;
        opts.normal_solver = phase1_solver;
        return robust_step_path(modified.lp(), start, lr, cfg, oracle,
                                counting_trace, opts);
      }
      case SolveMode::fast: {
        PotentialConfig cfg = PotentialConfig::for_dimension(n_mod);
        FastRobustOptions opts;
        opts.phase = 1;
        opts.check_against_dense = config.check_against_dense;
        FastRobustStats stats;
        PathState out = fast_robust_step_path(
            modified.lp(), start, lr, cfg,
            config.ell_star.value_or(default_ell_star(n_mod)), counting_trace,
            opts, &stats);
        report.fallback_count += stats.maintain.dense_fallbacks;
        return out;
      }
    }
    throw PreconditionViolation("unknown mode");
  }();

  PrimalDualPoint handoff = extract(modified, at_lr);
  PathState phase2_start(std::move(handoff), lr);

  if (mode != SolveMode::l2) {
    // The potential is measured against n instead of 2n+1 coordinates after
    // extraction, and the extraction itself perturbs the products, so the
    // invariant Phi <= 16n can be exceeded at entry. Centering steps at
    // fixed t restore it before phase 2 begins.
    PotentialConfig cfg = PotentialConfig::for_dimension(n);
    Vector r(n);
    for (std::size_t i = 0; i < n; ++i)
      r[i] = (phase2_start.mu()[i] - lr) / lr;
    if (potential(r, cfg) > cfg.phi_cap) {
      ExactOracle oracle;
      RobustStepOptions opts;
      opts.phase = 2;
      opts.iter_offset = iterations;
      phase2_start = robust_recenter(lp, phase2_start, cfg, oracle,
                                     0.5 * cfg.phi_cap,
                                     config.max_recenter_iterations,
                                     counting_trace, opts);
    }
  }

  PathState final_state = [&]() -> PathState {
    switch (mode) {
      case SolveMode::l2: {
        L2Config cfg;
        cfg.phase = 2;
        cfg.iter_offset = iterations;
        return l2_step_path(lp, phase2_start, t_end, cfg, counting_trace);
      }
      case SolveMode::robust: {
        PotentialConfig cfg = PotentialConfig::for_dimension(n);
        SelectVectorOracle oracle(cfg.lambda);
        RobustStepOptions opts;
        opts.phase = 2;
        opts.iter_offset = iterations;
        opts.check_oracle = config.check_oracle;
        return robust_step_path(lp, phase2_start, t_end, cfg, oracle,
                                counting_trace, opts);
      }
      case SolveMode::fast: {
        PotentialConfig cfg = PotentialConfig::for_dimension(n);
        FastRobustOptions opts;
        opts.phase = 2;
        opts.iter_offset = iterations;
        opts.check_against_dense = config.check_against_dense;
        FastRobustStats stats;
        PathState out = fast_robust_step_path(
            lp, phase2_start, t_end, cfg,
            config.ell_star.value_or(default_ell_star(n)), counting_trace,
            opts, &stats);
        report.fallback_count += stats.maintain.dense_fallbacks;
        return out;
      }
    }
    throw PreconditionViolation("unknown mode");
  }();

  report.x = final_state.point().x();
  report.objective = dot(lp.c(), report.x);
  report.gap_certificate = duality_gap(lp, final_state.point());
  report.iterations = iterations;
  if (report.gap_certificate > delta * lr * (1.0 + 1e-6))
    throw InvariantViolation("gap certificate " +
                             std::to_string(report.gap_certificate) +
                             " exceeds delta L R");
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
          .count();
  return report;
}

}  // namespace pathlp
