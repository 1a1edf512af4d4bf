#pragma once

#include <cstddef>
#include <functional>

namespace pathlp {

// One row per Newton step. update_rank and snapshot_refresh are only
// populated by the inverse-maintenance stepper; the drift fields are
// per-step diagnostics consumed by the invariant tests.
struct TraceRecord {
  std::size_t iter = 0;
  int phase = 0;
  double t = 0.0;
  double l2_centrality = 0.0;
  double phi = 0.0;
  double gap = 0.0;
  std::size_t update_rank = 0;
  bool snapshot_refresh = false;

  double r_step_norm = 0.0;      // ||r_{k+1} - r_k||_2
  double ln_x_step_norm = 0.0;   // ||ln x_{k+1} - ln x_k||_2
  double ln_s_step_norm = 0.0;   // ||ln s_{k+1} - ln s_k||_2
  double x_rel_step_norm = 0.0;  // ||dx / x||_2
  double s_rel_step_norm = 0.0;  // ||ds / s||_2
  double mu_inf_gap = 0.0;       // ||x s - t||_inf / t
};

using TraceSink = std::function<void(const TraceRecord&)>;

}  // namespace pathlp
