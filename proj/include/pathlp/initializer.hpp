#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pathlp/linalg.hpp"
#include "pathlp/lp.hpp"
#include "pathlp/newton.hpp"
#include "pathlp/vector_ops.hpp"

namespace pathlp {

// Embedding constants kept for extraction and diagnostics.
struct EmbedRecord {
  double r_bar = 0.0;     // enlarged outer radius
  double t0 = 0.0;        // initial path parameter
  double epsilon = 0.0;
  Vector x_center_plus;   // x_c^+ = t / (c + t / Rbar)
  Vector x_center_minus;  // x_c^- = x_c^+ - A^T (A A^T)^{-1} b
  Vector c_tilde;         // t / x_c^-
  double b_tilde = 0.0;   // sum x_c^+ + Rbar
  LpParameters params;
};

// The bounded reformulation with a known central-path point. Variables are
// (x^+, x^-, x^theta) of dimension 2n+1 with constraints
//   A x^+ - A x^- = b,   sum_i x^+_i + x^theta = b_tilde,
// objective c^T x^+ + c_tilde^T x^-, and cost 0 on x^theta.
class ModifiedLp {
 public:
  ModifiedLp(LpInstance original, LpInstance modified, EmbedRecord embed)
      : original_(std::move(original)),
        modified_(std::move(modified)),
        embed_(std::move(embed)) {}

  const LpInstance& original() const { return original_; }
  const LpInstance& lp() const { return modified_; }
  const EmbedRecord& embed() const { return embed_; }

 private:
  LpInstance original_;
  LpInstance modified_;
  EmbedRecord embed_;
};

// Dual side of a modified-program point split into its blocks, with the
// defining identities validated:
//   A^T y + lambda 1 + s^+ = c,  -A^T y + s^- = c_tilde,  lambda + s^theta = 0.
struct ModifiedDualPoint {
  Vector s_plus;
  Vector s_minus;
  double s_theta = 0.0;
  Vector y;
  double lambda_dual = 0.0;
};

inline ModifiedDualPoint split_modified_dual(const ModifiedLp& modified,
                                             const PrimalDualPoint& point,
                                             double rel_tol = 1e-8) {
  const std::size_t n = modified.original().num_variables();
  const std::size_t d = modified.original().num_constraints();
  ModifiedDualPoint out;
  out.s_plus.assign(point.s().begin(), point.s().begin() + n);
  out.s_minus.assign(point.s().begin() + n, point.s().begin() + 2 * n);
  out.s_theta = point.s()[2 * n];
  out.y.assign(point.y().begin(), point.y().begin() + d);
  out.lambda_dual = point.y()[d];

  const Vector aty = matvec_transpose(modified.original().a(), out.y);
  const Vector& c = modified.original().c();
  const Vector& c_tilde = modified.embed().c_tilde;
  const double c_scale = 1.0 + norm_inf(c);
  const double ct_scale = 1.0 + norm_inf(c_tilde);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(aty[i] + out.lambda_dual + out.s_plus[i] - c[i]) >
        rel_tol * c_scale)
      throw InvariantViolation("modified dual block s+ inconsistent");
    if (std::fabs(-aty[i] + out.s_minus[i] - c_tilde[i]) > rel_tol * ct_scale)
      throw InvariantViolation("modified dual block s- inconsistent");
  }
  if (std::fabs(out.lambda_dual + out.s_theta) >
      rel_tol * (1.0 + std::fabs(out.s_theta)))
    throw InvariantViolation("modified dual block s_theta inconsistent");
  return out;
}

// Builds the modified program for Rbar = (5/eps) R, t = 2^16 eps^-3 n^2 (R/r) LR
// together with its exactly central starting state x0 = (x_c^+, x_c^-, Rbar),
// s0 = t / x0, y0 = (0, -t/Rbar).
inline std::pair<ModifiedLp, PathState> build_modified(const LpInstance& lp,
                                                       const LpParameters& params,
                                                       double epsilon) {
  params.validate_against(lp.c());
  if (!(epsilon > 0.0) || epsilon > 0.5)
    throw PreconditionViolation("epsilon must lie in (0, 1/2]");
  const std::size_t n = lp.num_variables();
  const std::size_t d = lp.num_constraints();
  const double big_r = params.outer_radius;
  const double small_r = params.inner_radius;
  const double lip = params.lipschitz;

  EmbedRecord embed;
  embed.epsilon = epsilon;
  embed.params = params;
  embed.r_bar = (5.0 / epsilon) * big_r;
  embed.t0 = 65536.0 / (epsilon * epsilon * epsilon) *
             static_cast<double>(n) * static_cast<double>(n) *
             (big_r / small_r) * lip * big_r;
  if (!std::isfinite(embed.t0))
    throw PreconditionViolation("embedding path parameter overflows");
  if (!(embed.t0 >= 8.0 * lip * embed.r_bar))
    throw PreconditionViolation("embedding requires t >= 8 L Rbar");

  embed.x_center_plus.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    embed.x_center_plus[i] = embed.t0 / (lp.c()[i] + embed.t0 / embed.r_bar);

  const Vector x_min_norm = min_norm_point(lp.a(), lp.b());
  embed.x_center_minus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    embed.x_center_minus[i] = embed.x_center_plus[i] - x_min_norm[i];
    if (!(embed.x_center_minus[i] > 0.0))
      throw PreconditionViolation(
          "x_c^- not positive; outer radius likely underestimated");
  }

  embed.c_tilde.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    embed.c_tilde[i] = embed.t0 / embed.x_center_minus[i];
  embed.b_tilde = embed.r_bar;
  for (double v : embed.x_center_plus) embed.b_tilde += v;

  // Derived range guarantees, asserted at runtime.
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xp = embed.x_center_plus[i];
    if (!(xp >= 0.75 * embed.r_bar * (1.0 - 1e-9)) ||
        !(xp <= 1.5 * embed.r_bar * (1.0 + 1e-9)))
      throw InvariantViolation("x_c^+ outside [3/4 Rbar, 3/2 Rbar]");
    if (!(embed.c_tilde[i] >= embed.t0 / (2.0 * embed.r_bar) * (1.0 - 1e-9)))
      throw InvariantViolation("c_tilde below t / (2 Rbar)");
  }
  if (!(embed.b_tilde >= 0.75 * nn * embed.r_bar * (1.0 - 1e-9)) ||
      !(embed.b_tilde <= 3.0 * nn * embed.r_bar * (1.0 + 1e-9)))
    throw InvariantViolation("b_tilde outside [3/4 n Rbar, 3 n Rbar]");

  // Abar = [A, -A, 0; 1^T, 0^T, 1]
  DenseMatrix abar(d + 1, 2 * n + 1);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      abar(j, i) = lp.a()(j, i);
      abar(j, n + i) = -lp.a()(j, i);
    }
  for (std::size_t i = 0; i < n; ++i) abar(d, i) = 1.0;
  abar(d, 2 * n) = 1.0;

  Vector bbar(lp.b());
  bbar.push_back(embed.b_tilde);
  Vector cbar(lp.c());
  cbar.insert(cbar.end(), embed.c_tilde.begin(), embed.c_tilde.end());
  cbar.push_back(0.0);

  Vector x0(embed.x_center_plus);
  x0.insert(x0.end(), embed.x_center_minus.begin(), embed.x_center_minus.end());
  x0.push_back(embed.r_bar);
  Vector s0(2 * n + 1);
  for (std::size_t i = 0; i < x0.size(); ++i) s0[i] = embed.t0 / x0[i];
  Vector y0(d, 0.0);
  y0.push_back(-embed.t0 / embed.r_bar);

  for (std::size_t i = 0; i < x0.size(); ++i)
    if (std::fabs(x0[i] * s0[i] - embed.t0) > 1e-10 * embed.t0)
      throw InvariantViolation("x0 s0 deviates from t at " + std::to_string(i));

  LpInstance modified(std::move(abar), std::move(bbar), std::move(cbar));
  PathState state(
      PrimalDualPoint(modified, std::move(x0), std::move(s0), std::move(y0)),
      embed.t0);
  return {ModifiedLp(lp, std::move(modified), std::move(embed)), std::move(state)};
}

// Normal solver for the modified constraint matrix: routes the (d+1)-level
// system through two SPD solves against A (W1 + W2) A^T instead of
// assembling the bordered matrix.
inline NormalSolver make_modified_normal_solver(const DenseMatrix& a_orig) {
  const std::size_t n = a_orig.cols();
  return [&a_orig, n](const Vector& w, const Vector& rhs) {
    Vector w1(w.begin(), w.begin() + n);
    Vector w2(w.begin() + n, w.begin() + 2 * n);
    return modified_normal_solve(a_orig, w1, w2, w[2 * n], rhs);
  };
}

struct ExtractDiagnostics {
  double min_x_plus = 0.0;
  double min_x_plus_bound = 0.0;   // R r / (10 n Rbar)
  double max_x_minus = 0.0;
  double max_x_minus_bound = 0.0;  // 20 n L Rbar^2 / t
  bool within_bounds = false;
};

inline ExtractDiagnostics extract_diagnostics(const ModifiedLp& modified,
                                              const PathState& state) {
  const std::size_t n = modified.original().num_variables();
  const EmbedRecord& e = modified.embed();
  ExtractDiagnostics diag;
  diag.min_x_plus = state.point().x()[0];
  diag.max_x_minus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diag.min_x_plus = std::min(diag.min_x_plus, state.point().x()[i]);
    diag.max_x_minus = std::max(diag.max_x_minus, state.point().x()[n + i]);
  }
  diag.min_x_plus_bound = e.params.outer_radius * e.params.inner_radius /
                          (10.0 * static_cast<double>(n) * e.r_bar);
  diag.max_x_minus_bound = 20.0 * static_cast<double>(n) *
                           e.params.lipschitz * e.r_bar * e.r_bar / e.t0;
  diag.within_bounds = diag.min_x_plus >= diag.min_x_plus_bound &&
                       diag.max_x_minus <= diag.max_x_minus_bound;
  return diag;
}

// Maps a near-central point of the modified program at t = LR back to a
// strictly feasible primal-dual pair of the original program:
//   x = x^+ - x^-,  s = s^+ - s_theta,  y unchanged.
inline PrimalDualPoint extract(const ModifiedLp& modified,
                               const PathState& state) {
  const std::size_t n = modified.original().num_variables();
  const std::size_t d = modified.original().num_constraints();
  const EmbedRecord& e = modified.embed();
  const double target = e.params.lipschitz * e.params.outer_radius;

  for (std::size_t i = 0; i < state.mu().size(); ++i) {
    const double m = state.mu()[i];
    if (!(m >= (5.0 / 6.0) * target) || !(m <= (7.0 / 6.0) * target))
      throw ExtractionFailure("componentwise window [5/6 LR, 7/6 LR] violated "
                              "at coordinate " +
                              std::to_string(i));
  }

  const Vector& xm = state.point().x();
  const Vector& sm = state.point().s();
  const double s_theta = sm[2 * n];
  const double eps = e.epsilon;

  Vector x(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x_plus = xm[i];
    const double x_minus = xm[n + i];
    if (x_minus > eps * x_plus)
      throw ExtractionFailure("x^- exceeds eps x^+ at " + std::to_string(i));
    if (s_theta > eps * sm[i])
      throw ExtractionFailure("s_theta exceeds eps s^+ at " + std::to_string(i));
    x[i] = x_plus - x_minus;
    s[i] = sm[i] - s_theta;
    if (!(x[i] > 0.0) || !(s[i] > 0.0))
      throw ExtractionFailure("extracted point not strictly positive");
  }
  Vector y(state.point().y().begin(), state.point().y().begin() + d);

  // The differences above cancel iterates that lived at the embedding scale,
  // so roundoff inherited from phase 1 can dominate the small residual
  // budget of the original program. Re-derive the slack from its identity
  // s = c - A^T y and project x back onto A x = b.
  const LpInstance& orig = modified.original();
  Vector aty = matvec_transpose(orig.a(), y);
  for (std::size_t i = 0; i < n; ++i) {
    const double repaired = orig.c()[i] - aty[i];
    if (std::fabs(repaired - s[i]) > 1e-4 * (1.0 + std::fabs(s[i])))
      throw ExtractionFailure("dual slack repair moved s too far at " +
                              std::to_string(i));
    s[i] = repaired;
    if (!(s[i] > 0.0))
      throw ExtractionFailure("extracted slack not strictly positive");
  }
  Vector primal_res = matvec(orig.a(), x);
  for (std::size_t i = 0; i < d; ++i) primal_res[i] = orig.b()[i] - primal_res[i];
  Vector correction = min_norm_point(orig.a(), primal_res);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] += correction[i];
    if (!(x[i] > 0.0))
      throw ExtractionFailure("primal repair left the positive orthant");
  }

  try {
    return PrimalDualPoint(orig, std::move(x), std::move(s), std::move(y));
  } catch (const PreconditionViolation& err) {
    throw ExtractionFailure(std::string("extracted point infeasible: ") +
                            err.what());
  }
}

// Snaps a delta LR optimal point to the exact optimal vertex, valid when the
// optimum is unique and every other vertex costs at least eta LR more. The
// certified ball has radius 2 delta R / eta; coordinates above it form the
// support, the equality system on the support determines the vertex.
inline Vector round_to_vertex(const LpInstance& lp, const Vector& x,
                              double eta, double delta,
                              const LpParameters& params) {
  if (!(eta > 0.0) || !(delta >= 0.0) || !(delta < eta))
    throw PreconditionViolation("rounding requires 0 <= delta < eta");
  const std::size_t n = lp.num_variables();
  const std::size_t d = lp.num_constraints();
  if (x.size() != n) throw PreconditionViolation("rounding point size mismatch");
  const double radius = 2.0 * delta * params.outer_radius / eta;

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > radius) support.push_back(i);
  if (support.empty()) throw RoundingFailure("empty support");
  if (support.size() > d)
    throw RoundingFailure("support larger than constraint count");

  DenseMatrix asup(d, support.size());
  for (std::size_t j = 0; j < support.size(); ++j)
    for (std::size_t i = 0; i < d; ++i) asup(i, j) = lp.a()(i, support[j]);

  Vector z;
  try {
    DenseMatrix gram = matmul(transpose(asup), asup);
    Vector rhs = matvec_transpose(asup, lp.b());
    z = spd_solve(gram, rhs);
  } catch (const NotPositiveDefinite&) {
    throw RoundingFailure("support columns numerically dependent");
  }

  Vector v(n, 0.0);
  for (std::size_t j = 0; j < support.size(); ++j) v[support[j]] = z[j];

  auto feasible = [&](const Vector& cand) {
    for (double vi : cand)
      if (vi < -1e-9) return false;
    Vector res = matvec(lp.a(), cand);
    for (std::size_t i = 0; i < d; ++i) res[i] -= lp.b()[i];
    return norm2(res) <= kFeasibilityRelTol * (1.0 + norm2(lp.b()));
  };

  // Integral optima: prefer the integer-snapped candidate when it stays
  // feasible.
  Vector snapped = v;
  bool any_snap = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double nearest = std::nearbyint(snapped[i]);
    if (std::fabs(snapped[i] - nearest) <= radius && snapped[i] != nearest) {
      snapped[i] = nearest;
      any_snap = true;
    }
  }
  if (any_snap && feasible(snapped)) v = snapped;

  if (!feasible(v)) throw RoundingFailure("rounded vertex infeasible");
  for (double& vi : v)
    if (vi < 0.0) vi = 0.0;

  const double lr = params.lipschitz * params.outer_radius;
  const double obj_v = dot(lp.c(), v);
  const double obj_x = dot(lp.c(), x);
  if (obj_v > obj_x + delta * lr * (1.0 + 1e-6) + 1e-12 * std::fabs(obj_x))
    throw RoundingFailure("rounded vertex not optimal within delta L R");

  double dist = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = v[i] - x[i];
    dist += diff * diff;
  }
  if (std::sqrt(dist) > radius * (1.0 + 1e-6) + 1e-12)
    throw RoundingFailure("rounded vertex outside the certified ball");
  return v;
}

}  // namespace pathlp
