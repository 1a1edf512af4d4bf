#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pathlp/errors.hpp"
#include "pathlp/vector_ops.hpp"

namespace pathlp {

inline std::size_t ceil_log2(std::size_t n) {
  std::size_t levels = 0;
  std::size_t p = 1;
  while (p < n) {
    p <<= 1;
    ++levels;
  }
  return levels;
}

// Lazily maintained copy vbar of a streaming vector v with the guarantee
// ||vbar - v||_inf <= delta after every advance. Rewrites follow a dyadic
// schedule: at step k, every level l with k = 0 mod 2^l compares against the
// checkpoint taken 2^l steps ago and rewrites the coordinates that moved by
// at least delta / (2 ceil(log2 n)); the top level rewrites everything.
class ShadowVector {
 public:
  ShadowVector(Vector v0, double delta)
      : delta_(delta),
        k_(0),
        vbar_(v0),
        levels_(ceil_log2(v0.size())),
        checkpoints_(levels_ + 1, v0) {
    if (!(delta > 0.0)) throw PreconditionViolation("delta must be positive");
    if (v0.empty()) throw PreconditionViolation("empty shadow vector");
  }

  const Vector& value() const { return vbar_; }
  double delta() const { return delta_; }
  std::size_t step() const { return k_; }
  std::size_t top_level() const { return levels_; }
  const std::vector<std::uint32_t>& update_log() const { return update_log_; }

  // Cumulative count of threshold triggers per level (top level excluded;
  // its rewrites are unconditional).
  const std::vector<std::uint64_t>& level_trigger_counts() const {
    return level_triggers_;
  }

  // Consumes v^{(k)} for k = step()+1 and returns the rewritten coordinate
  // indices, in increasing order.
  std::vector<std::size_t> advance(const Vector& v_new) {
    if (v_new.size() != vbar_.size())
      throw PreconditionViolation("shadow vector length mismatch");
    ++k_;
    const std::size_t n = vbar_.size();
    marked_.assign(n, false);
    bool full_refresh = false;
    const double threshold =
        levels_ == 0 ? 0.0
                     : delta_ / (2.0 * static_cast<double>(levels_));
    if (level_triggers_.size() < levels_) level_triggers_.resize(levels_, 0);
    for (std::size_t level = 0; level <= levels_; ++level) {
      if (k_ % (std::size_t{1} << level) != 0) continue;
      if (level == levels_) {
        full_refresh = true;
      } else {
        const Vector& ref = checkpoints_[level];
        for (std::size_t i = 0; i < n; ++i)
          if (std::fabs(v_new[i] - ref[i]) >= threshold) {
            marked_[i] = true;
            ++level_triggers_[level];
          }
      }
    }
    std::vector<std::size_t> updated;
    for (std::size_t i = 0; i < n; ++i) {
      if (full_refresh || marked_[i]) {
        vbar_[i] = v_new[i];
        updated.push_back(i);
      }
    }
    for (std::size_t level = 0; level <= levels_; ++level)
      if (k_ % (std::size_t{1} << level) == 0) checkpoints_[level] = v_new;
    update_log_.push_back(static_cast<std::uint32_t>(updated.size()));
    return updated;
  }

  // Largest l with k = 0 mod 2^l, the schedule level of the current step.
  std::size_t level_of_step() const {
    std::size_t level = 0;
    while (level < levels_ && k_ % (std::size_t{1} << (level + 1)) == 0)
      ++level;
    return level;
  }

 private:
  double delta_;
  std::size_t k_;
  Vector vbar_;
  std::size_t levels_;
  std::vector<Vector> checkpoints_;
  std::vector<bool> marked_;
  std::vector<std::uint32_t> update_log_;
  std::vector<std::uint64_t> level_triggers_;
};

}  // namespace pathlp
