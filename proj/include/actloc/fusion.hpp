#pragma once

#include <array>
#include <optional>

#include "actloc/core.hpp"
#include "actloc/io.hpp"

namespace actloc {

/// Convex weights over the dashboard, rear and right views.
struct ViewWeights {
  double dashboard = 0.6;
  double rear = 0.2;
  double right = 0.2;

  void validate() const;
  double operator[](ViewId v) const;
};

/// Convex weights over the 128-, 64- and 32-frame models.
struct RateWeights {
  double r128 = 0.5;
  double r64 = 0.25;
  double r32 = 0.25;

  void validate() const;
  double operator[](RateTag r) const;
};

ScoreVector fuse_views(const ScoreVector& dash, const ScoreVector& rear, const ScoreVector& right,
                       const ViewWeights& w);
ScoreVector fuse_rates(const ScoreVector& pred_128, const ScoreVector& pred_64, const ScoreVector& pred_32,
                       const RateWeights& w);

/// Nine per-proposal score vectors indexed by (view, rate).
class ScoreGrid {
 public:
  void set(ViewId v, RateTag r, const ScoreVector& s);
  const std::optional<ScoreVector>& at(ViewId v, RateTag r) const;
  bool complete() const;

 private:
  std::array<std::array<std::optional<ScoreVector>, 3>, 3> cells_{};
};

/// Fuses views per rate, then fuses the three rate results. Throws
/// InvariantError naming the first missing (view, rate) cell.
ScoreVector model_vote(const ScoreGrid& grid, const ViewWeights& vw, const RateWeights& rw);

/// Mean of the trace's snippet vectors over `interval`, each snippet
/// weighted by its temporal overlap with the interval.
ScoreVector pool_scores(const ScoreTrace& trace, const TimeInterval& interval);

}  // namespace actloc
