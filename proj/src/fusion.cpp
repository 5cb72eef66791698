#include "actloc/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace actloc {

namespace {

constexpr double kWeightTolerance = 1e-9;

void check_convex(double a, double b, double c, const char* what) {
  if (!(a >= 0.0 && b >= 0.0 && c >= 0.0)) throw InvariantError(std::string(what) + " must be non-negative");
  if (std::abs(a + b + c - 1.0) > kWeightTolerance) throw InvariantError(std::string(what) + " must sum to 1");
}

ScoreVector weighted_sum(const ScoreVector& x, double wx, const ScoreVector& y, double wy, const ScoreVector& z,
                         double wz) {
  ScoreVector::Array out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Equal inputs are a fixed point of any convex combination.
    out[i] = (x[i] == y[i] && y[i] == z[i]) ? x[i] : wx * x[i] + wy * y[i] + wz * z[i];
  }
  return ScoreVector::from(out, kWeightTolerance);
}

}  // namespace

void ViewWeights::validate() const { check_convex(dashboard, rear, right, "view weights"); }

double ViewWeights::operator[](ViewId v) const {
  switch (v) {
    case ViewId::Dashboard: return dashboard;
    case ViewId::Rear: return rear;
    case ViewId::Right: return right;
  }
  return 0.0;
}

void RateWeights::validate() const { check_convex(r128, r64, r32, "rate weights"); }

double RateWeights::operator[](RateTag r) const {
  switch (r) {
    case RateTag::R128: return r128;
    case RateTag::R64: return r64;
    case RateTag::R32: return r32;
  }
  return 0.0;
}

ScoreVector fuse_views(const ScoreVector& dash, const ScoreVector& rear, const ScoreVector& right,
                       const ViewWeights& w) {
  w.validate();
  return weighted_sum(dash, w.dashboard, rear, w.rear, right, w.right);
}

ScoreVector fuse_rates(const ScoreVector& pred_128, const ScoreVector& pred_64, const ScoreVector& pred_32,
                       const RateWeights& w) {
  w.validate();
  return weighted_sum(pred_128, w.r128, pred_64, w.r64, pred_32, w.r32);
}

void ScoreGrid::set(ViewId v, RateTag r, const ScoreVector& s) {
  cells_[static_cast<std::size_t>(v)][rate_index(r)] = s;
}

const std::optional<ScoreVector>& ScoreGrid::at(ViewId v, RateTag r) const {
  return cells_[static_cast<std::size_t>(v)][rate_index(r)];
}

bool ScoreGrid::complete() const {
  for (const auto& row : cells_)
    for (const auto& c : row)
      if (!c) return false;
  return true;
}

ScoreVector model_vote(const ScoreGrid& grid, const ViewWeights& vw, const RateWeights& rw) {
  for (ViewId v : kAllViews)
    for (RateTag r : kAllRates)
      if (!grid.at(v, r))
        throw InvariantError("missing score grid cell: view " + std::string(to_string(v)) + ", rate " +
                             std::to_string(rate_value(r)));
  auto per_rate = [&](RateTag r) {
    return fuse_views(*grid.at(ViewId::Dashboard, r), *grid.at(ViewId::Rear, r), *grid.at(ViewId::Right, r), vw);
  };
  return fuse_rates(per_rate(RateTag::R128), per_rate(RateTag::R64), per_rate(RateTag::R32), rw);
}

ScoreVector pool_scores(const ScoreTrace& trace, const TimeInterval& interval) {
  const double step = trace.step;
  const double from = std::max(0.0, interval.start());
  const double to = std::min(trace.duration(), interval.end());
  if (!(to > from)) throw InvariantError("interval does not overlap the score trace for '" + trace.key.video_id + "'");

  const auto first = static_cast<std::size_t>(std::floor(from / step));
  const auto last = std::min(trace.size(), static_cast<std::size_t>(std::ceil(to / step)));
  ScoreVector::Array acc{};
  double total_weight = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    const double lo = std::max(from, static_cast<double>(i) * step);
    const double hi = std::min(to, static_cast<double>(i + 1) * step);
    const double w = hi - lo;
    if (!(w > 0.0)) continue;
    total_weight += w;
    const auto& s = trace.scores[i].values();
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += w * s[c];
  }
  double sum = 0.0;
  for (double& v : acc) {
    v /= total_weight;
    sum += v;
  }
  for (double& v : acc) v /= sum;
  return ScoreVector::from(acc, 1e-9);
}

}  // namespace actloc
