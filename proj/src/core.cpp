#include "actloc/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace actloc {

namespace {

void validate_video_id(const std::string& id) {
  if (id.empty()) throw InvariantError("video id must be non-empty");
  if (id.find_first_of(" \t\r\n,") != std::string::npos)
    throw InvariantError("video id '" + id + "' contains whitespace or a comma");
}

}  // namespace

TimeInterval::TimeInterval(double start, double end) : start_(start), end_(end) {
  if (!std::isfinite(start) || !std::isfinite(end))
    throw InvariantError("interval endpoints must be finite");
  if (start < 0.0) throw InvariantError("interval start must be non-negative");
  if (!(end > start)) throw InvariantError("interval end must be greater than start");
}

double intersection_length(const TimeInterval& a, const TimeInterval& b) {
  return std::max(0.0, std::min(a.end(), b.end()) - std::max(a.start(), b.start()));
}

double tiou(const TimeInterval& a, const TimeInterval& b) {
  if (a == b) return 1.0;
  const double inter = intersection_length(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.length() + b.length() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool boundary_match(const TimeInterval& pred, const TimeInterval& gt, double tol) {
  return std::abs(pred.start() - gt.start()) <= tol && std::abs(pred.end() - gt.end()) <= tol;
}

Proposal::Proposal(TimeInterval iv, double score) : interval(iv), p_score(score) {
  if (!(score >= 0.0 && score <= 1.0)) throw InvariantError("proposal score must lie in [0,1]");
}

ScoreVector ScoreVector::from(const Array& scores, double tol) {
  for (double s : scores) {
    if (!std::isfinite(s) || s < -tol || s > 1.0 + tol)
      throw InvariantError("score vector entries must lie in [0,1]");
  }
  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  if (std::abs(total - 1.0) > tol) throw InvariantError("score vector does not sum to 1");
  Array clipped = scores;
  for (double& s : clipped) s = std::clamp(s, 0.0, 1.0);
  return ScoreVector(clipped);
}

ScoreVector ScoreVector::uniform() {
  Array a;
  a.fill(1.0 / kNumClasses);
  return ScoreVector(a);
}

ScoreVector ScoreVector::one_hot(ClassId c) {
  if (!is_valid_class(c)) throw InvariantError("class id out of range");
  Array a{};
  a[static_cast<std::size_t>(c)] = 1.0;
  return ScoreVector(a);
}

double ScoreVector::sum() const { return std::accumulate(scores_.begin(), scores_.end(), 0.0); }

ClassifiedProposal::ClassifiedProposal(Proposal p, ScoreVector scores, ClassId lbl, double lbl_score)
    : proposal(p), c_score(scores), label(lbl), label_score(lbl_score) {
  if (!is_valid_class(lbl)) throw InvariantError("label out of range");
  if (c_score[static_cast<std::size_t>(lbl)] != lbl_score)
    throw InvariantError("label score must equal the score vector entry at the label");
}

std::string_view to_string(ViewId v) {
  switch (v) {
    case ViewId::Dashboard: return "dashboard";
    case ViewId::Rear: return "rear";
    case ViewId::Right: return "right";
  }
  return "unknown";
}

ViewId parse_view(std::string_view s) {
  if (s == "dashboard" || s == "dash") return ViewId::Dashboard;
  if (s == "rear") return ViewId::Rear;
  if (s == "right") return ViewId::Right;
  throw InvariantError("unknown view '" + std::string(s) + "'");
}

RateTag parse_rate(int value) {
  switch (value) {
    case 32: return RateTag::R32;
    case 64: return RateTag::R64;
    case 128: return RateTag::R128;
    default: throw InvariantError("rate tag must be one of 32, 64, 128; got " + std::to_string(value));
  }
}

std::size_t rate_index(RateTag r) {
  switch (r) {
    case RateTag::R128: return 0;
    case RateTag::R64: return 1;
    case RateTag::R32: return 2;
  }
  return 0;
}

VideoKey::VideoKey(std::string id, ViewId v) : video_id(std::move(id)), view(v) {
  validate_video_id(video_id);
}

GroundTruthInstance::GroundTruthInstance(std::string id, ClassId lbl, TimeInterval iv)
    : video_id(std::move(id)), label(lbl), interval(iv) {
  validate_video_id(video_id);
  if (!is_valid_class(lbl)) throw InvariantError("ground-truth class out of range");
}

}  // namespace actloc
