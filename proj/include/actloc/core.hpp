#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace actloc {

// 18 annotated classes; index 0 is background and is never reported.
inline constexpr int kNumClasses = 18;
inline constexpr int kBackgroundClass = 0;

// Slack applied to inclusive score/threshold comparisons so that values
// computed along different summation orders compare equal.
inline constexpr double kScoreEpsilon = 1e-9;

using ClassId = int;

inline bool is_valid_class(ClassId c) { return c >= 0 && c < kNumClasses; }
inline bool is_reportable_class(ClassId c) { return c > kBackgroundClass && c < kNumClasses; }

/// Thrown when a value violates a domain invariant.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Half-open temporal segment in seconds. Construction validates
/// 0 <= start < end with both endpoints finite.
class TimeInterval {
 public:
  TimeInterval(double start, double end);

  double start() const { return start_; }
  double end() const { return end_; }
  double length() const { return end_ - start_; }

  TimeInterval shifted(double offset) const { return {start_ + offset, end_ + offset}; }

  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;

 private:
  double start_;
  double end_;
};

double intersection_length(const TimeInterval& a, const TimeInterval& b);

/// Temporal intersection over union; 0 for disjoint intervals.
double tiou(const TimeInterval& a, const TimeInterval& b);

/// Both endpoints within `tol` seconds of the reference (inclusive).
bool boundary_match(const TimeInterval& pred, const TimeInterval& gt, double tol);

struct Proposal {
  TimeInterval interval;
  double p_score;

  Proposal(TimeInterval iv, double score);

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

/// Normalized 18-way class distribution.
class ScoreVector {
 public:
  using Array = std::array<double, kNumClasses>;

  /// Validates entries in [0,1] and sum within `tol` of 1.
  static ScoreVector from(const Array& scores, double tol = 1e-6);
  static ScoreVector uniform();
  static ScoreVector one_hot(ClassId c);

  double operator[](std::size_t i) const { return scores_[i]; }
  const Array& values() const { return scores_; }
  double sum() const;

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;

 private:
  explicit ScoreVector(const Array& s) : scores_(s) {}
  Array scores_{};
};

struct ClassifiedProposal {
  Proposal proposal;
  ScoreVector c_score;
  ClassId label;
  double label_score;

  ClassifiedProposal(Proposal p, ScoreVector scores, ClassId lbl, double lbl_score);

  const TimeInterval& interval() const { return proposal.interval; }
  double p_score() const { return proposal.p_score; }

  friend bool operator==(const ClassifiedProposal&, const ClassifiedProposal&) = default;
};

enum class ViewId { Dashboard = 0, Rear = 1, Right = 2 };
inline constexpr std::array<ViewId, 3> kAllViews = {ViewId::Dashboard, ViewId::Rear, ViewId::Right};

std::string_view to_string(ViewId v);
ViewId parse_view(std::string_view s);

// Frame-sampling rate identifying one classification model per view.
enum class RateTag { R32 = 32, R64 = 64, R128 = 128 };
inline constexpr std::array<RateTag, 3> kAllRates = {RateTag::R128, RateTag::R64, RateTag::R32};

inline int rate_value(RateTag r) { return static_cast<int>(r); }
RateTag parse_rate(int value);
/// Row index used by score grids: 128 -> 0, 64 -> 1, 32 -> 2.
std::size_t rate_index(RateTag r);

struct VideoKey {
  std::string video_id;
  ViewId view;

  VideoKey(std::string id, ViewId v);

  friend bool operator==(const VideoKey&, const VideoKey&) = default;
};

struct GroundTruthInstance {
  std::string video_id;
  ClassId label;
  TimeInterval interval;

  GroundTruthInstance(std::string id, ClassId lbl, TimeInterval iv);

  friend bool operator==(const GroundTruthInstance&, const GroundTruthInstance&) = default;
};

/// Ordering used wherever a deterministic tie-break is needed between
/// intervals: earlier start first, then shorter length.
inline bool earlier_then_shorter(const TimeInterval& a, const TimeInterval& b) {
  if (a.start() != b.start()) return a.start() < b.start();
  return a.length() < b.length();
}

/// Descending score, ties by earlier start then shorter length.
inline bool proposal_rank_less(const Proposal& a, const Proposal& b) {
  if (a.p_score != b.p_score) return a.p_score > b.p_score;
  return earlier_then_shorter(a.interval, b.interval);
}

}  // namespace actloc
