#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "actloc/calibration.hpp"
#include "actloc/core.hpp"

namespace actloc {

struct PostprocessConfig {
  double min_duration = 10.0;
  double max_duration = 30.0;
  // Two top proposals merge when both endpoint differences are strictly
  // below this many seconds.
  double merge_tolerance = 2.0;
  // Keep only the top proposal when the top two of a class do not merge.
  bool strict_single = false;

  void validate() const;
};

/// Keeps proposals with min_dur <= length <= max_dur.
std::vector<ClassifiedProposal> duration_filter(std::span<const ClassifiedProposal> proposals, double min_dur = 10.0,
                                                double max_dur = 30.0);

/// Arg-max class (lowest index on ties); when that is class 0, the
/// second-highest class and its score instead.
std::pair<ClassId, double> resolve_label(const ScoreVector& c_score);

/// Attaches a resolved label to a proposal.
ClassifiedProposal classify(const Proposal& proposal, const ScoreVector& c_score);

/// Per-class candidate lists sorted by p_score descending, ties by earlier
/// start then shorter length. Class 0 never has a list.
class CandidatePool {
 public:
  CandidatePool() = default;
  explicit CandidatePool(std::span<const ClassifiedProposal> proposals);

  void add(const ClassifiedProposal& p);
  const std::vector<ClassifiedProposal>& for_class(ClassId c) const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

 private:
  std::array<std::vector<ClassifiedProposal>, kNumClasses> lists_{};
};

/// Keeps candidates whose label score reaches theta_c of their class
/// (inclusive) and pools them by class.
CandidatePool classification_gate(std::span<const ClassifiedProposal> candidates, const ClassThresholds& thresholds);

/// Pool entries whose p_score reaches theta_p of their class (inclusive),
/// in class order.
std::vector<ClassifiedProposal> confidence_filter(const CandidatePool& pool, const ClassThresholds& thresholds);

/// Per class: confidence filter, then emit the single survivor, or merge
/// the top two when both endpoint gaps are below the merge tolerance, or
/// emit both. Lower-ranked entries are dropped.
std::vector<ClassifiedProposal> select_final(const CandidatePool& pool, const ClassThresholds& thresholds,
                                             const PostprocessConfig& cfg = {});

/// Duration filter, classification gate, and final selection.
std::vector<ClassifiedProposal> postprocess(std::span<const ClassifiedProposal> voted,
                                            const ClassThresholds& thresholds, const PostprocessConfig& cfg = {});

}  // namespace actloc
