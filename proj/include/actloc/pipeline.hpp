#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actloc/calibration.hpp"
#include "actloc/fusion.hpp"
#include "actloc/metrics.hpp"
#include "actloc/postprocess.hpp"
#include "actloc/proposals.hpp"

namespace actloc {

struct PipelineConfig {
  GeneratorConfig generator;
  ViewWeights view_weights;
  RateWeights rate_weights;
  PostprocessConfig post;
  double match_tolerance = 1.0;
  double threshold_fallback = 0.0;
  // Views whose traces (all rates) are averaged into the actionness used
  // for proposal generation.
  std::vector<ViewId> proposal_views{ViewId::Dashboard, ViewId::Right};
  std::size_t workers = 1;

  void validate() const;
};

/// The nine traces of one video, indexed by (view, rate); cells may be
/// missing.
struct VideoTraces {
  std::string video_id;
  std::array<std::array<const ScoreTrace*, 3>, 3> cells{};

  const ScoreTrace* at(ViewId v, RateTag r) const { return cells[static_cast<std::size_t>(v)][rate_index(r)]; }
};

/// Groups traces by video id (sorted). Pointers refer into `traces`.
std::vector<VideoTraces> group_traces(std::span<const ScoreTrace> traces);

/// Element-wise mean actionness over the available traces of `views`.
ActionnessProfile proposal_profile(const VideoTraces& video, std::span<const ViewId> views);

/// Candidates, boundary refinement, then NMS for one video.
std::vector<Proposal> propose_video(const VideoTraces& video, const PipelineConfig& cfg);

/// Pools all nine traces over each proposal, votes, and resolves labels.
std::vector<ClassifiedProposal> classify_video(const VideoTraces& video, std::span<const Proposal> proposals,
                                               const PipelineConfig& cfg);

/// Labels proposals from a single (view, rate) model without voting.
std::vector<ClassifiedProposal> classify_video_single(const VideoTraces& video, std::span<const Proposal> proposals,
                                                      ViewId view, RateTag rate);

std::vector<VideoProposal> propose_all(std::span<const ScoreTrace> traces, const PipelineConfig& cfg);

std::vector<VideoDetection> classify_all(std::span<const ScoreTrace> traces, std::span<const VideoProposal> proposals,
                                         const PipelineConfig& cfg);

/// Per-video final selection, ordered by video id.
std::vector<VideoDetection> postprocess_all(std::span<const VideoDetection> detections,
                                            const ClassThresholds& thresholds, const PipelineConfig& cfg);

/// Thresholds from the correct results among duration-filtered validation
/// detections.
ClassThresholds calibrate_detections(std::span<const VideoDetection> detections,
                                     std::span<const GroundTruthInstance> gts, const PipelineConfig& cfg);

struct FoldCalibration {
  std::vector<ClassThresholds> folds;
  ClassThresholds deployment;
};

/// Videos (sorted by id) are dealt round-robin into `n_folds` folds; each
/// fold is calibrated on its own videos and the deployment table is the
/// element-wise minimum.
FoldCalibration calibrate_folds(std::span<const VideoDetection> detections, std::span<const GroundTruthInstance> gts,
                                std::size_t n_folds, const PipelineConfig& cfg);

std::vector<SubmissionRow> to_submission(std::span<const VideoDetection> detections);
std::vector<Prediction> to_predictions(std::span<const VideoDetection> detections);

/// Cumulative post-processing stages, for ablation.
enum class Stage { Baseline, ModelVoting, ThresholdFiltering, DuplicateRemoval };

/// Predictions at `stage`. Baseline labels with the single `baseline`
/// model; later stages vote. Threshold filtering applies the duration
/// filter and both threshold gates; duplicate removal runs the full
/// per-class selection.
std::vector<Prediction> stage_predictions(Stage stage, std::span<const ScoreTrace> traces,
                                          std::span<const VideoProposal> proposals, const ClassThresholds& thresholds,
                                          const PipelineConfig& cfg, ViewId baseline_view = ViewId::Dashboard,
                                          RateTag baseline_rate = RateTag::R32);

}  // namespace actloc
