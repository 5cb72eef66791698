#include "actloc/pipeline.hpp"

#include <algorithm>
#include <map>

#include "parallel.hpp"

namespace actloc {

void PipelineConfig::validate() const {
  generator.validate();
  view_weights.validate();
  rate_weights.validate();
  post.validate();
  if (!(match_tolerance >= 0.0)) throw InvariantError("match tolerance must be non-negative");
  if (!(threshold_fallback >= 0.0 && threshold_fallback <= 1.0))
    throw InvariantError("threshold fallback must lie in [0,1]");
  if (proposal_views.empty()) throw InvariantError("at least one proposal view is required");
}

std::vector<VideoTraces> group_traces(std::span<const ScoreTrace> traces) {
  std::map<std::string, VideoTraces> by_video;
  for (const auto& t : traces) {
    t.validate();
    auto& entry = by_video[t.key.video_id];
    entry.video_id = t.key.video_id;
    auto& cell = entry.cells[static_cast<std::size_t>(t.key.view)][rate_index(t.rate)];
    if (cell != nullptr)
      throw InvariantError("duplicate trace for video '" + t.key.video_id + "', view " +
                           std::string(to_string(t.key.view)) + ", rate " + std::to_string(rate_value(t.rate)));
    cell = &t;
  }
  std::vector<VideoTraces> out;
  out.reserve(by_video.size());
  for (auto& [id, v] : by_video) out.push_back(v);
  return out;
}

ActionnessProfile proposal_profile(const VideoTraces& video, std::span<const ViewId> views) {
  std::vector<const ScoreTrace*> sources;
  for (ViewId v : views)
    for (RateTag r : kAllRates)
      if (const auto* t = video.at(v, r)) sources.push_back(t);
  if (sources.empty())
    throw InvariantError("no traces for the proposal views of video '" + video.video_id + "'");
  const auto n = sources.front()->size();
  const double step = sources.front()->step;
  std::vector<double> mean(n, 0.0);
  for (const auto* t : sources) {
    if (t->size() != n || t->step != step)
      throw InvariantError("proposal traces of video '" + video.video_id + "' differ in length or step");
    for (std::size_t i = 0; i < n; ++i) mean[i] += t->actionness[i];
  }
  for (double& m : mean) m = std::clamp(m / static_cast<double>(sources.size()), 0.0, 1.0);
  return ActionnessProfile(mean, step);
}

std::vector<Proposal> propose_video(const VideoTraces& video, const PipelineConfig& cfg) {
  const auto profile = proposal_profile(video, cfg.proposal_views);
  const auto candidates = generate_candidates(profile, cfg.generator);
  return soft_nms(refine_candidates(profile, candidates, cfg.generator), cfg.generator);
}

std::vector<ClassifiedProposal> classify_video(const VideoTraces& video, std::span<const Proposal> proposals,
                                               const PipelineConfig& cfg) {
  std::vector<ClassifiedProposal> out;
  out.reserve(proposals.size());
  for (const auto& p : proposals) {
    ScoreGrid grid;
    for (ViewId v : kAllViews)
      for (RateTag r : kAllRates)
        if (const auto* t = video.at(v, r)) grid.set(v, r, pool_scores(*t, p.interval));
    try {
      out.push_back(classify(p, model_vote(grid, cfg.view_weights, cfg.rate_weights)));
    } catch (const InvariantError& e) {
      throw InvariantError("video '" + video.video_id + "': " + e.what());
    }
  }
  return out;
}

std::vector<ClassifiedProposal> classify_video_single(const VideoTraces& video, std::span<const Proposal> proposals,
                                                      ViewId view, RateTag rate) {
  const auto* t = video.at(view, rate);
  if (t == nullptr)
    throw InvariantError("video '" + video.video_id + "' has no trace for view " + std::string(to_string(view)) +
                         ", rate " + std::to_string(rate_value(rate)));
  std::vector<ClassifiedProposal> out;
  out.reserve(proposals.size());
  for (const auto& p : proposals) out.push_back(classify(p, pool_scores(*t, p.interval)));
  return out;
}

std::vector<VideoProposal> propose_all(std::span<const ScoreTrace> traces, const PipelineConfig& cfg) {
  cfg.validate();
  const auto videos = group_traces(traces);
  std::vector<std::vector<Proposal>> per_video(videos.size());
  detail::parallel_for(videos.size(), cfg.workers, [&](std::size_t i) { per_video[i] = propose_video(videos[i], cfg); });
  std::vector<VideoProposal> out;
  for (std::size_t i = 0; i < videos.size(); ++i)
    for (const auto& p : per_video[i]) out.push_back({videos[i].video_id, p});
  return out;
}

namespace {

template <typename T, typename Key>
std::map<std::string, std::vector<T>> bucket_by_video(std::span<const Key> items, auto&& project) {
  std::map<std::string, std::vector<T>> out;
  for (const auto& it : items) out[it.video_id].push_back(project(it));
  return out;
}

}  // namespace

std::vector<VideoDetection> classify_all(std::span<const ScoreTrace> traces, std::span<const VideoProposal> proposals,
                                         const PipelineConfig& cfg) {
  cfg.validate();
  const auto videos = group_traces(traces);
  std::map<std::string, const VideoTraces*> lookup;
  for (const auto& v : videos) lookup[v.video_id] = &v;

  const auto buckets = bucket_by_video<Proposal>(proposals, [](const VideoProposal& vp) { return vp.proposal; });
  std::vector<std::pair<std::string, const std::vector<Proposal>*>> work;
  for (const auto& [id, list] : buckets) {
    if (!lookup.contains(id)) throw InvariantError("no score traces for video '" + id + "'");
    work.emplace_back(id, &list);
  }
  std::vector<std::vector<ClassifiedProposal>> results(work.size());
  detail::parallel_for(work.size(), cfg.workers, [&](std::size_t i) {
    results[i] = classify_video(*lookup.at(work[i].first), *work[i].second, cfg);
  });
  std::vector<VideoDetection> out;
  for (std::size_t i = 0; i < work.size(); ++i)
    for (const auto& d : results[i]) out.push_back({work[i].first, d});
  return out;
}

std::vector<VideoDetection> postprocess_all(std::span<const VideoDetection> detections,
                                            const ClassThresholds& thresholds, const PipelineConfig& cfg) {
  cfg.validate();
  thresholds.validate();
  const auto buckets =
      bucket_by_video<ClassifiedProposal>(detections, [](const VideoDetection& d) { return d.detection; });
  std::vector<VideoDetection> out;
  for (const auto& [id, list] : buckets)
    for (const auto& d : postprocess(list, thresholds, cfg.post)) out.push_back({id, d});
  return out;
}

ClassThresholds calibrate_detections(std::span<const VideoDetection> detections,
                                     std::span<const GroundTruthInstance> gts, const PipelineConfig& cfg) {
  std::vector<VideoDetection> in_range;
  for (const auto& d : detections) {
    const double len = d.detection.interval().length();
    if (len >= cfg.post.min_duration && len <= cfg.post.max_duration) in_range.push_back(d);
  }
  const auto pairs = collect_correct_results(in_range, gts, cfg.match_tolerance);
  return calibrate(pairs, cfg.threshold_fallback, cfg.match_tolerance);
}

FoldCalibration calibrate_folds(std::span<const VideoDetection> detections, std::span<const GroundTruthInstance> gts,
                                std::size_t n_folds, const PipelineConfig& cfg) {
  if (n_folds < 1) throw InvariantError("fold count must be at least 1");
  std::map<std::string, std::size_t> video_fold;
  for (const auto& g : gts) video_fold.emplace(g.video_id, 0);
  for (const auto& d : detections) video_fold.emplace(d.video_id, 0);
  if (video_fold.size() < n_folds) throw InvariantError("more folds than validation videos");
  std::size_t k = 0;
  for (auto& [id, fold] : video_fold) fold = k++ % n_folds;

  FoldCalibration out;
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::vector<VideoDetection> fold_dets;
    std::vector<GroundTruthInstance> fold_gts;
    for (const auto& d : detections)
      if (video_fold.at(d.video_id) == f) fold_dets.push_back(d);
    for (const auto& g : gts)
      if (video_fold.at(g.video_id) == f) fold_gts.push_back(g);
    out.folds.push_back(calibrate_detections(fold_dets, fold_gts, cfg));
  }
  out.deployment = elementwise_min(out.folds);
  return out;
}

std::vector<SubmissionRow> to_submission(std::span<const VideoDetection> detections) {
  std::vector<SubmissionRow> rows;
  rows.reserve(detections.size());
  for (const auto& d : detections)
    rows.emplace_back(d.video_id, d.detection.label, d.detection.interval().start(), d.detection.interval().end());
  return rows;
}

std::vector<Prediction> to_predictions(std::span<const VideoDetection> detections) {
  std::vector<Prediction> out;
  out.reserve(detections.size());
  for (const auto& d : detections) out.push_back(to_prediction(d));
  return out;
}

std::vector<Prediction> stage_predictions(Stage stage, std::span<const ScoreTrace> traces,
                                          std::span<const VideoProposal> proposals, const ClassThresholds& thresholds,
                                          const PipelineConfig& cfg, ViewId baseline_view, RateTag baseline_rate) {
  cfg.validate();
  const auto videos = group_traces(traces);
  const auto buckets = bucket_by_video<Proposal>(proposals, [](const VideoProposal& vp) { return vp.proposal; });
  std::vector<Prediction> out;
  for (const auto& video : videos) {
    const auto it = buckets.find(video.video_id);
    if (it == buckets.end()) continue;
    std::vector<ClassifiedProposal> labeled;
    switch (stage) {
      case Stage::Baseline:
        labeled = classify_video_single(video, it->second, baseline_view, baseline_rate);
        break;
      case Stage::ModelVoting:
        labeled = classify_video(video, it->second, cfg);
        break;
      case Stage::ThresholdFiltering: {
        const auto voted = classify_video(video, it->second, cfg);
        const auto in_range = duration_filter(voted, cfg.post.min_duration, cfg.post.max_duration);
        labeled = confidence_filter(classification_gate(in_range, thresholds), thresholds);
        break;
      }
      case Stage::DuplicateRemoval:
        labeled = postprocess(classify_video(video, it->second, cfg), thresholds, cfg.post);
        break;
    }
    for (const auto& d : labeled) out.push_back(to_prediction(VideoDetection{video.video_id, d}));
  }
  return out;
}

}  // namespace actloc
