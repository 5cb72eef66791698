#include "actloc/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <tuple>

namespace actloc {

Prediction to_prediction(const VideoDetection& d) {
  return {d.video_id, d.detection.label, d.detection.interval(), d.detection.label_score};
}

Prediction to_prediction(const SubmissionRow& r, double score) {
  return {r.video_id, r.activity_id, TimeInterval(r.start, r.end), score};
}

namespace {

// Prediction indices in matching order: score descending, then earlier
// start, earlier end, lower class, input order.
std::vector<std::size_t> ranked_predictions(std::span<const Prediction> preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = preds[a];
    const auto& y = preds[b];
    if (x.score != y.score) return x.score > y.score;
    return std::make_tuple(x.interval.start(), x.interval.end(), x.label) <
           std::make_tuple(y.interval.start(), y.interval.end(), y.label);
  });
  return order;
}

// Ground-truth indices per video in start order.
std::map<std::string, std::vector<std::size_t>> gts_by_video(std::span<const GroundTruthInstance> gts) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < gts.size(); ++i) out[gts[i].video_id].push_back(i);
  for (auto& [id, list] : out)
    std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      return std::make_tuple(gts[a].interval.start(), gts[a].interval.end(), gts[a].label) <
             std::make_tuple(gts[b].interval.start(), gts[b].interval.end(), gts[b].label);
    });
  return out;
}

// Kuhn's augmenting-path search over the compatibility lists.
bool augment(std::size_t p, const std::vector<std::vector<std::size_t>>& adj, std::vector<bool>& visited,
             std::map<std::size_t, std::size_t>& gt_owner, std::vector<std::optional<std::size_t>>& pred_to_gt) {
  for (std::size_t g : adj[p]) {
    if (visited[g]) continue;
    visited[g] = true;
    const auto owner = gt_owner.find(g);
    if (owner == gt_owner.end() || augment(owner->second, adj, visited, gt_owner, pred_to_gt)) {
      gt_owner[g] = p;
      pred_to_gt[p] = g;
      return true;
    }
  }
  return false;
}

}  // namespace

Matching match_predictions(std::span<const Prediction> preds, std::span<const GroundTruthInstance> gts, double tol,
                           MatchStrategy strategy) {
  Matching m;
  m.pred_to_gt.assign(preds.size(), std::nullopt);
  const auto by_video = gts_by_video(gts);
  const auto order = ranked_predictions(preds);

  auto candidates = [&](std::size_t p) {
    std::vector<std::size_t> out;
    const auto it = by_video.find(preds[p].video_id);
    if (it == by_video.end()) return out;
    for (std::size_t g : it->second)
      if (gts[g].label == preds[p].label && boundary_match(preds[p].interval, gts[g].interval, tol)) out.push_back(g);
    return out;
  };

  if (strategy == MatchStrategy::Greedy) {
    std::vector<bool> taken(gts.size(), false);
    for (std::size_t p : order) {
      for (std::size_t g : candidates(p)) {
        if (!taken[g]) {
          taken[g] = true;
          m.pred_to_gt[p] = g;
          break;
        }
      }
    }
  } else {
    std::vector<std::vector<std::size_t>> adj(preds.size());
    for (std::size_t p = 0; p < preds.size(); ++p) adj[p] = candidates(p);
    std::map<std::size_t, std::size_t> gt_owner;
    for (std::size_t p : order) {
      std::vector<bool> visited(gts.size(), false);
      augment(p, adj, visited, gt_owner, m.pred_to_gt);
    }
  }

  m.true_positives = static_cast<std::size_t>(
      std::count_if(m.pred_to_gt.begin(), m.pred_to_gt.end(), [](const auto& g) { return g.has_value(); }));
  m.false_positives = preds.size() - m.true_positives;
  m.false_negatives = gts.size() - m.true_positives;
  return m;
}

F1Score f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  F1Score s;
  if (tp + fp > 0) s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

F1Score challenge_f1(std::span<const Prediction> preds, std::span<const GroundTruthInstance> gts, double tol,
                     MatchStrategy strategy) {
  const auto m = match_predictions(preds, gts, tol, strategy);
  return f1_from_counts(m.true_positives, m.false_positives, m.false_negatives);
}

LocalizationQuality miou_and_time_positive(std::span<const Prediction> preds,
                                           std::span<const GroundTruthInstance> gts) {
  LocalizationQuality q;
  if (preds.empty()) return q;
  const auto by_video = gts_by_video(gts);
  double total = 0.0;
  std::size_t correct = 0;
  for (const auto& p : preds) {
    double best = 0.0;
    std::optional<std::size_t> best_gt;
    if (const auto it = by_video.find(p.video_id); it != by_video.end()) {
      for (std::size_t g : it->second) {
        const double t = tiou(p.interval, gts[g].interval);
        if (!best_gt || t > best) {
          best = t;
          best_gt = g;
        }
      }
    }
    total += best;
    if (best_gt && best > kTimePositiveTiou) {
      ++q.time_positive_count;
      if (gts[*best_gt].label == p.label) ++correct;
    }
  }
  q.miou = total / static_cast<double>(preds.size());
  if (q.time_positive_count > 0)
    q.time_positive_accuracy = static_cast<double>(correct) / static_cast<double>(q.time_positive_count);
  return q;
}

std::vector<double> default_tiou_grid() {
  std::vector<double> grid;
  for (int k = 0; k < 10; ++k) grid.push_back(static_cast<double>(50 + 5 * k) / 100.0);
  return grid;
}

std::map<int, double> ar_at_an(std::span<const VideoProposal> proposals, std::span<const GroundTruthInstance> gts,
                               std::span<const int> an_values, std::span<const double> tiou_grid) {
  std::map<int, double> out;
  std::map<std::string, std::vector<Proposal>> ranked;
  for (const auto& vp : proposals) ranked[vp.video_id].push_back(vp.proposal);
  for (auto& [id, list] : ranked) std::stable_sort(list.begin(), list.end(), proposal_rank_less);
  const auto by_video = gts_by_video(gts);

  for (int an : an_values) {
    if (an < 1) throw InvariantError("AN values must be positive");
    if (gts.empty() || tiou_grid.empty()) {
      out[an] = 0.0;
      continue;
    }
    double recall_sum = 0.0;
    for (double threshold : tiou_grid) {
      std::size_t covered = 0;
      for (const auto& [video, gt_idx] : by_video) {
        const auto it = ranked.find(video);
        if (it == ranked.end()) continue;
        std::vector<bool> taken(gt_idx.size(), false);
        const std::size_t limit = std::min(it->second.size(), static_cast<std::size_t>(an));
        for (std::size_t k = 0; k < limit; ++k) {
          for (std::size_t j = 0; j < gt_idx.size(); ++j) {
            if (!taken[j] && tiou(it->second[k].interval, gts[gt_idx[j]].interval) >= threshold) {
              taken[j] = true;
              ++covered;
              break;
            }
          }
        }
      }
      recall_sum += static_cast<double>(covered) / static_cast<double>(gts.size());
    }
    out[an] = recall_sum / static_cast<double>(tiou_grid.size());
  }
  return out;
}

std::map<int, double> ar_at_an(std::span<const VideoProposal> proposals, std::span<const GroundTruthInstance> gts) {
  const auto grid = default_tiou_grid();
  return ar_at_an(proposals, gts, kDefaultAnValues, grid);
}

EvalReport evaluate(std::span<const Prediction> preds, std::span<const GroundTruthInstance> gts,
                    const EvalOptions& options, std::optional<std::span<const VideoProposal>> proposals) {
  EvalReport r;
  r.num_predictions = preds.size();
  r.num_ground_truth = gts.size();

  const auto m = match_predictions(preds, gts, options.match_tolerance, options.strategy);
  r.true_positives = m.true_positives;
  const auto overall = f1_from_counts(m.true_positives, m.false_positives, m.false_negatives);
  r.precision = overall.precision;
  r.recall = overall.recall;
  r.f1 = overall.f1;

  for (std::size_t p = 0; p < preds.size(); ++p) {
    auto& b = r.per_class[preds[p].label];
    if (m.pred_to_gt[p]) ++b.true_positives;
    else ++b.false_positives;
  }
  std::vector<bool> matched(gts.size(), false);
  for (const auto& g : m.pred_to_gt)
    if (g) matched[*g] = true;
  for (std::size_t g = 0; g < gts.size(); ++g)
    if (!matched[g]) ++r.per_class[gts[g].label].false_negatives;
  for (auto& [c, b] : r.per_class) b.score = f1_from_counts(b.true_positives, b.false_positives, b.false_negatives);

  const auto q = miou_and_time_positive(preds, gts);
  r.miou = q.miou;
  r.time_positive_accuracy = q.time_positive_accuracy;
  r.time_positive_count = q.time_positive_count;

  if (proposals) {
    r.ar_at_an = ar_at_an(*proposals, gts, options.an_values, options.tiou_grid);
  } else {
    std::vector<VideoProposal> as_proposals;
    as_proposals.reserve(preds.size());
    for (const auto& p : preds)
      as_proposals.push_back({p.video_id, Proposal(p.interval, std::clamp(p.score, 0.0, 1.0))});
    r.ar_at_an = ar_at_an(as_proposals, gts, options.an_values, options.tiou_grid);
  }
  return r;
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string format_report_table(const EvalReport& r) {
  std::string out;
  out += "predictions        " + std::to_string(r.num_predictions) + "\n";
  out += "ground truth       " + std::to_string(r.num_ground_truth) + "\n";
  out += "true positives     " + std::to_string(r.true_positives) + "\n";
  out += "precision          " + fmt("%.3f", r.precision) + "\n";
  out += "recall             " + fmt("%.3f", r.recall) + "\n";
  out += "F1                 " + fmt("%.3f", r.f1) + "\n";
  out += "mIoU               " + fmt("%.3f", r.miou) + "\n";
  out += "time-positive acc  " + fmt("%.3f", r.time_positive_accuracy) + " (" +
         std::to_string(r.time_positive_count) + " time-positive)\n";
  for (const auto& [an, ar] : r.ar_at_an) {
    char line[64];
    std::snprintf(line, sizeof line, "AR@%-15d %.3f\n", an, ar);
    out += line;
  }
  out += "\nclass   tp   fp   fn  precision  recall     F1\n";
  for (const auto& [c, b] : r.per_class) {
    char line[128];
    std::snprintf(line, sizeof line, "%5d %4zu %4zu %4zu  %9.3f  %6.3f  %5.3f\n", c, b.true_positives,
                  b.false_positives, b.false_negatives, b.score.precision, b.score.recall, b.score.f1);
    out += line;
  }
  return out;
}

std::string format_report_csv(const EvalReport& r) {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + "," + v + "\n"; };
  kv("predictions", std::to_string(r.num_predictions));
  kv("ground_truth", std::to_string(r.num_ground_truth));
  kv("true_positives", std::to_string(r.true_positives));
  kv("precision", format_exact(r.precision));
  kv("recall", format_exact(r.recall));
  kv("f1", format_exact(r.f1));
  kv("miou", format_exact(r.miou));
  kv("time_positive_accuracy", format_exact(r.time_positive_accuracy));
  kv("time_positive_count", std::to_string(r.time_positive_count));
  for (const auto& [an, ar] : r.ar_at_an) kv("ar@" + std::to_string(an), format_exact(ar));
  for (const auto& [c, b] : r.per_class)
    out += "class," + std::to_string(c) + "," + std::to_string(b.true_positives) + "," +
           std::to_string(b.false_positives) + "," + std::to_string(b.false_negatives) + "," +
           format_exact(b.score.precision) + "," + format_exact(b.score.recall) + "," + format_exact(b.score.f1) + "\n";
  return out;
}

}  // namespace actloc
