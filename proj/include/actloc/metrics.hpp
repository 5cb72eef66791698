#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actloc/core.hpp"
#include "actloc/io.hpp"

namespace actloc {

struct Prediction {
  std::string video_id;
  ClassId label;
  TimeInterval interval;
  double score;
};

Prediction to_prediction(const VideoDetection& d);
Prediction to_prediction(const SubmissionRow& r, double score = 1.0);

enum class MatchStrategy { Greedy, Optimal };

struct Matching {
  // Index into the ground-truth span, per prediction (input order).
  std::vector<std::optional<std::size_t>> pred_to_gt;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

/// One-to-one matching within each video. A prediction and a ground-truth
/// instance are compatible when their classes agree and both boundaries
/// lie within `tol` seconds. Greedy: predictions by descending score (ties
/// by earlier start) each take the first compatible unmatched instance in
/// start order. Optimal: maximum cardinality matching.
Matching match_predictions(std::span<const Prediction> preds, std::span<const GroundTruthInstance> gts,
                           double tol = 1.0, MatchStrategy strategy = MatchStrategy::Greedy);

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

F1Score f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

F1Score challenge_f1(std::span<const Prediction> preds, std::span<const GroundTruthInstance> gts, double tol = 1.0,
                     MatchStrategy strategy = MatchStrategy::Greedy);

inline constexpr double kTimePositiveTiou = 0.9;

struct LocalizationQuality {
  double miou = 0.0;
  double time_positive_accuracy = 0.0;
  std::size_t time_positive_count = 0;
};

/// Each prediction is assigned its best-tIoU instance in the same video
/// regardless of class. mIoU averages those tIoUs; accuracy is measured
/// over predictions whose best tIoU strictly exceeds 0.9.
LocalizationQuality miou_and_time_positive(std::span<const Prediction> preds,
                                           std::span<const GroundTruthInstance> gts);

inline const std::vector<int> kDefaultAnValues = {25, 50, 100, 150};

/// 0.50, 0.55, ..., 0.95.
std::vector<double> default_tiou_grid();

/// Average recall over the tIoU grid with each video's proposal list cut to
/// its top AN entries. Matching per threshold is class-agnostic and
/// one-to-one, greedy by proposal rank.
std::map<int, double> ar_at_an(std::span<const VideoProposal> proposals, std::span<const GroundTruthInstance> gts,
                               std::span<const int> an_values, std::span<const double> tiou_grid);
std::map<int, double> ar_at_an(std::span<const VideoProposal> proposals, std::span<const GroundTruthInstance> gts);

struct ClassBreakdown {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  F1Score score;
};

struct EvalReport {
  double miou = 0.0;
  double time_positive_accuracy = 0.0;
  std::size_t time_positive_count = 0;
  std::size_t num_predictions = 0;
  std::size_t num_ground_truth = 0;
  std::size_t true_positives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<ClassId, ClassBreakdown> per_class;
  std::map<int, double> ar_at_an;
};

struct EvalOptions {
  double match_tolerance = 1.0;
  MatchStrategy strategy = MatchStrategy::Greedy;
  std::vector<int> an_values = kDefaultAnValues;
  std::vector<double> tiou_grid = default_tiou_grid();
};

/// Full report. AR@AN uses `proposals` when given, otherwise the
/// predictions ranked by score.
EvalReport evaluate(std::span<const Prediction> preds, std::span<const GroundTruthInstance> gts,
                    const EvalOptions& options = {}, std::optional<std::span<const VideoProposal>> proposals = {});

std::string format_report_table(const EvalReport& r);
/// "key,value" lines followed by "class,<id>,tp,fp,fn,precision,recall,f1" rows.
std::string format_report_csv(const EvalReport& r);

}  // namespace actloc
