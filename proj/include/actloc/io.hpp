#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "actloc/core.hpp"

namespace actloc {

/// Malformed or invalid input text, located by source and 1-based line.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Malformed, DimensionMismatch, NotNormalizable, InvalidValue };

  ParseError(Kind kind, std::string source, std::size_t line, const std::string& message);

  Kind kind() const { return kind_; }
  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::string source_;
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultSnippetStep = 1.0;
// Rows whose class scores sum within this distance of 1 are renormalized.
inline constexpr double kRenormalizeTolerance = 1e-3;

/// Per-snippet class scores and actionness from one (video, view, rate) model.
struct ScoreTrace {
  VideoKey key;
  RateTag rate;
  double step = kDefaultSnippetStep;
  std::vector<ScoreVector> scores;
  std::vector<double> actionness;

  std::size_t size() const { return scores.size(); }
  double duration() const { return step * static_cast<double>(scores.size()); }

  /// Throws InvariantError unless step > 0, scores non-empty and aligned
  /// with actionness, and actionness in [0,1].
  void validate() const;
};

struct SubmissionRow {
  std::string video_id;
  ClassId activity_id;
  double start;
  double end;

  SubmissionRow(std::string id, ClassId activity, double s, double e);

  friend bool operator==(const SubmissionRow&, const SubmissionRow&) = default;
};

struct VideoProposal {
  std::string video_id;
  Proposal proposal;
};

struct VideoDetection {
  std::string video_id;
  ClassifiedProposal detection;
};

// Score traces: blocks headed by "trace <video_id> <view> <rate> [step]",
// followed by one row per snippet: actionness then 18 class scores.
std::vector<ScoreTrace> parse_score_traces(std::istream& in, const std::string& source);
std::vector<ScoreTrace> read_score_traces(const std::filesystem::path& path);
void write_score_traces(const std::filesystem::path& path, const std::vector<ScoreTrace>& traces);

// Ground truth: "video_id,class,start,end".
std::vector<GroundTruthInstance> parse_ground_truth(std::istream& in, const std::string& source);
std::vector<GroundTruthInstance> read_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const std::filesystem::path& path, const std::vector<GroundTruthInstance>& gts);

// Submission: "video_id activity_id start end", times with 3 decimals,
// ordered by video id then start time.
std::string format_submission(std::vector<SubmissionRow> rows);
void write_submission(const std::filesystem::path& path, const std::vector<SubmissionRow>& rows);
std::vector<SubmissionRow> parse_submission(std::istream& in, const std::string& source);
std::vector<SubmissionRow> read_submission(const std::filesystem::path& path);

// Proposal lists: "video_id,start,end,p_score".
std::vector<VideoProposal> parse_proposals(std::istream& in, const std::string& source);
std::vector<VideoProposal> read_proposals(const std::filesystem::path& path);
void write_proposals(const std::filesystem::path& path, const std::vector<VideoProposal>& proposals);

// Classified proposals: "video_id,start,end,p_score,label,label_score,s0,...,s17".
std::vector<VideoDetection> parse_detections(std::istream& in, const std::string& source);
std::vector<VideoDetection> read_detections(const std::filesystem::path& path);
void write_detections(const std::filesystem::path& path, const std::vector<VideoDetection>& detections);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_exact(double value);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace actloc
