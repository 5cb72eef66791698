#include "actloc/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "text_util.hpp"

namespace actloc {

using detail::LineReader;
using Kind = ParseError::Kind;

namespace {

std::string locate(const std::string& source, std::size_t line, const std::string& message) {
  return source + ":" + std::to_string(line) + ": " + message;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

// Runs `fn` and rethrows domain invariant failures as located parse errors.
template <typename Fn>
auto at_row(const LineReader& reader, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InvariantError& e) {
    reader.fail(Kind::InvalidValue, e.what());
  }
}

ClassId parse_class(const LineReader& reader, std::string_view tok) {
  const long v = reader.integer(tok, "class id");
  if (v < 0 || v >= kNumClasses)
    reader.fail(Kind::InvalidValue, "class id " + std::to_string(v) + " outside 0..17");
  return static_cast<ClassId>(v);
}

std::string format_fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

ParseError::ParseError(Kind kind, std::string source, std::size_t line, const std::string& message)
    : std::runtime_error(locate(source, line, message)), kind_(kind), source_(std::move(source)), line_(line) {}

std::string format_exact(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw InvariantError("cannot format number");
  return std::string(buf, ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void ScoreTrace::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvariantError("trace step must be positive");
  if (scores.empty()) throw InvariantError("trace has no snippets");
  if (actionness.size() != scores.size())
    throw InvariantError("actionness length does not match score length");
  for (double a : actionness)
    if (!(a >= 0.0 && a <= 1.0)) throw InvariantError("actionness must lie in [0,1]");
}

SubmissionRow::SubmissionRow(std::string id, ClassId activity, double s, double e)
    : video_id(std::move(id)), activity_id(activity), start(s), end(e) {
  if (!is_reportable_class(activity))
    throw InvariantError("submission activity id must be in 1..17 (class 0 is never reported)");
  (void)TimeInterval(s, e);
  (void)VideoKey(video_id, ViewId::Dashboard);
}

// ---------------------------------------------------------------- traces

std::vector<ScoreTrace> parse_score_traces(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::vector<ScoreTrace> traces;
  std::size_t header_line = 0;
  std::map<std::tuple<std::string, int, int>, std::size_t> seen;

  auto close_current = [&] {
    if (!traces.empty() && traces.back().scores.empty())
      throw ParseError(Kind::Malformed, source, header_line,
                       "trace '" + traces.back().key.video_id + "' has no snippet rows");
  };

  std::string_view line;
  while (reader.next(line)) {
    const auto fields = detail::split_fields(line);
    if (fields.front() == "trace") {
      close_current();
      header_line = reader.line_no();
      if (fields.size() < 4 || fields.size() > 5)
        reader.fail(Kind::Malformed, "trace header must be 'trace <video_id> <view> <rate> [step]'");
      const double step = fields.size() == 5 ? reader.number(fields[4], "step") : kDefaultSnippetStep;
      auto trace = at_row(reader, [&] {
        return ScoreTrace{VideoKey(std::string(fields[1]), parse_view(fields[2])),
                          parse_rate(static_cast<int>(reader.integer(fields[3], "rate"))), step, {}, {}};
      });
      if (!(step > 0.0) || !std::isfinite(step)) reader.fail(Kind::InvalidValue, "step must be positive");
      const auto key = std::make_tuple(trace.key.video_id, static_cast<int>(trace.key.view), rate_value(trace.rate));
      if (!seen.emplace(key, reader.line_no()).second)
        reader.fail(Kind::Malformed, "duplicate trace for video '" + trace.key.video_id + "'");
      traces.push_back(std::move(trace));
      continue;
    }
    if (traces.empty()) reader.fail(Kind::Malformed, "snippet row before any trace header");
    if (fields.size() != 1 + kNumClasses)
      reader.fail(Kind::DimensionMismatch, "expected actionness and 18 class scores, got " +
                                                std::to_string(fields.size() == 0 ? 0 : fields.size() - 1) +
                                                " class scores");
    const double act = reader.number(fields[0], "actionness");
    if (!(act >= 0.0 && act <= 1.0)) reader.fail(Kind::InvalidValue, "actionness outside [0,1]");
    ScoreVector::Array row{};
    for (int c = 0; c < kNumClasses; ++c) {
      const double v = reader.number(fields[static_cast<std::size_t>(c) + 1], "class score");
      if (!(v >= 0.0 && v <= 1.0)) reader.fail(Kind::InvalidValue, "class score outside [0,1]");
      row[static_cast<std::size_t>(c)] = v;
    }
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::abs(total - 1.0) > kRenormalizeTolerance)
      reader.fail(Kind::NotNormalizable, "class scores sum to " + format_exact(total) + ", not within 1e-3 of 1");
    // Rows already normalized to round-off are kept bit-for-bit.
    if (std::abs(total - 1.0) > 1e-12)
      for (double& v : row) v /= total;
    traces.back().scores.push_back(ScoreVector::from(row, 1e-9));
    traces.back().actionness.push_back(act);
  }
  close_current();
  return traces;
}

std::vector<ScoreTrace> read_score_traces(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_score_traces(in, path.string());
}

void write_score_traces(const std::filesystem::path& path, const std::vector<ScoreTrace>& traces) {
  std::string out = "# actloc score traces: actionness followed by 18 class scores per snippet\n";
  for (const auto& t : traces) {
    t.validate();
    out += "trace " + t.key.video_id + " " + std::string(to_string(t.key.view)) + " " +
           std::to_string(rate_value(t.rate)) + " " + format_exact(t.step) + "\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
      out += format_exact(t.actionness[i]);
      for (double v : t.scores[i].values()) {
        out += ',';
        out += format_exact(v);
      }
      out += '\n';
    }
  }
  write_text_file(path, out);
}

// ---------------------------------------------------------- ground truth

std::vector<GroundTruthInstance> parse_ground_truth(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::vector<GroundTruthInstance> out;
  std::string_view line;
  while (reader.next(line)) {
    const auto f = detail::split_fields(line);
    if (f.size() != 4) reader.fail(Kind::Malformed, "expected 'video_id,class,start,end'");
    const ClassId c = parse_class(reader, f[1]);
    const double s = reader.number(f[2], "start");
    const double e = reader.number(f[3], "end");
    out.push_back(at_row(reader, [&] { return GroundTruthInstance(std::string(f[0]), c, TimeInterval(s, e)); }));
  }
  return out;
}

std::vector<GroundTruthInstance> read_ground_truth(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_ground_truth(in, path.string());
}

void write_ground_truth(const std::filesystem::path& path, const std::vector<GroundTruthInstance>& gts) {
  std::string out = "# video_id,class,start,end\n";
  for (const auto& g : gts)
    out += g.video_id + "," + std::to_string(g.label) + "," + format_exact(g.interval.start()) + "," +
           format_exact(g.interval.end()) + "\n";
  write_text_file(path, out);
}

// ------------------------------------------------------------ submission

std::string format_submission(std::vector<SubmissionRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const SubmissionRow& a, const SubmissionRow& b) {
    return std::tie(a.video_id, a.start, a.end, a.activity_id) < std::tie(b.video_id, b.start, b.end, b.activity_id);
  });
  std::string out;
  for (const auto& r : rows)
    out += r.video_id + " " + std::to_string(r.activity_id) + " " + format_fixed3(r.start) + " " +
           format_fixed3(r.end) + "\n";
  return out;
}

void write_submission(const std::filesystem::path& path, const std::vector<SubmissionRow>& rows) {
  write_text_file(path, format_submission(rows));
}

std::vector<SubmissionRow> parse_submission(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::vector<SubmissionRow> out;
  std::string_view line;
  while (reader.next(line)) {
    const auto f = detail::split_fields(line);
    if (f.size() != 4) reader.fail(Kind::Malformed, "expected 'video_id activity_id start end'");
    const ClassId c = parse_class(reader, f[1]);
    const double s = reader.number(f[2], "start");
    const double e = reader.number(f[3], "end");
    out.push_back(at_row(reader, [&] { return SubmissionRow(std::string(f[0]), c, s, e); }));
  }
  return out;
}

std::vector<SubmissionRow> read_submission(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_submission(in, path.string());
}

// ------------------------------------------------------------- proposals

std::vector<VideoProposal> parse_proposals(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::vector<VideoProposal> out;
  std::string_view line;
  while (reader.next(line)) {
    const auto f = detail::split_fields(line);
    if (f.size() != 4) reader.fail(Kind::Malformed, "expected 'video_id,start,end,p_score'");
    const double s = reader.number(f[1], "start");
    const double e = reader.number(f[2], "end");
    const double p = reader.number(f[3], "p_score");
    out.push_back(at_row(reader, [&] {
      (void)VideoKey(std::string(f[0]), ViewId::Dashboard);
      return VideoProposal{std::string(f[0]), Proposal(TimeInterval(s, e), p)};
    }));
  }
  return out;
}

std::vector<VideoProposal> read_proposals(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_proposals(in, path.string());
}

void write_proposals(const std::filesystem::path& path, const std::vector<VideoProposal>& proposals) {
  std::string out = "# video_id,start,end,p_score\n";
  for (const auto& vp : proposals)
    out += vp.video_id + "," + format_exact(vp.proposal.interval.start()) + "," +
           format_exact(vp.proposal.interval.end()) + "," + format_exact(vp.proposal.p_score) + "\n";
  write_text_file(path, out);
}

// ------------------------------------------------------------ detections

std::vector<VideoDetection> parse_detections(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::vector<VideoDetection> out;
  std::string_view line;
  constexpr std::size_t kFields = 6 + kNumClasses;
  while (reader.next(line)) {
    const auto f = detail::split_fields(line);
    if (f.size() != kFields) {
      const auto kind = f.size() > 6 ? Kind::DimensionMismatch : Kind::Malformed;
      reader.fail(kind, "expected 'video_id,start,end,p_score,label,label_score' and 18 class scores");
    }
    const double s = reader.number(f[1], "start");
    const double e = reader.number(f[2], "end");
    const double p = reader.number(f[3], "p_score");
    const ClassId label = parse_class(reader, f[4]);
    const double label_score = reader.number(f[5], "label_score");
    ScoreVector::Array scores{};
    for (std::size_t c = 0; c < static_cast<std::size_t>(kNumClasses); ++c)
      scores[c] = reader.number(f[6 + c], "class score");
    out.push_back(at_row(reader, [&] {
      (void)VideoKey(std::string(f[0]), ViewId::Dashboard);
      return VideoDetection{std::string(f[0]), ClassifiedProposal(Proposal(TimeInterval(s, e), p),
                                                                  ScoreVector::from(scores), label, label_score)};
    }));
  }
  return out;
}

std::vector<VideoDetection> read_detections(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_detections(in, path.string());
}

void write_detections(const std::filesystem::path& path, const std::vector<VideoDetection>& detections) {
  std::string out = "# video_id,start,end,p_score,label,label_score,s0..s17\n";
  for (const auto& vd : detections) {
    const auto& d = vd.detection;
    out += vd.video_id + "," + format_exact(d.interval().start()) + "," + format_exact(d.interval().end()) + "," +
           format_exact(d.p_score()) + "," + std::to_string(d.label) + "," + format_exact(d.label_score);
    for (double v : d.c_score.values()) {
      out += ',';
      out += format_exact(v);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace actloc
