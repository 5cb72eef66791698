#include "actloc/calibration.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "text_util.hpp"

namespace actloc {

ClassThresholds ClassThresholds::uniform(double value) {
  ClassThresholds t;
  t.theta_c.fill(value);
  t.theta_p.fill(value);
  t.theta_c[kBackgroundClass] = 1.0;
  t.theta_p[kBackgroundClass] = 1.0;
  t.validate();
  return t;
}

void ClassThresholds::validate() const {
  for (int c = 0; c < kNumClasses; ++c) {
    const auto i = static_cast<std::size_t>(c);
    if (!(theta_c[i] >= 0.0 && theta_c[i] <= 1.0 && theta_p[i] >= 0.0 && theta_p[i] <= 1.0))
      throw InvariantError("threshold for class " + std::to_string(c) + " outside [0,1]");
  }
  if (theta_c[kBackgroundClass] != 1.0 || theta_p[kBackgroundClass] != 1.0)
    throw InvariantError("class 0 thresholds must be 1.0");
}

ClassThresholds calibrate(std::span<const CalibrationPair> pairs, double fallback, double tol) {
  if (!(fallback >= 0.0 && fallback <= 1.0)) throw InvariantError("calibration fallback must lie in [0,1]");
  std::array<bool, kNumClasses> seen{};
  ClassThresholds t = ClassThresholds::uniform(fallback);
  for (const auto& [result, truth] : pairs) {
    if (result.label != truth.label || !is_reportable_class(result.label) ||
        !boundary_match(result.interval(), truth.interval, tol))
      throw InvariantError("calibration pair is not a correct result for ground truth in '" + truth.video_id + "'");
    const auto c = static_cast<std::size_t>(result.label);
    if (!seen[c]) {
      seen[c] = true;
      t.theta_c[c] = result.label_score;
      t.theta_p[c] = result.p_score();
    } else {
      t.theta_c[c] = std::min(t.theta_c[c], result.label_score);
      t.theta_p[c] = std::min(t.theta_p[c], result.p_score());
    }
  }
  t.validate();
  return t;
}

std::vector<CalibrationPair> collect_correct_results(std::span<const VideoDetection> detections,
                                                     std::span<const GroundTruthInstance> gts, double tol) {
  std::map<std::string, std::vector<const GroundTruthInstance*>> by_video;
  for (const auto& g : gts) by_video[g.video_id].push_back(&g);
  for (auto& [id, list] : by_video)
    std::stable_sort(list.begin(), list.end(), [](const auto* a, const auto* b) {
      return earlier_then_shorter(a->interval, b->interval);
    });

  std::vector<CalibrationPair> out;
  for (const auto& d : detections) {
    const auto it = by_video.find(d.video_id);
    if (it == by_video.end()) continue;
    for (const auto* g : it->second) {
      if (g->label == d.detection.label && boundary_match(d.detection.interval(), g->interval, tol)) {
        out.push_back({d.detection, *g});
        break;
      }
    }
  }
  return out;
}

ClassThresholds elementwise_min(std::span<const ClassThresholds> tables) {
  if (tables.empty()) throw InvariantError("cannot combine an empty set of threshold tables");
  ClassThresholds out = tables.front();
  for (const auto& t : tables.subspan(1)) {
    for (std::size_t c = 0; c < out.theta_c.size(); ++c) {
      out.theta_c[c] = std::min(out.theta_c[c], t.theta_c[c]);
      out.theta_p[c] = std::min(out.theta_p[c], t.theta_p[c]);
    }
  }
  out.validate();
  return out;
}

ClassThresholds parse_thresholds(std::istream& in, const std::string& source) {
  detail::LineReader reader(in, source);
  ClassThresholds t;
  std::array<bool, kNumClasses> seen{};
  std::string_view line;
  while (reader.next(line)) {
    const auto f = detail::split_fields(line);
    if (f.size() != 3) reader.fail(ParseError::Kind::Malformed, "expected 'class,theta_c,theta_p'");
    const long c = reader.integer(f[0], "class id");
    if (c < 0 || c >= kNumClasses) reader.fail(ParseError::Kind::InvalidValue, "class id outside 0..17");
    const auto i = static_cast<std::size_t>(c);
    if (seen[i]) reader.fail(ParseError::Kind::Malformed, "duplicate row for class " + std::to_string(c));
    seen[i] = true;
    t.theta_c[i] = reader.number(f[1], "theta_c");
    t.theta_p[i] = reader.number(f[2], "theta_p");
  }
  for (int c = 0; c < kNumClasses; ++c)
    if (!seen[static_cast<std::size_t>(c)])
      throw ParseError(ParseError::Kind::Malformed, source, reader.line_no(),
                       "missing threshold row for class " + std::to_string(c));
  try {
    t.validate();
  } catch (const InvariantError& e) {
    throw ParseError(ParseError::Kind::InvalidValue, source, reader.line_no(), e.what());
  }
  return t;
}

ClassThresholds read_thresholds(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return parse_thresholds(in, path.string());
}

void write_thresholds(const std::filesystem::path& path, const ClassThresholds& t) {
  t.validate();
  std::string out = "# class,theta_c,theta_p\n";
  for (int c = 0; c < kNumClasses; ++c) {
    const auto i = static_cast<std::size_t>(c);
    out += std::to_string(c) + "," + format_exact(t.theta_c[i]) + "," + format_exact(t.theta_p[i]) + "\n";
  }
  write_text_file(path, out);
}

}  // namespace actloc
