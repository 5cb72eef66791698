#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "actloc/core.hpp"
#include "actloc/io.hpp"

namespace actloc {

/// Per-class minimum classification score (theta_c) and proposal
/// confidence (theta_p). Class 0 is pinned to 1.0.
struct ClassThresholds {
  std::array<double, kNumClasses> theta_c{};
  std::array<double, kNumClasses> theta_p{};

  /// Every reportable class at `value`, class 0 at 1.0.
  static ClassThresholds uniform(double value);

  void validate() const;

  friend bool operator==(const ClassThresholds&, const ClassThresholds&) = default;
};

/// A validation result that was classified and localized correctly.
struct CalibrationPair {
  ClassifiedProposal result;
  GroundTruthInstance truth;
};

inline constexpr double kCalibrationMatchTolerance = 1.0;

/// Minimum label score and proposal score per class over the correct
/// results; classes with none get `fallback`. Throws InvariantError when a
/// pair is not a correct result (wrong class or boundaries off by more
/// than `tol`).
ClassThresholds calibrate(std::span<const CalibrationPair> pairs, double fallback = 0.0,
                          double tol = kCalibrationMatchTolerance);

/// Pairs each detection with the first same-class ground-truth instance of
/// its video whose boundaries match within `tol`; unmatched detections are
/// skipped.
std::vector<CalibrationPair> collect_correct_results(std::span<const VideoDetection> detections,
                                                     std::span<const GroundTruthInstance> gts,
                                                     double tol = kCalibrationMatchTolerance);

ClassThresholds elementwise_min(std::span<const ClassThresholds> tables);

// "class,theta_c,theta_p", one row per class 0..17.
ClassThresholds parse_thresholds(std::istream& in, const std::string& source);
ClassThresholds read_thresholds(const std::filesystem::path& path);
void write_thresholds(const std::filesystem::path& path, const ClassThresholds& t);

}  // namespace actloc
