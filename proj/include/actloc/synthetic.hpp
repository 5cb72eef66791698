#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "actloc/core.hpp"
#include "actloc/io.hpp"

namespace actloc {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for the stream identified by `tags` under a master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

/// mt19937_64 with portable conversions: uniform() takes the top 53 bits
/// of each draw, so sequences are reproducible on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Stream tag under which the validation scenario paired with a test
// scenario draws its seed.
inline constexpr std::uint64_t kValidationStream = 0x76616c;

struct ScenarioParams {
  std::uint64_t seed = 42;
  std::size_t n_videos = 5;
  std::size_t n_actions_per_video = 17;
  double noise_level = 0.0;
  // Dashboard, rear, right.
  std::array<double, 3> view_reliability{1.0, 0.75, 0.9};
  double step = 0.5;
  // Action durations are uniform in [min_duration, max_duration]; gaps are
  // triangular on [min_gap, max_gap] with the mode at the midpoint.
  double min_duration = 12.0;
  double max_duration = 28.0;
  double min_gap = 2.0;
  double max_gap = 18.0;
  std::string video_prefix = "video";

  void validate() const;
};

struct SyntheticVideo {
  std::string video_id;
  double duration = 0.0;
  // Scheduled actions in temporal order (the ground truth).
  std::vector<GroundTruthInstance> actions;
  // Action boundaries used when rendering traces, aligned with `actions`.
  std::vector<TimeInterval> rendered;
};

struct Scenario {
  ScenarioParams params;
  double jitter = 0.0;
  std::vector<SyntheticVideo> videos;
  std::vector<GroundTruthInstance> gts;
  // Nine traces per video, ordered by video, then view, then rate.
  std::vector<ScoreTrace> traces;
};

Scenario generate_scenario(const ScenarioParams& params);
Scenario generate_scenario(std::uint64_t seed, std::size_t n_videos, std::size_t n_actions_per_video,
                           double noise_level, const std::array<double, 3>& view_reliability);

/// Re-renders every trace with each action boundary shifted by an
/// independent uniform offset in [-jitter, +jitter]; ground truth and all
/// other random draws are unchanged.
Scenario perturb_boundaries(const Scenario& scenario, double jitter);

}  // namespace actloc
