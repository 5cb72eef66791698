#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "actloc/core.hpp"
#include "actloc/io.hpp"

namespace actloc {

enum class NmsMethod { Hard, SoftLinear, SoftGaussian };

NmsMethod parse_nms_method(std::string_view s);
std::string_view to_string(NmsMethod m);

// Proposals whose score NMS decays below this are discarded.
inline constexpr double kNmsDiscardFloor = 1e-4;

struct GeneratorConfig {
  std::vector<double> window_lengths{10.0, 15.0, 20.0, 25.0, 30.0};
  double window_stride = 2.0;
  double actionness_floor = 0.3;
  NmsMethod nms_method = NmsMethod::SoftLinear;
  double nms_threshold = 0.1;
  double nms_sigma = 0.5;
  std::size_t max_proposals = 150;

  // Boundary refinement: each candidate boundary moves to the strongest
  // actionness edge within `refine_radius` seconds, where edge strength is
  // the mean-actionness step across `edge_width` seconds on either side.
  double refine_radius = 4.0;
  double edge_width = 1.0;
  double min_edge_contrast = 0.25;
  // Refined proposals are rescored as inside mean times one minus the mean
  // actionness over `flank_width` seconds beyond each end.
  double flank_width = 1.0;

  void validate() const;
};

/// Piecewise-constant actionness over snippets of width `step`, integrated
/// with fractional snippet coverage. Time outside the trace counts as zero.
class ActionnessProfile {
 public:
  ActionnessProfile(std::span<const double> actionness, double step);

  double step() const { return step_; }
  std::size_t size() const { return prefix_.size() - 1; }
  double duration() const { return step_ * static_cast<double>(size()); }

  double integral(double from, double to) const;
  double mean(double from, double to) const { return to > from ? integral(from, to) / (to - from) : 0.0; }

 private:
  double cumulative(double t) const;

  std::vector<double> prefix_;
  std::vector<double> values_;
  double step_;
};

/// Multi-scale sliding windows scored by mean actionness; windows below
/// the floor are dropped. Sorted by score descending, ties by earlier start
/// then shorter length.
std::vector<Proposal> generate_candidates(const ActionnessProfile& profile, const GeneratorConfig& cfg);
std::vector<Proposal> generate_candidates(const ScoreTrace& trace, const GeneratorConfig& cfg);

/// Snaps candidate boundaries to nearby actionness edges, rescores by
/// boundary contrast, and merges candidates that land on the same interval.
std::vector<Proposal> refine_candidates(const ActionnessProfile& profile, std::span<const Proposal> candidates,
                                        const GeneratorConfig& cfg);

/// Greedy (soft-)NMS over temporal intervals; output holds at most
/// `cfg.max_proposals` entries sorted by final score.
std::vector<Proposal> soft_nms(std::vector<Proposal> proposals, const GeneratorConfig& cfg);

}  // namespace actloc
