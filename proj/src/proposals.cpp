#include "actloc/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace actloc {

NmsMethod parse_nms_method(std::string_view s) {
  if (s == "hard") return NmsMethod::Hard;
  if (s == "linear" || s == "soft-linear") return NmsMethod::SoftLinear;
  if (s == "gaussian" || s == "soft-gaussian") return NmsMethod::SoftGaussian;
  throw InvariantError("unknown NMS method '" + std::string(s) + "' (expected hard, linear or gaussian)");
}

std::string_view to_string(NmsMethod m) {
  switch (m) {
    case NmsMethod::Hard: return "hard";
    case NmsMethod::SoftLinear: return "linear";
    case NmsMethod::SoftGaussian: return "gaussian";
  }
  return "unknown";
}

void GeneratorConfig::validate() const {
  if (window_lengths.empty()) throw InvariantError("at least one window length is required");
  for (double l : window_lengths)
    if (!(l > 0.0)) throw InvariantError("window lengths must be positive");
  if (!(window_stride > 0.0)) throw InvariantError("window stride must be positive");
  if (!(nms_threshold >= 0.0 && nms_threshold <= 1.0)) throw InvariantError("NMS threshold must lie in [0,1]");
  if (!(nms_sigma > 0.0)) throw InvariantError("NMS sigma must be positive");
  if (max_proposals < 1) throw InvariantError("max_proposals must be at least 1");
  if (!(refine_radius >= 0.0)) throw InvariantError("refine radius must be non-negative");
  if (!(edge_width > 0.0)) throw InvariantError("edge width must be positive");
  if (!(flank_width >= 0.0)) throw InvariantError("flank width must be non-negative");
}

// ------------------------------------------------------------ profile

ActionnessProfile::ActionnessProfile(std::span<const double> actionness, double step)
    : prefix_(actionness.size() + 1, 0.0), values_(actionness.begin(), actionness.end()), step_(step) {
  if (!(step > 0.0)) throw InvariantError("snippet step must be positive");
  if (actionness.empty()) throw InvariantError("cannot build proposals from an empty trace");
  for (std::size_t i = 0; i < values_.size(); ++i) prefix_[i + 1] = prefix_[i] + values_[i] * step_;
}

double ActionnessProfile::cumulative(double t) const {
  if (t <= 0.0) return 0.0;
  const std::size_t n = size();
  const double pos = t / step_;
  if (pos >= static_cast<double>(n)) return prefix_[n];
  const auto i = static_cast<std::size_t>(pos);
  return prefix_[i] + (t - static_cast<double>(i) * step_) * values_[i];
}

double ActionnessProfile::integral(double from, double to) const {
  if (!(to > from)) return 0.0;
  return cumulative(to) - cumulative(from);
}

// --------------------------------------------------------- candidates

namespace {

void sort_ranked(std::vector<Proposal>& ps) { std::stable_sort(ps.begin(), ps.end(), proposal_rank_less); }

// Keeps the highest-scored proposal per distinct interval.
std::vector<Proposal> unique_intervals(std::vector<Proposal> ps) {
  std::map<std::pair<double, double>, double> best;
  for (const auto& p : ps) {
    auto [it, inserted] = best.emplace(std::make_pair(p.interval.start(), p.interval.end()), p.p_score);
    if (!inserted) it->second = std::max(it->second, p.p_score);
  }
  std::vector<Proposal> out;
  out.reserve(best.size());
  for (const auto& [iv, score] : best) out.emplace_back(TimeInterval(iv.first, iv.second), score);
  sort_ranked(out);
  return out;
}

}  // namespace

std::vector<Proposal> generate_candidates(const ActionnessProfile& profile, const GeneratorConfig& cfg) {
  cfg.validate();
  const double duration = profile.duration();
  std::vector<Proposal> out;
  for (double length : cfg.window_lengths) {
    for (std::size_t k = 0;; ++k) {
      const double start = static_cast<double>(k) * cfg.window_stride;
      if (start >= duration) break;
      const double end = std::min(start + length, duration);
      const double score = std::clamp(profile.mean(start, end), 0.0, 1.0);
      if (score >= cfg.actionness_floor) out.emplace_back(TimeInterval(start, end), score);
    }
  }
  return unique_intervals(std::move(out));
}

std::vector<Proposal> generate_candidates(const ScoreTrace& trace, const GeneratorConfig& cfg) {
  trace.validate();
  return generate_candidates(ActionnessProfile(trace.actionness, trace.step), cfg);
}

namespace {

enum class Edge { Rising, Falling };

// Grid position within the search radius with the strongest edge of the
// requested polarity; the original boundary when no edge is strong enough.
double snap_boundary(const ActionnessProfile& profile, double boundary, Edge edge, const GeneratorConfig& cfg) {
  const double step = profile.step();
  const double h = cfg.edge_width;
  const auto lo = static_cast<long>(std::ceil((boundary - cfg.refine_radius) / step - 1e-9));
  const auto hi = static_cast<long>(std::floor((boundary + cfg.refine_radius) / step + 1e-9));
  const long n = static_cast<long>(profile.size());

  double best_t = boundary;
  double best_strength = -1.0;
  double best_dist = 0.0;
  for (long i = std::max(0L, lo); i <= std::min(n, hi); ++i) {
    const double t = static_cast<double>(i) * step;
    const double after = profile.mean(t, t + h);
    const double before = profile.mean(t - h, t);
    const double strength = edge == Edge::Rising ? after - before : before - after;
    const double dist = std::abs(t - boundary);
    const bool stronger = strength > best_strength + 1e-12;
    const bool tied = std::abs(strength - best_strength) <= 1e-12;
    if (stronger || (tied && dist < best_dist)) {
      best_t = t;
      best_strength = strength;
      best_dist = dist;
    }
  }
  return best_strength >= cfg.min_edge_contrast ? best_t : boundary;
}

}  // namespace

std::vector<Proposal> refine_candidates(const ActionnessProfile& profile, std::span<const Proposal> candidates,
                                        const GeneratorConfig& cfg) {
  cfg.validate();
  const double duration = profile.duration();
  std::vector<Proposal> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    double s = snap_boundary(profile, c.interval.start(), Edge::Rising, cfg);
    double e = snap_boundary(profile, c.interval.end(), Edge::Falling, cfg);
    s = std::clamp(s, 0.0, duration);
    e = std::clamp(e, 0.0, duration);
    if (!(e - s >= 0.5 * profile.step())) {
      s = c.interval.start();
      e = c.interval.end();
    }
    const double inside = profile.mean(s, e);
    double flank = 0.0;
    if (cfg.flank_width > 0.0)
      flank = (profile.integral(s - cfg.flank_width, s) + profile.integral(e, e + cfg.flank_width)) /
              (2.0 * cfg.flank_width);
    out.emplace_back(TimeInterval(s, e), std::clamp(inside * (1.0 - flank), 0.0, 1.0));
  }
  return unique_intervals(std::move(out));
}

// ---------------------------------------------------------------- NMS

std::vector<Proposal> soft_nms(std::vector<Proposal> proposals, const GeneratorConfig& cfg) {
  cfg.validate();
  sort_ranked(proposals);
  std::vector<Proposal> kept;
  kept.reserve(std::min(cfg.max_proposals, proposals.size()));
  std::vector<Proposal> remaining = std::move(proposals);

  while (!remaining.empty() && kept.size() < cfg.max_proposals) {
    const auto best_it = std::min_element(remaining.begin(), remaining.end(), proposal_rank_less);
    const Proposal best = *best_it;
    remaining.erase(best_it);
    kept.push_back(best);

    std::vector<Proposal> next;
    next.reserve(remaining.size());
    for (const auto& r : remaining) {
      const double overlap = tiou(best.interval, r.interval);
      double score = r.p_score;
      if (overlap > 0.0) {
        switch (cfg.nms_method) {
          case NmsMethod::Hard:
            if (overlap > cfg.nms_threshold) score = 0.0;
            break;
          case NmsMethod::SoftLinear:
            if (overlap > cfg.nms_threshold) score *= 1.0 - overlap;
            break;
          case NmsMethod::SoftGaussian:
            score *= std::exp(-(overlap * overlap) / cfg.nms_sigma);
            break;
        }
      }
      // Only decay discards; low input scores pass through.
      if (score == r.p_score || score >= kNmsDiscardFloor) next.emplace_back(r.interval, score);
    }
    remaining = std::move(next);
  }
  sort_ranked(kept);
  return kept;
}

}  // namespace actloc
