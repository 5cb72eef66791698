#include "actloc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace actloc {

// Stream tags for derive_seed.
namespace {
constexpr std::uint64_t kScheduleStream = 1;
constexpr std::uint64_t kTraceStream = 2;
constexpr std::uint64_t kJitterStream = 3;
}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t t : tags) h = splitmix64(h ^ t);
  return h;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw InvariantError("cannot draw an index from an empty range");
  return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

void ScenarioParams::validate() const {
  if (n_videos < 1) throw InvariantError("scenario needs at least one video");
  if (n_actions_per_video < 1 || n_actions_per_video > 17)
    throw InvariantError("actions per video must be in 1..17");
  if (!(noise_level >= 0.0 && noise_level <= 1.0)) throw InvariantError("noise level must lie in [0,1]");
  for (double r : view_reliability)
    if (!(r > 0.0 && r <= 1.0)) throw InvariantError("view reliability must lie in (0,1]");
  if (!(step > 0.0)) throw InvariantError("snippet step must be positive");
  if (!(min_duration >= 10.0 && max_duration <= 30.0 && min_duration <= max_duration))
    throw InvariantError("action durations must lie within [10,30] seconds");
  if (!(min_gap >= 2.0 && max_gap >= min_gap)) throw InvariantError("gaps must be at least 2 seconds");
  (void)VideoKey(video_prefix, ViewId::Dashboard);
}

namespace {

std::string video_name(const std::string& prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%02zu", index + 1);
  return prefix + buf;
}

SyntheticVideo make_schedule(const ScenarioParams& p, std::size_t v) {
  Rng rng(derive_seed(p.seed, {kScheduleStream, v}));
  std::array<ClassId, 17> classes{};
  std::iota(classes.begin(), classes.end(), 1);
  for (std::size_t i = classes.size() - 1; i > 0; --i) std::swap(classes[i], classes[rng.index(i + 1)]);

  auto gap = [&] { return p.min_gap + (p.max_gap - p.min_gap) * 0.5 * (rng.uniform() + rng.uniform()); };

  SyntheticVideo video;
  video.video_id = video_name(p.video_prefix, v);
  double t = gap();
  for (std::size_t k = 0; k < p.n_actions_per_video; ++k) {
    const double d = rng.uniform(p.min_duration, p.max_duration);
    const TimeInterval iv(t, t + d);
    video.actions.emplace_back(video.video_id, classes[k], iv);
    video.rendered.push_back(iv);
    t += d + gap();
  }
  video.duration = std::ceil(t / p.step) * p.step;
  return video;
}

struct SegmentDraw {
  ClassId confuser;
  double strength;
};

// One trace: segments alternate background/action (2n+1 of them); each
// draws a confuser class and strength, then each snippet draws its own
// evidence level. Draw order does not depend on boundary positions.
ScoreTrace render_trace(const ScenarioParams& p, std::size_t v, const SyntheticVideo& video, ViewId view,
                        RateTag rate) {
  Rng rng(derive_seed(p.seed, {kTraceStream, v, static_cast<std::uint64_t>(view),
                               static_cast<std::uint64_t>(rate_value(rate))}));
  const std::size_t n_actions = video.actions.size();
  std::vector<SegmentDraw> segments;
  segments.reserve(2 * n_actions + 1);
  for (std::size_t s = 0; s < 2 * n_actions + 1; ++s) {
    ClassId confuser;
    if (s % 2 == 1) {
      const ClassId truth = video.actions[s / 2].label;
      confuser = static_cast<ClassId>(1 + rng.index(16));
      if (confuser >= truth) ++confuser;
    } else {
      confuser = static_cast<ClassId>(1 + rng.index(17));
    }
    segments.push_back({confuser, rng.uniform()});
  }

  const auto n_snippets = static_cast<std::size_t>(std::llround(video.duration / p.step));
  const double reliability = p.view_reliability[static_cast<std::size_t>(view)];
  const double eta = p.noise_level;

  ScoreTrace trace{VideoKey(video.video_id, view), rate, p.step, {}, {}};
  trace.scores.reserve(n_snippets);
  trace.actionness.reserve(n_snippets);
  std::size_t next_action = 0;
  for (std::size_t i = 0; i < n_snippets; ++i) {
    const double centre = (static_cast<double>(i) + 0.5) * p.step;
    while (next_action < n_actions && video.rendered[next_action].end() <= centre) ++next_action;
    const bool in_action = next_action < n_actions && video.rendered[next_action].start() <= centre;
    const std::size_t seg = in_action ? 2 * next_action + 1 : 2 * next_action;
    const ClassId truth = in_action ? video.actions[next_action].label : kBackgroundClass;
    const auto& draw = segments[seg];

    const double evidence = reliability * (1.0 - eta * rng.uniform());
    const double confusion = std::min(1.0, 2.0 * eta * draw.strength);
    ScoreVector::Array s;
    s.fill((1.0 - evidence) / kNumClasses);
    s[static_cast<std::size_t>(truth)] += evidence * (1.0 - confusion);
    s[static_cast<std::size_t>(draw.confuser)] += evidence * confusion;
    auto vec = ScoreVector::from(s, 1e-9);
    trace.actionness.push_back(std::clamp(1.0 - vec[kBackgroundClass], 0.0, 1.0));
    trace.scores.push_back(vec);
  }
  return trace;
}

void render_all(Scenario& sc) {
  sc.traces.clear();
  for (std::size_t v = 0; v < sc.videos.size(); ++v)
    for (ViewId view : kAllViews)
      for (RateTag rate : {RateTag::R32, RateTag::R64, RateTag::R128})
        sc.traces.push_back(render_trace(sc.params, v, sc.videos[v], view, rate));
}

}  // namespace

Scenario generate_scenario(const ScenarioParams& params) {
  params.validate();
  Scenario sc;
  sc.params = params;
  for (std::size_t v = 0; v < params.n_videos; ++v) {
    sc.videos.push_back(make_schedule(params, v));
    for (const auto& a : sc.videos.back().actions) sc.gts.push_back(a);
  }
  render_all(sc);
  return sc;
}

Scenario generate_scenario(std::uint64_t seed, std::size_t n_videos, std::size_t n_actions_per_video,
                           double noise_level, const std::array<double, 3>& view_reliability) {
  ScenarioParams p;
  p.seed = seed;
  p.n_videos = n_videos;
  p.n_actions_per_video = n_actions_per_video;
  p.noise_level = noise_level;
  p.view_reliability = view_reliability;
  return generate_scenario(p);
}

Scenario perturb_boundaries(const Scenario& scenario, double jitter) {
  if (!(jitter >= 0.0)) throw InvariantError("jitter must be non-negative");
  Scenario out = scenario;
  out.jitter = jitter;
  const double step = out.params.step;
  for (std::size_t v = 0; v < out.videos.size(); ++v) {
    auto& video = out.videos[v];
    Rng rng(derive_seed(out.params.seed, {kJitterStream, v}));
    double prev_end = 0.0;
    for (std::size_t k = 0; k < video.actions.size(); ++k) {
      const auto& truth = video.actions[k].interval;
      double s = truth.start() + rng.uniform(-jitter, jitter);
      double e = truth.end() + rng.uniform(-jitter, jitter);
      // Keep at least one snippet of background before and one of action.
      s = std::max(s, k == 0 ? 0.0 : prev_end + step);
      e = std::min(std::max(e, s + step), video.duration);
      s = std::min(s, e - step);
      video.rendered[k] = TimeInterval(s, e);
      prev_end = e;
    }
  }
  render_all(out);
  return out;
}

}  // namespace actloc
