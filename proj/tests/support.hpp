#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <string>
#include <vector>

#include "actloc/core.hpp"
#include "actloc/metrics.hpp"
#include "actloc/postprocess.hpp"

namespace testing {

inline actloc::ScoreVector random_distribution(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  actloc::ScoreVector::Array a{};
  double sum = 0.0;
  for (double& x : a) sum += (x = u(rng));
  for (double& x : a) x /= sum;
  return actloc::ScoreVector::from(a);
}

// Distribution with most mass on `peak`.
inline actloc::ScoreVector peaked(actloc::ClassId peak, double mass) {
  actloc::ScoreVector::Array a{};
  a.fill((1.0 - mass) / (actloc::kNumClasses - 1));
  a[static_cast<std::size_t>(peak)] = mass;
  return actloc::ScoreVector::from(a);
}

inline actloc::ClassifiedProposal labeled(double start, double end, double p_score, actloc::ClassId label,
                                          double label_score) {
  return actloc::classify({actloc::TimeInterval(start, end), p_score}, peaked(label, label_score));
}

inline actloc::GroundTruthInstance gt(const std::string& video, actloc::ClassId c, double s, double e) {
  return {video, c, actloc::TimeInterval(s, e)};
}

struct MetricInstance {
  std::vector<actloc::Prediction> preds;
  std::vector<actloc::GroundTruthInstance> gts;
  std::vector<actloc::VideoProposal> props;
};

// Small instance on a half-second grid with near-miss boundaries, few
// classes and coarse scores so ties and conflicts are common.
inline MetricInstance random_metric_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_items(0, 6), cls(1, 3), start(0, 60), len(2, 30), jig(-3, 3), sc(0, 4);
  MetricInstance in;
  const int videos = 1 + static_cast<int>(rng() % 2);
  for (int v = 0; v < videos; ++v) {
    const std::string id = "v" + std::to_string(v);
    const int ng = n_items(rng);
    for (int i = 0; i < ng; ++i) {
      const double s = start(rng) * 0.5;
      in.gts.push_back(gt(id, cls(rng), s, s + len(rng) * 0.5));
    }
    const int np = n_items(rng);
    for (int i = 0; i < np; ++i) {
      double s, e;
      actloc::ClassId c;
      if (!in.gts.empty() && rng() % 3 != 0) {
        const auto& g = in.gts[rng() % in.gts.size()];
        s = std::max(0.0, g.interval.start() + jig(rng) * 0.5);
        e = std::max(s + 0.5, g.interval.end() + jig(rng) * 0.5);
        c = rng() % 4 == 0 ? cls(rng) : g.label;
      } else {
        s = start(rng) * 0.5;
        e = s + len(rng) * 0.5;
        c = cls(rng);
      }
      const double score = sc(rng) * 0.25;
      in.preds.push_back({id, c, actloc::TimeInterval(s, e), score});
      in.props.push_back({id, actloc::Proposal(actloc::TimeInterval(s, e), score)});
    }
  }
  return in;
}

}  // namespace testing
