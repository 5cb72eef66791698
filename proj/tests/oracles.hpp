#pragma once

// Brute-force reference implementations used only by tests. None of these
// call into the library's metric or matching code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "actloc/metrics.hpp"

namespace oracle {

// tIoU by sweeping the sorted endpoints of both intervals and summing the
// elementary segments covered by both / either.
inline double tiou(double a0, double a1, double b0, double b1) {
  std::vector<double> pts{a0, a1, b0, b1};
  std::sort(pts.begin(), pts.end());
  double inter = 0.0, uni = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = pts[i], hi = pts[i + 1];
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi);
    const bool in_a = a0 < mid && mid < a1;
    const bool in_b = b0 < mid && mid < b1;
    if (in_a && in_b) inter += hi - lo;
    if (in_a || in_b) uni += hi - lo;
  }
  return uni > 0.0 ? inter / uni : 0.0;
}

inline double tiou(const actloc::TimeInterval& a, const actloc::TimeInterval& b) {
  return tiou(a.start(), a.end(), b.start(), b.end());
}

// Every partial injective assignment of `n_left` items to `n_right`
// slots where compatible(l, r) holds; -1 marks unassigned.
inline void enumerate_matchings(std::size_t n_left, std::size_t n_right,
                                const std::function<bool(std::size_t, std::size_t)>& compatible,
                                const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> assign(n_left, -1);
  std::vector<bool> used(n_right, false);
  std::function<void(std::size_t)> rec = [&](std::size_t l) {
    if (l == n_left) {
      visit(assign);
      return;
    }
    assign[l] = -1;
    rec(l + 1);
    for (std::size_t r = 0; r < n_right; ++r) {
      if (used[r] || !compatible(l, r)) continue;
      used[r] = true;
      assign[l] = static_cast<int>(r);
      rec(l + 1);
      used[r] = false;
      assign[l] = -1;
    }
  };
  rec(0);
}

// Greedy first-match as the lexicographically smallest assignment vector,
// read in rank order with "unassigned" sorting last. `left` is already in
// rank order and `right` in preference order.
inline std::vector<int> lexmin_matching(std::size_t n_left, std::size_t n_right,
                                        const std::function<bool(std::size_t, std::size_t)>& compatible) {
  const int none = std::numeric_limits<int>::max();
  std::vector<int> best;
  enumerate_matchings(n_left, n_right, compatible, [&](const std::vector<int>& a) {
    std::vector<int> key(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) key[i] = a[i] < 0 ? none : a[i];
    if (best.empty() || key < best) best = key;
  });
  for (int& v : best)
    if (v == none) v = -1;
  return best;
}

inline std::size_t max_matching_size(std::size_t n_left, std::size_t n_right,
                                     const std::function<bool(std::size_t, std::size_t)>& compatible) {
  std::size_t best = 0;
  enumerate_matchings(n_left, n_right, compatible, [&](const std::vector<int>& a) {
    best = std::max<std::size_t>(best, std::count_if(a.begin(), a.end(), [](int v) { return v >= 0; }));
  });
  return best;
}

// Prediction rank: score desc, then start, end, class, input order.
inline std::vector<std::size_t> rank_predictions(const std::vector<actloc::Prediction>& preds) {
  std::vector<std::size_t> idx(preds.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = preds[a];
    const auto& y = preds[b];
    return std::make_tuple(-x.score, x.interval.start(), x.interval.end(), x.label, a) <
           std::make_tuple(-y.score, y.interval.start(), y.interval.end(), y.label, b);
  });
  return idx;
}

inline std::vector<std::size_t> order_gts(const std::vector<actloc::GroundTruthInstance>& gts) {
  std::vector<std::size_t> idx(gts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::make_tuple(gts[a].interval.start(), gts[a].interval.end(), gts[a].label, a) <
           std::make_tuple(gts[b].interval.start(), gts[b].interval.end(), gts[b].label, b);
  });
  return idx;
}

inline bool within(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool compatible(const actloc::Prediction& p, const actloc::GroundTruthInstance& g, double tol) {
  return p.video_id == g.video_id && p.label == g.label && within(p.interval.start(), g.interval.start(), tol) &&
         within(p.interval.end(), g.interval.end(), tol);
}

struct MatchResult {
  std::vector<int> pred_to_gt;  // original indices, -1 unmatched
  std::size_t tp = 0;
};

// Greedy matching per video via lexicographic minimum.
inline MatchResult greedy_match(const std::vector<actloc::Prediction>& preds,
                                const std::vector<actloc::GroundTruthInstance>& gts, double tol) {
  MatchResult out;
  out.pred_to_gt.assign(preds.size(), -1);
  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> videos;
  for (std::size_t p : rank_predictions(preds)) videos[preds[p].video_id].first.push_back(p);
  for (std::size_t g : order_gts(gts)) videos[gts[g].video_id].second.push_back(g);
  for (const auto& [id, pg] : videos) {
    const auto& [ps, gs] = pg;
    const auto a = lexmin_matching(ps.size(), gs.size(),
                                   [&](std::size_t l, std::size_t r) { return compatible(preds[ps[l]], gts[gs[r]], tol); });
    for (std::size_t l = 0; l < a.size(); ++l)
      if (a[l] >= 0) {
        out.pred_to_gt[ps[l]] = static_cast<int>(gs[static_cast<std::size_t>(a[l])]);
        ++out.tp;
      }
  }
  return out;
}

inline std::size_t optimal_tp(const std::vector<actloc::Prediction>& preds,
                              const std::vector<actloc::GroundTruthInstance>& gts, double tol) {
  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> videos;
  for (std::size_t p = 0; p < preds.size(); ++p) videos[preds[p].video_id].first.push_back(p);
  for (std::size_t g = 0; g < gts.size(); ++g) videos[gts[g].video_id].second.push_back(g);
  std::size_t total = 0;
  for (const auto& [id, pg] : videos) {
    const auto& [ps, gs] = pg;
    total += max_matching_size(ps.size(), gs.size(),
                               [&](std::size_t l, std::size_t r) { return compatible(preds[ps[l]], gts[gs[r]], tol); });
  }
  return total;
}

inline double f1(std::size_t tp, std::size_t n_pred, std::size_t n_gt) {
  const double p = n_pred ? static_cast<double>(tp) / static_cast<double>(n_pred) : 0.0;
  const double r = n_gt ? static_cast<double>(tp) / static_cast<double>(n_gt) : 0.0;
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

struct Quality {
  double miou = 0.0;
  double accuracy = 0.0;
  std::size_t time_positive = 0;
};

// Best tIoU per prediction by scanning every instance of its video; ties go
// to the instance earliest in (start, end, class) order.
inline Quality miou(const std::vector<actloc::Prediction>& preds, const std::vector<actloc::GroundTruthInstance>& gts) {
  Quality q;
  if (preds.empty()) return q;
  const auto order = order_gts(gts);
  double sum = 0.0;
  std::size_t correct = 0;
  for (const auto& p : preds) {
    double best = 0.0;
    int best_gt = -1;
    for (std::size_t g : order) {
      if (gts[g].video_id != p.video_id) continue;
      const double t = oracle::tiou(p.interval, gts[g].interval);
      if (best_gt < 0 || t > best) {
        best = t;
        best_gt = static_cast<int>(g);
      }
    }
    sum += best;
    if (best_gt >= 0 && best > 0.9) {
      ++q.time_positive;
      if (gts[static_cast<std::size_t>(best_gt)].label == p.label) ++correct;
    }
  }
  q.miou = sum / static_cast<double>(preds.size());
  q.accuracy = q.time_positive ? static_cast<double>(correct) / static_cast<double>(q.time_positive) : 0.0;
  return q;
}

// AR@AN with each threshold evaluated by the lexicographic-minimum
// assignment of ranked proposals to instances.
inline double average_recall(const std::vector<actloc::VideoProposal>& props,
                             const std::vector<actloc::GroundTruthInstance>& gts, int an,
                             const std::vector<double>& grid) {
  if (gts.empty() || grid.empty()) return 0.0;
  std::map<std::string, std::vector<actloc::Proposal>> ranked;
  for (const auto& vp : props) ranked[vp.video_id].push_back(vp.proposal);
  for (auto& [id, list] : ranked) {
    std::stable_sort(list.begin(), list.end(), [](const actloc::Proposal& a, const actloc::Proposal& b) {
      return std::make_tuple(-a.p_score, a.interval.start(), a.interval.length()) <
             std::make_tuple(-b.p_score, b.interval.start(), b.interval.length());
    });
    if (list.size() > static_cast<std::size_t>(an)) list.erase(list.begin() + an, list.end());
  }
  std::map<std::string, std::vector<std::size_t>> gt_by_video;
  for (std::size_t g : order_gts(gts)) gt_by_video[gts[g].video_id].push_back(g);
  double total = 0.0;
  for (double t : grid) {
    std::size_t covered = 0;
    for (const auto& [id, gs] : gt_by_video) {
      const auto it = ranked.find(id);
      if (it == ranked.end()) continue;
      const auto& ps = it->second;
      const auto a = lexmin_matching(ps.size(), gs.size(), [&](std::size_t l, std::size_t r) {
        return oracle::tiou(ps[l].interval, gts[gs[r]].interval) >= t;
      });
      covered += static_cast<std::size_t>(std::count_if(a.begin(), a.end(), [](int v) { return v >= 0; }));
    }
    total += static_cast<double>(covered) / static_cast<double>(gts.size());
  }
  return total / static_cast<double>(grid.size());
}

// Argmax with ties to the lowest index, then the class-0 fallback, found
// by checking each candidate against every other entry.
inline std::pair<int, double> resolve_label(const std::array<double, actloc::kNumClasses>& s) {
  auto beats_all = [&](int c, int skip) {
    for (int o = 0; o < actloc::kNumClasses; ++o) {
      if (o == c || o == skip) continue;
      if (s[o] > s[c] || (s[o] == s[c] && o < c)) return false;
    }
    return true;
  };
  for (int c = 0; c < actloc::kNumClasses; ++c) {
    if (!beats_all(c, -1)) continue;
    if (c != 0) return {c, s[c]};
    for (int d = 1; d < actloc::kNumClasses; ++d)
      if (beats_all(d, 0)) return {d, s[d]};
  }
  return {-1, 0.0};
}

// Mean actionness of [a, b) by integrating each snippet's overlap directly.
inline double window_mean(const std::vector<double>& act, double step, double a, double b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < act.size(); ++i) {
    const double lo = std::max(a, step * static_cast<double>(i));
    const double hi = std::min(b, step * static_cast<double>(i + 1));
    if (hi > lo) sum += act[i] * (hi - lo);
  }
  return sum / (b - a);
}

}  // namespace oracle
