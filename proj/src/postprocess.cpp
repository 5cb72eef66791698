#include "actloc/postprocess.hpp"

#include <algorithm>
#include <cmath>

namespace actloc {

namespace {

bool pool_rank_less(const ClassifiedProposal& a, const ClassifiedProposal& b) {
  return proposal_rank_less(a.proposal, b.proposal);
}

bool reaches(double score, double threshold) { return score >= threshold - kScoreEpsilon; }

}  // namespace

void PostprocessConfig::validate() const {
  if (!(min_duration >= 0.0 && max_duration >= min_duration))
    throw InvariantError("duration bounds must satisfy 0 <= min <= max");
  if (!(merge_tolerance >= 0.0)) throw InvariantError("merge tolerance must be non-negative");
}

std::vector<ClassifiedProposal> duration_filter(std::span<const ClassifiedProposal> proposals, double min_dur,
                                                double max_dur) {
  std::vector<ClassifiedProposal> out;
  for (const auto& p : proposals) {
    const double len = p.interval().length();
    if (len >= min_dur && len <= max_dur) out.push_back(p);
  }
  return out;
}

std::pair<ClassId, double> resolve_label(const ScoreVector& c_score) {
  auto argmax_from = [&](int first) {
    int best = first;
    for (int c = first + 1; c < kNumClasses; ++c)
      if (c_score[static_cast<std::size_t>(c)] > c_score[static_cast<std::size_t>(best)]) best = c;
    return best;
  };
  ClassId label = argmax_from(0);
  if (label == kBackgroundClass) label = argmax_from(1);
  return {label, c_score[static_cast<std::size_t>(label)]};
}

ClassifiedProposal classify(const Proposal& proposal, const ScoreVector& c_score) {
  const auto [label, score] = resolve_label(c_score);
  return ClassifiedProposal(proposal, c_score, label, score);
}

CandidatePool::CandidatePool(std::span<const ClassifiedProposal> proposals) {
  for (const auto& p : proposals) add(p);
}

void CandidatePool::add(const ClassifiedProposal& p) {
  if (!is_reportable_class(p.label)) throw InvariantError("class 0 proposals cannot enter the candidate pool");
  auto& list = lists_[static_cast<std::size_t>(p.label)];
  list.insert(std::upper_bound(list.begin(), list.end(), p, pool_rank_less), p);
}

const std::vector<ClassifiedProposal>& CandidatePool::for_class(ClassId c) const {
  if (!is_valid_class(c)) throw InvariantError("class id out of range");
  return lists_[static_cast<std::size_t>(c)];
}

std::size_t CandidatePool::size() const {
  std::size_t n = 0;
  for (const auto& l : lists_) n += l.size();
  return n;
}

CandidatePool classification_gate(std::span<const ClassifiedProposal> candidates, const ClassThresholds& thresholds) {
  CandidatePool pool;
  for (const auto& c : candidates) {
    if (!is_reportable_class(c.label)) continue;
    if (reaches(c.label_score, thresholds.theta_c[static_cast<std::size_t>(c.label)])) pool.add(c);
  }
  return pool;
}

std::vector<ClassifiedProposal> confidence_filter(const CandidatePool& pool, const ClassThresholds& thresholds) {
  std::vector<ClassifiedProposal> out;
  for (ClassId c = 1; c < kNumClasses; ++c)
    for (const auto& p : pool.for_class(c))
      if (reaches(p.p_score(), thresholds.theta_p[static_cast<std::size_t>(c)])) out.push_back(p);
  return out;
}

std::vector<ClassifiedProposal> select_final(const CandidatePool& pool, const ClassThresholds& thresholds,
                                             const PostprocessConfig& cfg) {
  cfg.validate();
  std::vector<ClassifiedProposal> out;
  for (ClassId c = 1; c < kNumClasses; ++c) {
    const double theta_p = thresholds.theta_p[static_cast<std::size_t>(c)];
    std::vector<const ClassifiedProposal*> survivors;
    for (const auto& p : pool.for_class(c)) {
      if (reaches(p.p_score(), theta_p)) survivors.push_back(&p);
      if (survivors.size() == 2) break;
    }
    if (survivors.empty()) continue;
    const auto& top = *survivors[0];
    if (survivors.size() == 1) {
      out.push_back(top);
      continue;
    }
    const auto& second = *survivors[1];
    const double d_start = std::abs(top.interval().start() - second.interval().start());
    const double d_end = std::abs(top.interval().end() - second.interval().end());
    if (d_start < cfg.merge_tolerance && d_end < cfg.merge_tolerance) {
      const TimeInterval merged(0.5 * (top.interval().start() + second.interval().start()),
                                0.5 * (top.interval().end() + second.interval().end()));
      out.emplace_back(Proposal(merged, top.p_score()), top.c_score, c, top.c_score[static_cast<std::size_t>(c)]);
    } else {
      out.push_back(top);
      if (!cfg.strict_single) out.push_back(second);
    }
  }
  return out;
}

std::vector<ClassifiedProposal> postprocess(std::span<const ClassifiedProposal> voted,
                                            const ClassThresholds& thresholds, const PostprocessConfig& cfg) {
  cfg.validate();
  const auto in_range = duration_filter(voted, cfg.min_duration, cfg.max_duration);
  return select_final(classification_gate(in_range, thresholds), thresholds, cfg);
}

}  // namespace actloc
