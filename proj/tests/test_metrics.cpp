#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "actloc/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace actloc;
using testing::gt;

namespace {

Prediction pred(const std::string& v, ClassId c, double s, double e, double score = 1.0) {
  return {v, c, TimeInterval(s, e), score};
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("matching examples") {
    const std::vector<GroundTruthInstance> gts{gt("v", 1, 10, 25), gt("v", 2, 40, 55)};
    std::vector<Prediction> same;
    for (const auto& g : gts) same.push_back({g.video_id, g.label, g.interval, 1.0});
    const auto m = match_predictions(same, gts);
    CHECK(m.true_positives == 2);
    CHECK(m.false_positives == 0);
    CHECK(m.false_negatives == 0);

    const std::vector<Prediction> dup{pred("v", 1, 10, 25, 0.9), pred("v", 1, 10.5, 25, 0.8)};
    const auto md = match_predictions(dup, gts);
    CHECK(md.true_positives == 1);
    CHECK(md.false_positives == 1);
    CHECK(md.pred_to_gt[0] == std::optional<std::size_t>{0});
    CHECK_FALSE(md.pred_to_gt[1].has_value());

    const std::vector<Prediction> wrong{pred("v", 3, 10, 25)};
    CHECK(match_predictions(wrong, gts).false_positives == 1);
    const std::vector<Prediction> other_video{pred("w", 1, 10, 25)};
    CHECK(match_predictions(other_video, gts).true_positives == 0);
  }

  TEST_CASE("F1 examples") {
    const std::vector<GroundTruthInstance> gts{gt("v", 1, 10, 25), gt("v", 2, 40, 55)};
    const std::vector<Prediction> perfect{pred("v", 1, 10, 25), pred("v", 2, 40, 55)};
    const auto p = challenge_f1(perfect, gts);
    CHECK(p.precision == 1.0);
    CHECK(p.recall == 1.0);
    CHECK(p.f1 == 1.0);
    const std::vector<Prediction> half{pred("v", 1, 10, 25)};
    const auto h = challenge_f1(half, gts);
    CHECK(h.precision == 1.0);
    CHECK(h.recall == 0.5);
    CHECK(h.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    const auto none = challenge_f1(std::vector<Prediction>{}, gts);
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);
  }

  TEST_CASE("greedy and optimal can differ") {
    // The top-ranked prediction fits both instances and takes the earlier
    // one, leaving the second prediction unmatched under greedy.
    const std::vector<GroundTruthInstance> gts{gt("v", 1, 10, 25), gt("v", 1, 11, 26)};
    const std::vector<Prediction> preds{pred("v", 1, 10.5, 25.5, 0.9), pred("v", 1, 9.5, 24.5, 0.8)};
    CHECK(match_predictions(preds, gts, 1.0, MatchStrategy::Greedy).true_positives == 1);
    CHECK(match_predictions(preds, gts, 1.0, MatchStrategy::Optimal).true_positives == 2);
  }

  TEST_CASE("mIoU and time-positive examples") {
    const std::vector<GroundTruthInstance> gts{gt("v", 1, 0, 10), gt("v", 2, 20, 40)};
    const std::vector<Prediction> exact{pred("v", 1, 0, 10), pred("v", 2, 20, 40)};
    const auto q = miou_and_time_positive(exact, gts);
    CHECK(q.miou == 1.0);
    CHECK(q.time_positive_accuracy == 1.0);

    const std::vector<Prediction> at_boundary{pred("v", 1, 0, 9)};
    const auto b = miou_and_time_positive(at_boundary, gts);
    CHECK(b.miou == doctest::Approx(0.9));
    CHECK(b.time_positive_count == 0);
    CHECK(b.time_positive_accuracy == 0.0);

    // tIoU 0.95 each, one label wrong.
    const std::vector<Prediction> two{pred("v", 2, 20, 39), pred("v", 5, 21, 40)};
    const auto t = miou_and_time_positive(two, gts);
    CHECK(t.time_positive_count == 2);
    CHECK(t.time_positive_accuracy == 0.5);

    const std::vector<Prediction> orphan{pred("x", 1, 0, 10)};
    CHECK(miou_and_time_positive(orphan, gts).miou == 0.0);
  }

  TEST_CASE("AR@AN examples") {
    const std::vector<GroundTruthInstance> gts{gt("v", 1, 0, 10), gt("v", 2, 20, 40)};
    std::vector<VideoProposal> same{{"v", Proposal({0, 10}, 0.9)}, {"v", Proposal({20, 40}, 0.8)}};
    for (const auto& [an, ar] : ar_at_an(same, gts)) CHECK(ar == 1.0);
    for (const auto& [an, ar] : ar_at_an(std::vector<VideoProposal>{}, gts)) CHECK(ar == 0.0);

    const std::vector<GroundTruthInstance> one{gt("v", 1, 0, 10)};
    const std::vector<VideoProposal> short_one{{"v", Proposal({0, 9}, 0.5)}};
    const auto grid = default_tiou_grid();
    REQUIRE(grid.size() == 10);
    CHECK(grid.front() == 0.5);
    CHECK(grid.back() == 0.95);
    CHECK(ar_at_an(short_one, one).at(25) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(ar_at_an(short_one, one).at(25) == doctest::Approx(oracle::average_recall(short_one, one, 25, grid)));
  }

  TEST_CASE("metrics agree with exhaustive oracles on random instances") {
    std::mt19937_64 rng(4242);
    const auto grid = default_tiou_grid();
    const std::vector<int> ans{1, 2, 3, 25};
    for (int trial = 0; trial < 600; ++trial) {
      const auto in = testing::random_metric_instance(rng);

      const auto greedy = match_predictions(in.preds, in.gts, 1.0, MatchStrategy::Greedy);
      const auto expect = oracle::greedy_match(in.preds, in.gts, 1.0);
      REQUIRE(greedy.pred_to_gt.size() == expect.pred_to_gt.size());
      for (std::size_t p = 0; p < in.preds.size(); ++p)
        CHECK(greedy.pred_to_gt[p].value_or(static_cast<std::size_t>(-1)) == static_cast<std::size_t>(expect.pred_to_gt[p]));
      const auto f = challenge_f1(in.preds, in.gts);
      CHECK(std::abs(f.f1 - oracle::f1(expect.tp, in.preds.size(), in.gts.size())) <= 1e-9);

      const auto optimal = match_predictions(in.preds, in.gts, 1.0, MatchStrategy::Optimal);
      CHECK(optimal.true_positives == oracle::optimal_tp(in.preds, in.gts, 1.0));
      CHECK(optimal.true_positives >= greedy.true_positives);

      const auto q = miou_and_time_positive(in.preds, in.gts);
      const auto oq = oracle::miou(in.preds, in.gts);
      CHECK(std::abs(q.miou - oq.miou) <= 1e-9);
      CHECK(q.time_positive_count == oq.time_positive);
      CHECK(std::abs(q.time_positive_accuracy - oq.accuracy) <= 1e-9);

      const auto ar = ar_at_an(in.props, in.gts, ans, grid);
      double prev = 0.0;
      for (int an : ans) {
        CHECK(std::abs(ar.at(an) - oracle::average_recall(in.props, in.gts, an, grid)) <= 1e-9);
        CHECK(ar.at(an) >= prev);
        prev = ar.at(an);
      }
    }
  }

  TEST_CASE("reordering predictions with distinct scores does not change F1") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
      auto in = testing::random_metric_instance(rng);
      for (std::size_t i = 0; i < in.preds.size(); ++i) in.preds[i].score = 0.01 * static_cast<double>(i + 1);
      auto shuffled = in.preds;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(challenge_f1(in.preds, in.gts).f1 == challenge_f1(shuffled, in.gts).f1);
    }
  }

  TEST_CASE("common shifts change no metric") {
    std::mt19937_64 rng(78);
    for (int trial = 0; trial < 300; ++trial) {
      const auto in = testing::random_metric_instance(rng);
      auto preds = in.preds;
      auto gts = in.gts;
      auto props = in.props;
      for (auto& p : preds) p.interval = p.interval.shifted(37.5);
      for (auto& g : gts) g.interval = g.interval.shifted(37.5);
      for (auto& p : props) p.proposal.interval = p.proposal.interval.shifted(37.5);
      const auto a = evaluate(in.preds, in.gts, {}, std::span<const VideoProposal>(in.props));
      const auto b = evaluate(preds, gts, {}, std::span<const VideoProposal>(props));
      CHECK(a.f1 == b.f1);
      CHECK(std::abs(a.miou - b.miou) <= 1e-12);
      CHECK(a.time_positive_accuracy == b.time_positive_accuracy);
      CHECK(a.ar_at_an == b.ar_at_an);
    }
  }

  TEST_CASE("report invariants and per-class counts") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 200; ++trial) {
      const auto in = testing::random_metric_instance(rng);
      const auto r = evaluate(in.preds, in.gts);
      for (double v : {r.precision, r.recall, r.f1, r.miou, r.time_positive_accuracy}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      if (r.precision + r.recall > 0.0)
        CHECK(r.f1 == doctest::Approx(2 * r.precision * r.recall / (r.precision + r.recall)));
      std::size_t tp = 0, fp = 0, fn = 0;
      for (const auto& [c, b] : r.per_class) {
        tp += b.true_positives;
        fp += b.false_positives;
        fn += b.false_negatives;
      }
      CHECK(tp == r.true_positives);
      CHECK(tp + fp == in.preds.size());
      CHECK(tp + fn == in.gts.size());
      CHECK(r.ar_at_an.size() == 4);
    }
    const auto csv = format_report_csv(evaluate(std::vector<Prediction>{pred("v", 1, 0, 10)},
                                                std::vector<GroundTruthInstance>{gt("v", 1, 0, 10)}));
    CHECK(csv.find("f1,1\n") != std::string::npos);
    CHECK(csv.find("class,1,") != std::string::npos);
  }
}
