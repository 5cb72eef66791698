#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "actloc/proposals.hpp"
#include "oracles.hpp"

using namespace actloc;

namespace {

GeneratorConfig method(NmsMethod m) {
  GeneratorConfig cfg;
  cfg.nms_method = m;
  return cfg;
}

std::vector<double> step_function(std::size_t n, double step, double on, double off) {
  std::vector<double> a(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) * step;
    if (mid > on && mid < off) a[i] = 1.0;
  }
  return a;
}

std::vector<Proposal> random_proposals(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Proposal> out;
  for (int i = 0; i < n; ++i) {
    const double s = std::round(u(rng) * 200.0) / 2.0;
    const double len = 1.0 + std::round(u(rng) * 40.0) / 2.0;
    out.emplace_back(TimeInterval(s, s + len), u(rng));
  }
  return out;
}

const Proposal* find_same_interval(const std::vector<Proposal>& list, const TimeInterval& iv) {
  for (const auto& p : list)
    if (p.interval == iv) return &p;
  return nullptr;
}

}  // namespace

TEST_SUITE("proposals") {
  TEST_CASE("config validation") {
    GeneratorConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.window_lengths = {};
    CHECK_THROWS_AS(cfg.validate(), InvariantError);
    cfg = {};
    cfg.window_stride = 0;
    CHECK_THROWS_AS(cfg.validate(), InvariantError);
    cfg = {};
    cfg.nms_threshold = 1.5;
    CHECK_THROWS_AS(cfg.validate(), InvariantError);
    cfg = {};
    cfg.max_proposals = 0;
    CHECK_THROWS_AS(cfg.validate(), InvariantError);
    CHECK(parse_nms_method("gaussian") == NmsMethod::SoftGaussian);
    CHECK_THROWS_AS(parse_nms_method("fuzzy"), InvariantError);
  }

  TEST_CASE("profile integrates fractional snippets") {
    const std::vector<double> a{0.0, 1.0, 0.5, 1.0};
    const ActionnessProfile p(a, 0.5);
    CHECK(p.duration() == 2.0);
    CHECK(p.integral(0.0, 2.0) == doctest::Approx(1.25));
    CHECK(p.mean(0.25, 0.75) == doctest::Approx(0.5));
    CHECK(p.integral(1.75, 3.0) == doctest::Approx(0.25));
    for (double s = 0.0; s < 2.0; s += 0.13)
      for (double e = s + 0.1; e < 2.5; e += 0.17)
        CHECK(p.mean(s, e) == doctest::Approx(oracle::window_mean(a, 0.5, s, e)).epsilon(1e-12));
  }

  TEST_CASE("all-zero actionness yields no candidates") {
    const std::vector<double> a(100, 0.0);
    CHECK(generate_candidates(ActionnessProfile(a, 1.0), GeneratorConfig{}).empty());
  }

  TEST_CASE("all-one actionness with one window length and stride equal to it") {
    GeneratorConfig cfg;
    cfg.window_lengths = {10.0};
    cfg.window_stride = 10.0;
    const std::vector<double> a(20, 1.0);
    const auto c = generate_candidates(ActionnessProfile(a, 1.0), cfg);
    REQUIRE(c.size() == 2);
    CHECK(c[0].interval == TimeInterval(0, 10));
    CHECK(c[1].interval == TimeInterval(10, 20));
    CHECK(c[0].p_score == 1.0);
    CHECK(c[1].p_score == 1.0);
  }

  TEST_CASE("step-function top candidate matches brute-force window enumeration") {
    GeneratorConfig cfg;
    cfg.window_lengths = {20.0};
    cfg.window_stride = 2.0;
    const auto a = step_function(200, 1.0, 100.0, 120.0);
    const auto c = generate_candidates(ActionnessProfile(a, 1.0), cfg);
    REQUIRE_FALSE(c.empty());
    double best = -1.0;
    for (double s = 0.0; s < 200.0; s += 2.0) best = std::max(best, oracle::window_mean(a, 1.0, s, std::min(s + 20, 200.0)));
    CHECK(c[0].p_score == doctest::Approx(best).epsilon(1e-12));
    CHECK(std::abs(c[0].interval.start() - 100.0) <= 2.0);
    CHECK(std::abs(c[0].interval.end() - 120.0) <= 2.0);
  }

  TEST_CASE("every candidate is a floor-passing window with the brute-force mean") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> a(80);
    for (double& x : a) x = u(rng);
    GeneratorConfig cfg;
    cfg.window_lengths = {10.0, 15.0};
    cfg.window_stride = 3.0;
    const auto c = generate_candidates(ActionnessProfile(a, 0.5), cfg);
    std::size_t expected = 0;
    for (double len : cfg.window_lengths)
      for (double s = 0.0; s < 40.0; s += 3.0)
        if (oracle::window_mean(a, 0.5, s, std::min(s + len, 40.0)) >= 0.3) ++expected;
    CHECK(c.size() <= expected);
    for (const auto& p : c) {
      CHECK(p.p_score >= 0.3);
      CHECK(p.interval.end() <= 40.0);
      CHECK(p.p_score == doctest::Approx(oracle::window_mean(a, 0.5, p.interval.start(), p.interval.end())).epsilon(1e-12));
    }
    CHECK(std::is_sorted(c.begin(), c.end(), proposal_rank_less));
  }

  TEST_CASE("refinement snaps a coarse window onto a clean step edge") {
    const auto a = step_function(400, 0.5, 101.0, 117.0);
    const ActionnessProfile profile(a, 0.5);
    GeneratorConfig cfg;
    const auto refined = refine_candidates(profile, generate_candidates(profile, cfg), cfg);
    REQUIRE_FALSE(refined.empty());
    const auto top = *std::min_element(refined.begin(), refined.end(), proposal_rank_less);
    CHECK(top.interval == TimeInterval(101.0, 117.0));
    CHECK(top.p_score == doctest::Approx(1.0));
    for (std::size_t i = 0; i < refined.size(); ++i)
      for (std::size_t j = i + 1; j < refined.size(); ++j) CHECK_FALSE(refined[i].interval == refined[j].interval);
  }

  TEST_CASE("soft-NMS examples") {
    const Proposal single({5, 20}, 0.7);
    for (auto m : {NmsMethod::Hard, NmsMethod::SoftLinear, NmsMethod::SoftGaussian})
      CHECK(soft_nms({single}, method(m)) == std::vector<Proposal>{single});

    const std::vector<Proposal> twins{Proposal({0, 10}, 0.8), Proposal({0, 10}, 0.9)};
    const auto hard = soft_nms(twins, method(NmsMethod::Hard));
    REQUIRE(hard.size() == 1);
    CHECK(hard[0].p_score == 0.9);

    const auto gauss = soft_nms(twins, method(NmsMethod::SoftGaussian));
    REQUIRE(gauss.size() == 2);
    CHECK(gauss[0].p_score == 0.9);
    CHECK(gauss[1].p_score == doctest::Approx(0.1083).epsilon(1e-4 / 0.1083));
    CHECK(std::abs(gauss[1].p_score - 0.8 * std::exp(-1.0 / 0.5)) <= 1e-15);

    // Linear decay with tIoU 1/3 > 0.1.
    const auto lin = soft_nms({Proposal({0, 10}, 0.9), Proposal({5, 15}, 0.6)}, method(NmsMethod::SoftLinear));
    REQUIRE(lin.size() == 2);
    CHECK(lin[1].p_score == doctest::Approx(0.6 * (1.0 - 1.0 / 3.0)));
    // Below the threshold nothing decays.
    const auto below = soft_nms({Proposal({0, 10}, 0.9), Proposal({9.5, 20}, 0.6)}, method(NmsMethod::SoftLinear));
    CHECK(below[1].p_score == 0.6);
  }

  TEST_CASE("soft-NMS properties on random inputs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
      const auto in = random_proposals(rng, 1 + static_cast<int>(rng() % 40));
      for (auto m : {NmsMethod::Hard, NmsMethod::SoftLinear, NmsMethod::SoftGaussian}) {
        auto cfg = method(m);
        cfg.max_proposals = 1 + rng() % 30;
        const auto out = soft_nms(in, cfg);
        const auto top = *std::min_element(in.begin(), in.end(), proposal_rank_less);
        REQUIRE_FALSE(out.empty());
        CHECK(out[0] == top);
        CHECK(out.size() <= cfg.max_proposals);
        CHECK(std::is_sorted(out.begin(), out.end(), proposal_rank_less));
        for (const auto& p : out) {
          double original = -1.0;
          for (const auto& q : in)
            if (q.interval == p.interval) original = std::max(original, q.p_score);
          CHECK(p.p_score <= original);
          if (p.p_score < original) CHECK(p.p_score >= kNmsDiscardFloor);
        }
        CHECK(soft_nms(in, cfg) == out);
      }
    }
  }

  TEST_CASE("disjoint inputs are a fixed point up to order and truncation") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Proposal> in;
      for (int i = 0; i < 20; ++i) in.emplace_back(TimeInterval(i * 10.0, i * 10.0 + 5.0 + (trial % 5)), u(rng));
      std::shuffle(in.begin(), in.end(), rng);
      auto sorted = in;
      std::sort(sorted.begin(), sorted.end(), proposal_rank_less);
      for (auto m : {NmsMethod::Hard, NmsMethod::SoftLinear, NmsMethod::SoftGaussian}) {
        auto cfg = method(m);
        CHECK(soft_nms(in, cfg) == sorted);
        cfg.max_proposals = 7;
        CHECK(soft_nms(in, cfg) == std::vector<Proposal>(sorted.begin(), sorted.begin() + 7));
      }
    }
  }

  TEST_CASE("only decay triggers the discard floor") {
    const std::vector<Proposal> in{Proposal({0, 10}, 0.9), Proposal({20, 30}, 5e-5), Proposal({0, 10}, 2e-4)};
    const auto out = soft_nms(in, method(NmsMethod::SoftLinear));
    REQUIRE(out.size() == 2);
    CHECK(out[1].interval == TimeInterval(20, 30));
    CHECK(out[1].p_score == 5e-5);
  }

  TEST_CASE("equal scores rank by earlier start then shorter length") {
    const std::vector<Proposal> in{Proposal({50, 60}, 0.5), Proposal({10, 30}, 0.5), Proposal({10, 20}, 0.5)};
    const auto out = soft_nms(in, method(NmsMethod::SoftGaussian));
    REQUIRE(out.size() == 3);
    CHECK(out[0].interval == TimeInterval(10, 20));
    CHECK(find_same_interval(out, TimeInterval(50, 60))->p_score == 0.5);
  }
}
