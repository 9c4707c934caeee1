#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "smoothrank/dataset.hpp"
#include "smoothrank/error.hpp"
#include "smoothrank/metrics.hpp"
#include "smoothrank/survival.hpp"
#include "synthetic.hpp"

using namespace smoothrank;

TEST_CASE("select_threshold: worked example with censoring") {
  const std::vector<SurvivalRecord> recs{{1, 1}, {2, 0}, {3, 1}, {4, 1}, {5, 0}};
  const ThresholdResult t = select_threshold(recs);
  CHECK(t.threshold == 3.0);
  CHECK(t.early == 2);
  CHECK(t.late == 2);
  CHECK(t.imbalance == 0);
  CHECK(t.excluded == std::vector<std::size_t>{1});

  const DerivedClasses d = derive_classes(recs, t.threshold);
  CHECK(d.kept_rows() == std::vector<std::size_t>{0, 2, 3, 4});
  CHECK(d.labels() == std::vector<int>{1, 1, 2, 2});
}

TEST_CASE("select_threshold: ties go to the smaller time") {
  const std::vector<SurvivalRecord> recs{{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}};
  const ThresholdResult t = select_threshold(recs);
  CHECK(t.threshold == 2.0);
  CHECK(t.imbalance == 1);
}

TEST_CASE("select_threshold: single event and no events") {
  const std::vector<SurvivalRecord> one{{3, 0}, {7, 1}, {9, 0}};
  CHECK(select_threshold(one).threshold == 7.0);
  const std::vector<SurvivalRecord> none{{3, 0}, {7, 0}};
  CHECK_THROWS_WITH_AS(select_threshold(none), "no failures observed", DataError);
}

TEST_CASE("select_threshold matches the exhaustive scan") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto recs = synthetic::survival_records(1 + rng() % 120, rng, 1 + static_cast<int>(rng() % 50));
    recs[0].event = 1;
    const ThresholdResult fast = select_threshold(recs);
    const oracle::Threshold slow = oracle::threshold_scan(recs);
    REQUIRE(fast.threshold == slow.time);
    REQUIRE(fast.early == slow.early);
    REQUIRE(fast.late == slow.late);
    REQUIRE(fast.imbalance == slow.h);
    CHECK(fast.early + fast.late + fast.excluded.size() == recs.size());
  }
}

TEST_CASE("derive_classes: boundary rules") {
  const double T = 5.0;
  const std::vector<SurvivalRecord> recs{{5, 1}, {5, 0}, {5.001, 0}, {9, 1}, {2, 1}};
  const DerivedClasses d = derive_classes(recs, T);
  CHECK(d.assignment[0] == DerivedClass::early_failure);
  CHECK(d.assignment[1] == DerivedClass::excluded);
  CHECK(d.assignment[2] == DerivedClass::no_early_failure);
  CHECK(d.assignment[3] == DerivedClass::no_early_failure);
  CHECK(d.assignment[4] == DerivedClass::early_failure);

  const std::vector<SurvivalRecord> all_early{{1, 1}, {2, 1}};
  CHECK_THROWS_WITH_AS(derive_classes(all_early, 2.0), "degenerate threshold", DataError);
}

TEST_CASE("derive_classes reproduces L and H") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto recs = synthetic::survival_records(20 + rng() % 100, rng);
    recs[0].event = 1;
    const ThresholdResult t = select_threshold(recs);
    DerivedClasses d;
    try {
      d = derive_classes(recs, t.threshold);
    } catch (const DataError&) {
      CHECK((t.early == 0 || t.late == 0));
      continue;
    }
    const auto labels = d.labels();
    CHECK(static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1)) == t.early);
    CHECK(static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 2)) == t.late);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (d.assignment[i] == DerivedClass::early_failure) {
        CHECK((recs[i].event == 1 && recs[i].time <= t.threshold));
      } else if (d.assignment[i] == DerivedClass::excluded) {
        CHECK((recs[i].event == 0 && recs[i].time <= t.threshold));
      } else {
        CHECK(recs[i].time > t.threshold);
      }
    }
  }
}

TEST_CASE("harrell_cindex: worked examples") {
  const std::vector<SurvivalRecord> recs{{1, 1}, {2, 1}, {3, 0}};
  CHECK(harrell_cindex(recs, std::vector<double>{0.9, 0.5, 0.7}) == doctest::Approx(2.0 / 3.0));

  // censored earlier time is not comparable
  const std::vector<SurvivalRecord> cens{{1, 0}, {2, 1}};
  CHECK_THROWS_AS(harrell_cindex(cens, std::vector<double>{0.1, 0.2}), DataError);

  std::vector<SurvivalRecord> full;
  std::vector<double> s;
  for (int i = 1; i <= 20; ++i) {
    full.push_back({static_cast<double>(i), 1});
    s.push_back(-std::log(i));
  }
  CHECK(harrell_cindex(full, s) == 1.0);
  CHECK(harrell_cindex(full, s, false) == 0.0);
}

TEST_CASE("harrell_cindex: missing scores are dropped and counted") {
  const std::vector<SurvivalRecord> recs{{1, 1}, {2, 1}, {3, 0}, {4, 1}};
  const ConcordanceResult c =
      harrell_counts(recs, std::vector<double>{0.9, kMissing, 0.7, 0.1});
  CHECK(c.dropped_missing == 1);
  CHECK(c.comparable == 2);  // (1,3), (1,4); 4 has the last time
  CHECK(c.value() == 1.0);
}

TEST_CASE("harrell_cindex: properties on random instances") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    auto recs = synthetic::survival_records(5 + rng() % 150, rng);
    recs[0] = {0.5, 1};
    std::vector<double> s(recs.size());
    for (double& v : s) v = normal(rng);
    const ConcordanceResult c = harrell_counts(recs, s);
    const oracle::Counts o = oracle::cindex_pairs(recs, s);
    REQUIRE(c.concordant_halves == o.halves);
    REQUIRE(c.comparable == o.pairs);
    CHECK(harrell_counts(recs, s, true, Execution::serial).concordant_halves == o.halves);

    // no ties in continuous scores: C(s) + C(-s) = 1
    std::vector<double> neg(s);
    for (double& v : neg) v = -v;
    CHECK(harrell_counts(recs, neg).concordant_halves + c.concordant_halves == 2 * c.comparable);

    std::vector<double> mono(s);
    for (double& v : mono) v = std::atan(v) * 5.0 + 1.0;
    CHECK(harrell_counts(recs, mono).concordant_halves == c.concordant_halves);
  }
}

TEST_CASE("harrell_cindex equals AUC for two uncensored time levels") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> level(0, 12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + rng() % 100;
    std::vector<SurvivalRecord> recs(n);
    std::vector<int> labels(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      const bool early = (rng() % 2) == 0 || i == 0;
      recs[i] = {early ? 1.0 : 2.0, 1};
      labels[i] = early ? 1 : 2;
      s[i] = level(rng);
    }
    recs[1] = {2.0, 1};
    labels[1] = 2;
    CHECK(harrell_cindex(recs, s) == auc(s, labels, 1));
  }
}
