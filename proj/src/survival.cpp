#include "smoothrank/survival.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "smoothrank/error.hpp"

namespace smoothrank {

ThresholdResult select_threshold(std::span<const SurvivalRecord> records) {
  std::vector<double> all_times;
  std::vector<double> event_times;
  all_times.reserve(records.size());
  for (const auto& r : records) {
    all_times.push_back(r.time);
    if (r.event == 1) event_times.push_back(r.time);
  }
  if (event_times.empty()) throw DataError("no failures observed");
  std::sort(all_times.begin(), all_times.end());
  std::sort(event_times.begin(), event_times.end());

  ThresholdResult best;
  bool found = false;
  for (std::size_t i = 0; i < event_times.size(); ++i) {
    if (i > 0 && event_times[i] == event_times[i - 1]) continue;
    const double t = event_times[i];
    const auto early = static_cast<std::size_t>(
        std::upper_bound(event_times.begin(), event_times.end(), t) - event_times.begin());
    const auto late = static_cast<std::size_t>(
        all_times.end() - std::upper_bound(all_times.begin(), all_times.end(), t));
    const std::size_t h = early > late ? early - late : late - early;
    if (!found || h < best.imbalance) {
      best.threshold = t;
      best.early = early;
      best.late = late;
      best.imbalance = h;
      found = true;
    }
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].event == 0 && records[i].time <= best.threshold) best.excluded.push_back(i);
  }
  return best;
}

std::vector<std::size_t> DerivedClasses::kept_rows() const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != DerivedClass::excluded) rows.push_back(i);
  }
  return rows;
}

std::vector<int> DerivedClasses::labels() const {
  std::vector<int> out;
  for (auto c : assignment) {
    if (c == DerivedClass::early_failure) out.push_back(1);
    if (c == DerivedClass::no_early_failure) out.push_back(2);
  }
  return out;
}

DerivedClasses derive_classes(std::span<const SurvivalRecord> records, double threshold) {
  DerivedClasses d;
  d.assignment.reserve(records.size());
  std::size_t early = 0;
  std::size_t late = 0;
  for (const auto& r : records) {
    if (r.time > threshold) {
      d.assignment.push_back(DerivedClass::no_early_failure);
      ++late;
    } else if (r.event == 1) {
      d.assignment.push_back(DerivedClass::early_failure);
      ++early;
    } else {
      d.assignment.push_back(DerivedClass::excluded);
    }
  }
  if (early == 0 || late == 0) throw DataError("degenerate threshold");
  return d;
}

ConcordanceResult harrell_counts(std::span<const SurvivalRecord> records,
                                 std::span<const double> scores,
                                 bool higher_score_means_earlier_failure, Execution exec) {
  if (records.size() != scores.size()) {
    throw DataError("concordance: records and scores differ in length");
  }
  ConcordanceResult result;
  std::vector<SurvivalRecord> recs;
  std::vector<double> risk;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (std::isnan(scores[i])) {
      ++result.dropped_missing;
      continue;
    }
    recs.push_back(records[i]);
    risk.push_back(higher_score_means_earlier_failure ? scores[i] : -scores[i]);
  }

  const auto n = static_cast<std::ptrdiff_t>(recs.size());
  std::uint64_t halves = 0;
  std::uint64_t comparable = 0;
  auto row = [&](std::ptrdiff_t i, std::uint64_t& h, std::uint64_t& c) {
    if (recs[i].event != 1) return;
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      if (!(recs[i].time < recs[j].time)) continue;
      ++c;
      if (risk[i] > risk[j]) {
        h += 2;
      } else if (risk[i] == risk[j]) {
        h += 1;
      }
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : halves, comparable)
    for (std::ptrdiff_t i = 0; i < n; ++i) row(i, halves, comparable);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) row(i, halves, comparable);
  }
  if (comparable == 0) throw DataError("concordance: no comparable pairs");
  result.concordant_halves = halves;
  result.comparable = comparable;
  return result;
}

double harrell_cindex(std::span<const SurvivalRecord> records, std::span<const double> scores,
                      bool higher_score_means_earlier_failure, Execution exec) {
  return harrell_counts(records, scores, higher_score_means_earlier_failure, exec).value();
}

}  // namespace smoothrank
