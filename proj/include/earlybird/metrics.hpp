// Copyright 2026 Earlybird Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EARLYBIRD_METRICS_HPP
#define EARLYBIRD_METRICS_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "earlybird/error.hpp"
#include "earlybird/parallel.hpp"
#include "earlybird/stats.hpp"
#include "earlybird/trace.hpp"

namespace earlybird {

// A group has a laggard when (max - median) exceeds the threshold. The
// absolute 1 ms default is what the published measurements used; the
// relative mode expresses the same idea as a fraction of the group median.
struct LaggardThreshold {
  enum class Mode { Absolute, RelativeToMedian };
  Mode mode = Mode::Absolute;
  Nanoseconds absolute = 1'000'000;  // 1 ms
  double fraction = 0.05;

  static LaggardThreshold absolute_ns(Nanoseconds ns) {
    return {Mode::Absolute, ns, 0.0};
  }
  static LaggardThreshold relative(double fraction) {
    return {Mode::RelativeToMedian, 0, fraction};
  }
  std::string str() const {
    if (mode == Mode::Absolute) return std::to_string(to_ms(absolute)) + "ms";
    return std::to_string(fraction * 100.0) + "%";
  }
};

namespace detail {
inline double median_ns(std::span<const Nanoseconds> arrivals) {
  std::vector<double> v(arrivals.begin(), arrivals.end());
  std::sort(v.begin(), v.end());
  return percentile_sorted(v, 0.5);
}
}  // namespace detail

// Strict comparison: a group whose excess equals the threshold exactly is
// not a laggard group.
inline bool laggard_classify(std::span<const Nanoseconds> arrivals,
                             const LaggardThreshold& threshold = {}) {
  if (arrivals.size() < 2) {
    throw PreconditionError("laggard_classify needs at least 2 arrivals");
  }
  const double med = detail::median_ns(arrivals);
  const double max =
      static_cast<double>(*std::max_element(arrivals.begin(), arrivals.end()));
  const double excess = max - med;
  if (threshold.mode == LaggardThreshold::Mode::Absolute) {
    return excess > static_cast<double>(threshold.absolute);
  }
  return excess > threshold.fraction * med;
}

// Sum over threads of (latest arrival - arrival): the idle capacity a
// restructured application could reclaim. Integer-exact.
inline Nanoseconds reclaimable_time(std::span<const Nanoseconds> arrivals) {
  if (arrivals.empty()) throw PreconditionError("reclaimable_time of empty group");
  const Nanoseconds max = *std::max_element(arrivals.begin(), arrivals.end());
  Nanoseconds sum = 0;
  for (Nanoseconds a : arrivals) sum += max - a;
  return sum;
}

// reclaimable / (n * latest arrival); the fraction of the group's
// thread-time budget spent waiting. Zero when every thread arrives at 0.
inline double idle_ratio(std::span<const Nanoseconds> arrivals) {
  if (arrivals.empty()) throw PreconditionError("idle_ratio of empty group");
  const Nanoseconds max = *std::max_element(arrivals.begin(), arrivals.end());
  if (max == 0) return 0.0;
  return static_cast<double>(reclaimable_time(arrivals)) /
         (static_cast<double>(arrivals.size()) * static_cast<double>(max));
}

struct GroupMetrics {
  GroupKey key;
  std::size_t n = 0;
  double median = 0.0;       // ns; fractional for even groups
  Nanoseconds max = 0;       // ns
  bool laggard = false;
  Nanoseconds reclaimable = 0;  // ns
  double idle_ratio = 0.0;
};

inline GroupMetrics group_metrics(const Group& g,
                                  const LaggardThreshold& threshold = {}) {
  GroupMetrics m;
  m.key = g.key;
  m.n = g.arrivals.size();
  m.median = detail::median_ns(g.arrivals);
  m.max = *std::max_element(g.arrivals.begin(), g.arrivals.end());
  m.laggard = laggard_classify(g.arrivals, threshold);
  m.reclaimable = reclaimable_time(g.arrivals);
  m.idle_ratio = idle_ratio(g.arrivals);
  return m;
}

// Fraction of process-iteration groups classified as containing a laggard.
inline double laggard_fraction(const TraceDataset& ds,
                               const LaggardThreshold& threshold = {}) {
  const auto groups = group(ds, AggregationLevel::ProcessIteration);
  if (groups.empty()) throw PreconditionError("laggard_fraction on empty dataset");
  std::int64_t count = 0;
  for (const auto& g : groups) {
    if (laggard_classify(g.arrivals, threshold)) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(groups.size());
}

// Half-open iteration range [first, last).
struct SectionRange {
  int first = 0;
  int last = 0;
  std::string str() const {
    return std::to_string(first) + ".." + std::to_string(last);
  }
};

struct SectionStats {
  SectionRange range;
  std::int64_t n_groups = 0;
  double mean_median_ms = 0.0;
  double mean_iqr_ms = 0.0;
  double laggard_fraction = 0.0;
  double avg_reclaimable_ms = 0.0;
  double mean_idle_ratio = 0.0;
};

// Whole-run aggregates over process-iteration groups. mean_median_ms is the
// mean of group medians; global_median_ms is the median of all samples (the
// two readings of "mean median thread arrival time"). avg_reclaimable_ms
// averages per process-iteration group.
struct MetricsSummary {
  std::int64_t n_groups = 0;
  double mean_median_ms = 0.0;
  double global_median_ms = 0.0;
  double laggard_fraction = 0.0;
  double avg_reclaimable_ms = 0.0;
  double mean_idle_ratio = 0.0;
  std::string threshold;
  std::vector<SectionStats> sections;
};

inline MetricsSummary summarize(const TraceDataset& ds,
                                const LaggardThreshold& threshold = {},
                                std::vector<SectionRange> sections = {},
                                int jobs = 0) {
  const auto groups = group(ds, AggregationLevel::ProcessIteration);
  if (groups.empty()) throw PreconditionError("summarize on empty dataset");
  if (sections.empty()) sections.push_back({0, ds.shape.n_iterations});

  std::vector<GroupMetrics> per_group(groups.size());
  std::vector<double> per_group_iqr(groups.size());
  parallel_for(groups.size(), jobs, [&](std::size_t i) {
    per_group[i] = group_metrics(groups[i], threshold);
    std::vector<double> ms;
    ms.reserve(groups[i].arrivals.size());
    for (Nanoseconds v : groups[i].arrivals) ms.push_back(to_ms(v));
    per_group_iqr[i] = groups[i].arrivals.size() >= 4 ? iqr(ms) : 0.0;
  });

  MetricsSummary s;
  s.n_groups = static_cast<std::int64_t>(groups.size());
  s.threshold = threshold.str();
  double median_sum = 0.0, reclaim_sum = 0.0, idle_sum = 0.0;
  std::int64_t laggards = 0;
  for (const auto& m : per_group) {
    median_sum += m.median * 1e-6;
    reclaim_sum += to_ms(m.reclaimable);
    idle_sum += m.idle_ratio;
    if (m.laggard) ++laggards;
  }
  s.mean_median_ms = median_sum / static_cast<double>(groups.size());
  s.avg_reclaimable_ms = reclaim_sum / static_cast<double>(groups.size());
  s.mean_idle_ratio = idle_sum / static_cast<double>(groups.size());
  s.laggard_fraction =
      static_cast<double>(laggards) / static_cast<double>(groups.size());

  {
    std::vector<double> all_ms;
    all_ms.reserve(ds.samples.size());
    for (const auto& g : groups) {
      for (Nanoseconds v : g.arrivals) all_ms.push_back(to_ms(v));
    }
    s.global_median_ms = median(all_ms);
  }

  for (const auto& range : sections) {
    SectionStats sec;
    sec.range = range;
    double med = 0.0, iq = 0.0, rec = 0.0, idle = 0.0;
    std::int64_t lag = 0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const int iter = *groups[i].key.iteration;
      if (iter < range.first || iter >= range.last) continue;
      ++sec.n_groups;
      med += per_group[i].median * 1e-6;
      iq += per_group_iqr[i];
      rec += to_ms(per_group[i].reclaimable);
      idle += per_group[i].idle_ratio;
      if (per_group[i].laggard) ++lag;
    }
    if (sec.n_groups > 0) {
      const double k = static_cast<double>(sec.n_groups);
      sec.mean_median_ms = med / k;
      sec.mean_iqr_ms = iq / k;
      sec.avg_reclaimable_ms = rec / k;
      sec.mean_idle_ratio = idle / k;
      sec.laggard_fraction = static_cast<double>(lag) / k;
    }
    s.sections.push_back(sec);
  }
  return s;
}

}  // namespace earlybird

#endif  // EARLYBIRD_METRICS_HPP
