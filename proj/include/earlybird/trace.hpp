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

#ifndef EARLYBIRD_TRACE_HPP
#define EARLYBIRD_TRACE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "earlybird/error.hpp"

namespace earlybird {

// All raw timestamps and derived durations are integer nanoseconds;
// conversion to floating-point milliseconds happens only at reporting
// boundaries.
using Nanoseconds = std::int64_t;

inline double to_ms(Nanoseconds ns) { return static_cast<double>(ns) * 1e-6; }
inline Nanoseconds ms_to_ns(double ms) {
  return static_cast<Nanoseconds>(std::llround(ms * 1e6));
}

// One thread's monotonic-clock readings at entry to and exit from a
// parallel region, for one (trial, process, iteration).
struct ThreadSample {
  int trial = 0;
  int process = 0;
  int iteration = 0;
  int thread = 0;
  Nanoseconds t_start = 0;
  Nanoseconds t_end = 0;

  std::tuple<int, int, int, int> key() const {
    return {trial, process, iteration, thread};
  }
  friend bool operator==(const ThreadSample&, const ThreadSample&) = default;
};

inline std::string key_string(const ThreadSample& s) {
  return "(" + std::to_string(s.trial) + "," + std::to_string(s.process) +
         "," + std::to_string(s.iteration) + "," + std::to_string(s.thread) +
         ")";
}

// Elapsed nanoseconds in the parallel region. Region entry is barrier
// synchronized per process, so this doubles as the thread's arrival offset
// within its group; the subtraction cancels the shared clock base, making
// values comparable across cores.
inline Nanoseconds compute_time(const ThreadSample& s) {
  if (s.t_end < s.t_start) {
    throw PreconditionError("t_end < t_start for sample " + key_string(s));
  }
  return s.t_end - s.t_start;
}

struct DatasetShape {
  int n_trials = 0;
  int n_processes = 0;
  int n_iterations = 0;
  int n_threads = 0;

  std::int64_t total_samples() const {
    return std::int64_t{1} * n_trials * n_processes * n_iterations * n_threads;
  }
  bool valid() const {
    return n_trials >= 1 && n_processes >= 1 && n_iterations >= 1 &&
           n_threads >= 1;
  }
  friend bool operator==(const DatasetShape&, const DatasetShape&) = default;
};

enum class AggregationLevel { Application, ApplicationIteration, ProcessIteration };

inline const char* level_name(AggregationLevel level) {
  switch (level) {
    case AggregationLevel::Application: return "application";
    case AggregationLevel::ApplicationIteration: return "application-iteration";
    case AggregationLevel::ProcessIteration: return "process-iteration";
  }
  return "?";
}

// Identifies one aggregation group. Components absent at coarser levels.
struct GroupKey {
  AggregationLevel level = AggregationLevel::Application;
  std::optional<int> trial;
  std::optional<int> process;
  std::optional<int> iteration;

  // Dotted form used in report rows: "all", "i12", "t3.p5.i17".
  std::string str() const {
    switch (level) {
      case AggregationLevel::Application:
        return "all";
      case AggregationLevel::ApplicationIteration:
        return "i" + std::to_string(*iteration);
      case AggregationLevel::ProcessIteration:
        return "t" + std::to_string(*trial) + ".p" + std::to_string(*process) +
               ".i" + std::to_string(*iteration);
    }
    return "?";
  }
  friend bool operator==(const GroupKey&, const GroupKey&) = default;
};

struct TraceDataset {
  DatasetShape shape;
  std::vector<ThreadSample> samples;  // canonical order once validated
  std::vector<std::pair<std::string, std::string>> metadata;
};

struct ValidationReport {
  std::vector<std::tuple<int, int, int, int>> missing;
  std::vector<std::tuple<int, int, int, int>> duplicates;
  std::vector<std::tuple<int, int, int, int>> ordering_violations;  // t_end < t_start
  std::vector<std::tuple<int, int, int, int>> out_of_range;  // index beyond shape
  bool shape_ok = true;

  bool clean() const {
    return shape_ok && missing.empty() && duplicates.empty() &&
           ordering_violations.empty() && out_of_range.empty();
  }
};

namespace detail {
inline bool canonical_less(const ThreadSample& a, const ThreadSample& b) {
  return a.key() < b.key();
}
}  // namespace detail

// Sorts samples into canonical (trial, process, iteration, thread) order.
inline void canonicalize(TraceDataset& ds) {
  std::stable_sort(ds.samples.begin(), ds.samples.end(),
                   detail::canonical_less);
}

// Checks completeness, uniqueness and timestamp ordering against the
// declared shape. Returns a structured report rather than throwing; the
// dataset is usable downstream only if the report is clean.
inline ValidationReport validate(const TraceDataset& ds) {
  ValidationReport report;
  report.shape_ok = ds.shape.valid();
  if (!report.shape_ok) return report;

  std::vector<ThreadSample> sorted = ds.samples;
  std::sort(sorted.begin(), sorted.end(), detail::canonical_less);

  for (const auto& s : sorted) {
    if (s.trial < 0 || s.trial >= ds.shape.n_trials || s.process < 0 ||
        s.process >= ds.shape.n_processes || s.iteration < 0 ||
        s.iteration >= ds.shape.n_iterations || s.thread < 0 ||
        s.thread >= ds.shape.n_threads) {
      report.out_of_range.push_back(s.key());
    }
    if (s.t_end < s.t_start) report.ordering_violations.push_back(s.key());
  }
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].key() == sorted[i - 1].key()) {
      if (report.duplicates.empty() ||
          report.duplicates.back() != sorted[i].key()) {
        report.duplicates.push_back(sorted[i].key());
      }
    }
  }

  // Walk the expected lattice against the sorted present keys.
  std::size_t pos = 0;
  for (int t = 0; t < ds.shape.n_trials; ++t) {
    for (int p = 0; p < ds.shape.n_processes; ++p) {
      for (int i = 0; i < ds.shape.n_iterations; ++i) {
        for (int th = 0; th < ds.shape.n_threads; ++th) {
          const std::tuple<int, int, int, int> want{t, p, i, th};
          while (pos < sorted.size() && sorted[pos].key() < want) ++pos;
          if (pos >= sorted.size() || sorted[pos].key() != want) {
            report.missing.push_back(want);
          }
        }
      }
    }
  }
  return report;
}

// Keeps only process-iterations that are complete (all threads present,
// no duplicates, no ordering violations). Used by --allow-partial; the
// result carries a "partial" metadata marker. Group-size-sensitive
// statistics stay meaningful because every surviving group has exactly
// n_threads samples.
inline TraceDataset complete_subset(const TraceDataset& ds) {
  TraceDataset out;
  out.shape = ds.shape;
  out.metadata = ds.metadata;
  out.metadata.emplace_back("partial", "true");

  std::vector<ThreadSample> sorted = ds.samples;
  std::sort(sorted.begin(), sorted.end(), detail::canonical_less);

  std::size_t i = 0;
  while (i < sorted.size()) {
    const auto& first = sorted[i];
    std::size_t j = i;
    bool good = true;
    int expect_thread = 0;
    while (j < sorted.size() && sorted[j].trial == first.trial &&
           sorted[j].process == first.process &&
           sorted[j].iteration == first.iteration) {
      const auto& s = sorted[j];
      if (s.thread != expect_thread || s.t_end < s.t_start || s.trial < 0 ||
          s.trial >= ds.shape.n_trials || s.process < 0 ||
          s.process >= ds.shape.n_processes || s.iteration < 0 ||
          s.iteration >= ds.shape.n_iterations) {
        good = false;
      }
      ++expect_thread;
      ++j;
    }
    if (good && expect_thread == ds.shape.n_threads) {
      out.samples.insert(out.samples.end(), sorted.begin() + i,
                         sorted.begin() + j);
    }
    i = j;
  }
  return out;
}

struct Group {
  GroupKey key;
  std::vector<Nanoseconds> arrivals;  // compute times, canonical member order
};

// Partitions the dataset's compute times at the given aggregation level.
// Groups are ordered by key; members keep canonical dataset order, which
// restricted to a group is (trial, process, thread) order.
inline std::vector<Group> group(const TraceDataset& ds,
                                AggregationLevel level) {
  std::vector<ThreadSample> sorted = ds.samples;
  std::sort(sorted.begin(), sorted.end(), detail::canonical_less);

  std::vector<Group> groups;
  switch (level) {
    case AggregationLevel::Application: {
      Group g;
      g.key = GroupKey{level, {}, {}, {}};
      g.arrivals.reserve(sorted.size());
      for (const auto& s : sorted) g.arrivals.push_back(compute_time(s));
      groups.push_back(std::move(g));
      break;
    }
    case AggregationLevel::ApplicationIteration: {
      // iteration is not the fastest-varying canonical component, so bucket.
      std::vector<std::vector<Nanoseconds>> buckets(ds.shape.n_iterations);
      for (const auto& s : sorted) {
        buckets.at(s.iteration).push_back(compute_time(s));
      }
      for (int i = 0; i < ds.shape.n_iterations; ++i) {
        if (buckets[i].empty()) continue;  // absent in a partial dataset
        Group g;
        g.key = GroupKey{level, {}, {}, i};
        g.arrivals = std::move(buckets[i]);
        groups.push_back(std::move(g));
      }
      break;
    }
    case AggregationLevel::ProcessIteration: {
      std::size_t i = 0;
      while (i < sorted.size()) {
        const auto& first = sorted[i];
        Group g;
        g.key = GroupKey{level, first.trial, first.process, first.iteration};
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].trial == first.trial &&
               sorted[j].process == first.process &&
               sorted[j].iteration == first.iteration) {
          g.arrivals.push_back(compute_time(sorted[j]));
          ++j;
        }
        groups.push_back(std::move(g));
        i = j;
      }
      break;
    }
  }
  return groups;
}

// Expected group count / group size for a complete dataset.
inline std::pair<std::int64_t, std::int64_t> expected_grouping(
    const DatasetShape& s, AggregationLevel level) {
  switch (level) {
    case AggregationLevel::Application:
      return {1, s.total_samples()};
    case AggregationLevel::ApplicationIteration:
      return {s.n_iterations,
              std::int64_t{1} * s.n_trials * s.n_processes * s.n_threads};
    case AggregationLevel::ProcessIteration:
      return {std::int64_t{1} * s.n_trials * s.n_processes * s.n_iterations,
              s.n_threads};
  }
  return {0, 0};
}

}  // namespace earlybird

#endif  // EARLYBIRD_TRACE_HPP
