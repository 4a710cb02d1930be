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

#ifndef EARLYBIRD_STATS_HPP
#define EARLYBIRD_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "earlybird/error.hpp"
#include "earlybird/trace.hpp"

namespace earlybird {

// Quantile by linear interpolation between order statistics at rank
// h = (n-1)p (the "type 7" rule). The single source of truth for every
// median/percentile/IQR in the toolkit.
inline double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw PreconditionError("percentile of empty sample");
  if (p < 0.0 || p > 1.0) throw PreconditionError("percentile p outside [0,1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline std::vector<double> percentiles(std::span<const double> samples,
                                       std::span<const double> ps) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(ps.size());
  for (double p : ps) out.push_back(percentile_sorted(sorted, p));
  return out;
}

inline double median(std::span<const double> samples) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return percentile_sorted(sorted, 0.5);
}

// p75 - p25 of a group.
inline double iqr(std::span<const double> samples) {
  if (samples.size() < 4) throw PreconditionError("iqr needs at least 4 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return percentile_sorted(sorted, 0.75) - percentile_sorted(sorted, 0.25);
}

struct IqrSeries {
  double mean = 0.0;
  double max = 0.0;
  std::int64_t n_groups = 0;
};

// Mean and max of per-group IQRs at the given aggregation level, in the
// same unit as the arrivals (nanoseconds).
inline IqrSeries iqr_series(const TraceDataset& ds, AggregationLevel level) {
  IqrSeries series;
  double sum = 0.0;
  for (const auto& g : group(ds, level)) {
    std::vector<double> vals(g.arrivals.begin(), g.arrivals.end());
    const double v = iqr(vals);
    sum += v;
    series.max = std::max(series.max, v);
    ++series.n_groups;
  }
  if (series.n_groups == 0) throw PreconditionError("iqr_series on empty dataset");
  series.mean = sum / static_cast<double>(series.n_groups);
  return series;
}

struct HistogramSpec {
  Nanoseconds bin_width = 0;
  Nanoseconds origin = 0;
};

struct HistogramBin {
  Nanoseconds lower = 0;  // bin covers [lower, lower + width)
  std::uint64_t count = 0;
};

struct Histogram {
  HistogramSpec spec;
  std::vector<HistogramBin> bins;  // contiguous; leading/trailing empties trimmed
  std::uint64_t total = 0;
};

inline Histogram histogram(std::span<const Nanoseconds> samples,
                           const HistogramSpec& spec) {
  if (spec.bin_width <= 0) throw PreconditionError("histogram bin width must be positive");
  Histogram h;
  h.spec = spec;
  h.total = samples.size();
  if (samples.empty()) return h;

  auto index_of = [&](Nanoseconds v) {
    Nanoseconds off = v - spec.origin;
    // floor division; arrivals may in principle sit below the origin
    Nanoseconds idx = off / spec.bin_width;
    if (off < 0 && off % spec.bin_width != 0) --idx;
    return idx;
  };
  Nanoseconds lo = index_of(samples[0]);
  Nanoseconds hi = lo;
  for (Nanoseconds v : samples) {
    const Nanoseconds i = index_of(v);
    lo = std::min(lo, i);
    hi = std::max(hi, i);
  }
  h.bins.resize(static_cast<std::size_t>(hi - lo + 1));
  for (std::size_t i = 0; i < h.bins.size(); ++i) {
    h.bins[i].lower = spec.origin + (lo + static_cast<Nanoseconds>(i)) * spec.bin_width;
  }
  for (Nanoseconds v : samples) {
    ++h.bins[static_cast<std::size_t>(index_of(v) - lo)].count;
  }
  return h;
}

}  // namespace earlybird

#endif  // EARLYBIRD_STATS_HPP
