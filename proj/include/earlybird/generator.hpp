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

#ifndef EARLYBIRD_GENERATOR_HPP
#define EARLYBIRD_GENERATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "earlybird/detail/math.hpp"
#include "earlybird/error.hpp"
#include "earlybird/stats.hpp"
#include "earlybird/trace.hpp"

namespace earlybird {

// The three arrival-distribution classes observed in practice: a tight
// symmetric mode, a tight mode with occasional late outliers, and a wide
// normal spread.
enum class DistributionClass { TightUnimodal, Laggard, WideNormal };

inline const char* class_name(DistributionClass c) {
  switch (c) {
    case DistributionClass::TightUnimodal: return "tight-unimodal";
    case DistributionClass::Laggard: return "laggard";
    case DistributionClass::WideNormal: return "wide-normal";
  }
  return "?";
}

// IQR of a normal distribution is 2 * 0.674490 * sigma.
inline constexpr double kIqrPerSigma = 2.0 * 0.674490;

struct GeneratorProfile {
  DistributionClass cls = DistributionClass::TightUnimodal;
  double median_ms = 1.0;
  double iqr_ms = 0.0;
  double laggard_prob = 0.0;           // Laggard class only
  double laggard_excess_min_ms = 0.0;  // uniform excess over the median
  double laggard_excess_max_ms = 0.0;
  std::uint64_t seed = 0;
  double floor_ms = -1.0;  // clamp for drawn durations; <0 means median/10
  bool degenerate = false; // set by fit_profile on all-equal input

  double sigma_ms() const { return iqr_ms / kIqrPerSigma; }
  double effective_floor_ms() const {
    return floor_ms > 0.0 ? floor_ms : median_ms / 10.0;
  }
};

inline void validate_profile(const GeneratorProfile& p) {
  if (!(p.median_ms > 0.0)) throw PreconditionError("profile median must be positive");
  if (p.iqr_ms < 0.0) throw PreconditionError("profile iqr must be nonnegative");
  if (p.laggard_prob < 0.0 || p.laggard_prob > 1.0) {
    throw PreconditionError("laggard probability outside [0,1]");
  }
  if (p.cls != DistributionClass::Laggard && p.laggard_prob != 0.0) {
    throw PreconditionError("laggard probability must be 0 outside the laggard class");
  }
  if (p.laggard_excess_min_ms < 0.0 ||
      p.laggard_excess_min_ms > p.laggard_excess_max_ms) {
    throw PreconditionError("laggard excess range must satisfy 0 <= min <= max");
  }
  if (p.effective_floor_ms() <= 0.0) throw PreconditionError("clamp floor must be positive");
}

namespace detail {

// One process-iteration worth of durations. Each group consumes its own
// RNG stream derived from (seed, trial, process, iteration), so generation
// is pure per group and safe to parallelize.
inline void draw_group(const GeneratorProfile& p, int trial, int process,
                       int iteration, int n_threads,
                       std::vector<Nanoseconds>& out) {
  std::mt19937_64 eng(mix_seed(p.seed, static_cast<std::uint64_t>(trial),
                               static_cast<std::uint64_t>(process),
                               static_cast<std::uint64_t>(iteration)));
  const double sigma = p.sigma_ms();
  const double floor_ms = p.effective_floor_ms();
  out.resize(static_cast<std::size_t>(n_threads));
  for (auto& d : out) {
    const double u = to_unit_open(eng());
    const double ms = std::max(p.median_ms + sigma * normal_quantile(u), floor_ms);
    d = ms_to_ns(ms);
  }
  if (p.cls == DistributionClass::Laggard && p.laggard_prob > 0.0) {
    const double u_decide = to_unit_open(eng());
    const double u_excess = to_unit_open(eng());  // drawn regardless, keeps streams aligned
    if (u_decide < p.laggard_prob) {
      const double excess =
          p.laggard_excess_min_ms +
          (p.laggard_excess_max_ms - p.laggard_excess_min_ms) * u_excess;
      auto it = std::max_element(out.begin(), out.end());
      *it = ms_to_ns(p.median_ms + excess);
    }
  }
}

}  // namespace detail

// A profile applied to a half-open iteration range [first, last); last < 0
// means "to the end of the dataset". Models applications whose arrival
// behavior changes over the run.
struct PhaseSpec {
  GeneratorProfile profile;
  int first_iteration = 0;
  int last_iteration = -1;
};

// Synthesizes a complete dataset. Region-entry timestamps get a distinct
// per-group base so that traces look like real monotonic clock readings;
// all derived statistics depend only on durations.
inline TraceDataset generate_phases(const std::vector<PhaseSpec>& phases,
                                    const DatasetShape& shape) {
  if (!shape.valid()) throw PreconditionError("invalid dataset shape");
  if (phases.empty()) throw PreconditionError("at least one phase required");
  for (const auto& ph : phases) validate_profile(ph.profile);

  auto phase_for = [&](int iteration) -> const GeneratorProfile& {
    for (const auto& ph : phases) {
      const int last = ph.last_iteration < 0 ? shape.n_iterations : ph.last_iteration;
      if (iteration >= ph.first_iteration && iteration < last) return ph.profile;
    }
    throw PreconditionError("iteration " + std::to_string(iteration) +
                            " not covered by any phase");
  };

  TraceDataset ds;
  ds.shape = shape;
  ds.samples.reserve(static_cast<std::size_t>(shape.total_samples()));
  std::vector<Nanoseconds> durations;
  for (int t = 0; t < shape.n_trials; ++t) {
    for (int p = 0; p < shape.n_processes; ++p) {
      for (int i = 0; i < shape.n_iterations; ++i) {
        detail::draw_group(phase_for(i), t, p, i, shape.n_threads, durations);
        const Nanoseconds base =
            1'000'000'000LL +
            50'000'000LL * (static_cast<Nanoseconds>(i) +
                            static_cast<Nanoseconds>(shape.n_iterations) *
                                (p + static_cast<Nanoseconds>(shape.n_processes) * t));
        for (int th = 0; th < shape.n_threads; ++th) {
          ds.samples.push_back(ThreadSample{
              t, p, i, th, base, base + durations[static_cast<std::size_t>(th)]});
        }
      }
    }
  }
  return ds;
}

inline TraceDataset generate(const GeneratorProfile& profile,
                             const DatasetShape& shape) {
  return generate_phases({PhaseSpec{profile, 0, -1}}, shape);
}

// Recovers a profile from data: median of per-group medians, mean per-group
// IQR, and (for the laggard class) the measured laggard frequency and excess
// bounds under the default 1 ms rule. All-equal datasets yield a flagged
// degenerate profile.
inline GeneratorProfile fit_profile(const TraceDataset& ds,
                                    DistributionClass cls,
                                    double laggard_threshold_ms = 1.0) {
  const auto groups = group(ds, AggregationLevel::ProcessIteration);
  if (groups.empty()) throw PreconditionError("fit_profile on empty dataset");

  GeneratorProfile p;
  p.cls = cls;

  std::vector<double> medians;
  medians.reserve(groups.size());
  double iqr_sum = 0.0;
  std::int64_t laggard_count = 0;
  double excess_min = 0.0, excess_max = 0.0;
  bool any_spread = false;

  for (const auto& g : groups) {
    std::vector<double> ms;
    ms.reserve(g.arrivals.size());
    for (Nanoseconds v : g.arrivals) ms.push_back(to_ms(v));
    std::sort(ms.begin(), ms.end());
    const double med = percentile_sorted(ms, 0.5);
    medians.push_back(med);
    iqr_sum += percentile_sorted(ms, 0.75) - percentile_sorted(ms, 0.25);
    if (ms.back() > ms.front()) any_spread = true;
    const double excess = ms.back() - med;
    if (excess > laggard_threshold_ms) {
      if (laggard_count == 0) {
        excess_min = excess_max = excess;
      } else {
        excess_min = std::min(excess_min, excess);
        excess_max = std::max(excess_max, excess);
      }
      ++laggard_count;
    }
  }

  p.median_ms = median(medians);
  if (!any_spread) {
    p.degenerate = true;
    p.iqr_ms = 0.0;
    p.laggard_prob = 0.0;
    return p;
  }
  p.iqr_ms = iqr_sum / static_cast<double>(groups.size());
  if (cls == DistributionClass::Laggard) {
    p.laggard_prob =
        static_cast<double>(laggard_count) / static_cast<double>(groups.size());
    p.laggard_excess_min_ms = excess_min;
    p.laggard_excess_max_ms = excess_max;
  }
  return p;
}

// Built-in profiles reproducing the published per-application statistics of
// the three instrumented proxy workloads, so paper-shaped analyses can be
// rerun without cluster access. Tuned against the metrics pipeline:
//  * minife-like: tight mode at 26.30 ms, laggards (excess 1-5 ms) in 22.4%
//    of process-iterations.
//  * minimd-like: two phases — a wider warmup over the first nineteen
//    iterations, then a very tight mode at 24.74 ms with rare high-magnitude
//    laggards (4.8% overall).
//  * miniqmc-like: wide normal spread around 60.91 ms sized so that roughly
//    half of each group's thread-time budget is idle (mean idle ratio 0.50).
inline std::vector<PhaseSpec> named_profile(const std::string& name,
                                            std::uint64_t seed) {
  auto make = [&](DistributionClass cls, double median, double iqr, double prob,
                  double lo, double hi) {
    GeneratorProfile p;
    p.cls = cls;
    p.median_ms = median;
    p.iqr_ms = iqr;
    p.laggard_prob = prob;
    p.laggard_excess_min_ms = lo;
    p.laggard_excess_max_ms = hi;
    p.seed = seed;
    return p;
  };
  if (name == "minife-like") {
    return {PhaseSpec{make(DistributionClass::Laggard, 26.30, 0.18, 0.224, 1.0, 5.0), 0, -1}};
  }
  if (name == "minimd-like") {
    return {PhaseSpec{make(DistributionClass::TightUnimodal, 25.5, 0.35, 0.0, 0.0, 0.0), 0, 19},
            PhaseSpec{make(DistributionClass::Laggard, 24.74, 0.15, 0.053, 1.5, 7.5), 19, -1}};
  }
  if (name == "miniqmc-like") {
    return {PhaseSpec{make(DistributionClass::WideNormal, 60.91, 38.1, 0.0, 0.0, 0.0), 0, -1}};
  }
  throw PreconditionError("unknown profile '" + name +
                          "' (expected minife-like, minimd-like or miniqmc-like)");
}

// The job shape the built-in profiles are calibrated for.
inline constexpr DatasetShape kDefaultShape{10, 8, 200, 48};

}  // namespace earlybird

#endif  // EARLYBIRD_GENERATOR_HPP
