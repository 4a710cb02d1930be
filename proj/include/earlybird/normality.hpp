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

#ifndef EARLYBIRD_NORMALITY_HPP
#define EARLYBIRD_NORMALITY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "earlybird/detail/math.hpp"
#include "earlybird/error.hpp"
#include "earlybird/parallel.hpp"
#include "earlybird/stats.hpp"
#include "earlybird/trace.hpp"

namespace earlybird {

enum class NormalityTest { DAgostino, ShapiroWilk, AndersonDarling };

inline const char* test_name(NormalityTest t) {
  switch (t) {
    case NormalityTest::DAgostino: return "dagostino";
    case NormalityTest::ShapiroWilk: return "shapiro-wilk";
    case NormalityTest::AndersonDarling: return "anderson-darling";
  }
  return "?";
}

enum class Verdict { RejectNormality, FailToReject };

// Outcome of one normality test on one sample. The null hypothesis is that
// the data is normally distributed.
struct TestResult {
  NormalityTest test;
  double statistic = 0.0;
  std::optional<double> p_value;   // absent for Anderson-Darling
  double alpha = 0.05;
  Verdict verdict = Verdict::FailToReject;
  std::size_t n = 0;
  std::vector<std::string> warnings;
};

namespace detail {

struct Moments {
  double mean = 0.0;
  double m2 = 0.0;  // biased central moments
  double m3 = 0.0;
  double m4 = 0.0;
};

inline Moments central_moments(std::span<const double> x) {
  Moments m;
  const double n = static_cast<double>(x.size());
  for (double v : x) m.mean += v;
  m.mean /= n;
  for (double v : x) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m.m2 += d2;
    m.m3 += d2 * d;
    m.m4 += d2 * d2;
  }
  m.m2 /= n;
  m.m3 /= n;
  m.m4 /= n;
  return m;
}

// Z-score of the sample skewness (D'Agostino 1970 transformation).
inline double skewness_z(const Moments& m, std::size_t n_) {
  const double n = static_cast<double>(n_);
  const double b1 = m.m3 / std::pow(m.m2, 1.5);
  double y = b1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
  const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                       ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
  const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
  const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
  const double alpha = std::sqrt(2.0 / (w2 - 1.0));
  if (y == 0.0) y = 1.0;
  return delta * std::log(y / alpha + std::sqrt((y / alpha) * (y / alpha) + 1.0));
}

// Z-score of the sample kurtosis (Anscombe & Glynn 1983 transformation).
inline double kurtosis_z(const Moments& m, std::size_t n_) {
  const double n = static_cast<double>(n_);
  const double b2 = m.m4 / (m.m2 * m.m2);
  const double e = 3.0 * (n - 1.0) / (n + 1.0);
  const double var =
      24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
  const double x = (b2 - e) / std::sqrt(var);
  const double sqrtbeta1 =
      6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
      std::sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)));
  const double a =
      6.0 + 8.0 / sqrtbeta1 * (2.0 / sqrtbeta1 + std::sqrt(1.0 + 4.0 / (sqrtbeta1 * sqrtbeta1)));
  const double term1 = 1.0 - 2.0 / (9.0 * a);
  const double denom = 1.0 + x * std::sqrt(2.0 / (a - 4.0));
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double term2 =
      std::copysign(std::cbrt((1.0 - 2.0 / a) / std::abs(denom)), denom);
  return (term1 - term2) / std::sqrt(2.0 / (9.0 * a));
}

inline double poly(std::span<const double> c, double x) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

}  // namespace detail

// D'Agostino's K-squared omnibus test: sum of squared skewness and kurtosis
// z-scores, chi-squared with 2 degrees of freedom under the null. Requires
// n >= 8; results for n < 20 carry an unreliability warning.
inline TestResult dagostino_k2(std::span<const double> samples, double alpha) {
  TestResult r;
  r.test = NormalityTest::DAgostino;
  r.alpha = alpha;
  r.n = samples.size();
  if (samples.size() < 8) {
    throw PreconditionError("dagostino_k2 requires n >= 8, got " +
                            std::to_string(samples.size()));
  }
  const auto m = detail::central_moments(samples);
  if (m.m2 <= 0.0) throw DegenerateSampleError("dagostino_k2: zero-variance sample");
  if (samples.size() < 20) {
    r.warnings.push_back("n < 20: K^2 chi-squared approximation is unreliable");
  }
  const double zs = detail::skewness_z(m, samples.size());
  const double zk = detail::kurtosis_z(m, samples.size());
  r.statistic = zs * zs + zk * zk;
  r.p_value = detail::chi2_sf_2dof(r.statistic);
  r.verdict = *r.p_value < alpha ? Verdict::RejectNormality : Verdict::FailToReject;
  return r;
}

// Shapiro-Wilk W test with Royston's AS R94 approximation for coefficients
// and p-value; valid for 3 <= n <= 5000. Uses the companion AS 111 / AS 66
// normal approximations the published algorithm was calibrated against.
inline TestResult shapiro_wilk(std::span<const double> samples, double alpha) {
  TestResult r;
  r.test = NormalityTest::ShapiroWilk;
  r.alpha = alpha;
  r.n = samples.size();
  const std::size_t n = samples.size();
  if (n < 3 || n > 5000) {
    throw PreconditionError("shapiro_wilk requires 3 <= n <= 5000, got " +
                            std::to_string(n));
  }

  std::vector<double> x(samples.begin(), samples.end());
  const double med = median(x);
  for (double& v : x) v -= med;  // centering improves conditioning of W
  std::sort(x.begin(), x.end());

  static constexpr std::array<double, 6> c1{0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
  static constexpr std::array<double, 6> c2{0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static constexpr std::array<double, 4> c3{0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr std::array<double, 4> c4{1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr std::array<double, 4> c5{-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr std::array<double, 3> c6{-0.4803, -0.082676, 0.0030302};
  static constexpr std::array<double, 2> g{-2.273, 0.459};

  // Approximate coefficients of the best linear unbiased estimator of sigma.
  const std::size_t n2 = n / 2;
  std::vector<double> a(n2);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    const double an25 = static_cast<double>(n) + 0.25;
    double summ2 = 0.0;
    for (std::size_t i = 1; i <= n2; ++i) {
      a[i - 1] = detail::as111_ppnd((static_cast<double>(i) - 0.375) / an25);
      summ2 += a[i - 1] * a[i - 1];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(static_cast<double>(n));
    const double a1 = detail::poly(c1, rsn) - a[0] / ssumm2;
    std::size_t i1;
    double fac;
    if (n > 5) {
      i1 = 3;
      const double a2 = -a[1] / ssumm2 + detail::poly(c2, rsn);
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[0] = a1;
      a[1] = a2;
    } else {
      i1 = 2;
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
      a[0] = a1;
    }
    for (std::size_t i = i1; i <= n2; ++i) a[i - 1] = -a[i - 1] / fac;
  }

  const double range = x.back() - x.front();
  if (range < 1e-19) throw DegenerateSampleError("shapiro_wilk: zero-range sample");

  // W = (sum a_i x_(i))^2 / sum (x_i - xbar)^2, folded form of AS R94.
  double sx = 0.0;
  double sa = -a[0];
  {
    std::size_t j = n - 1;
    sx = x[0] / range;
    for (std::size_t i = 2; i <= n; ++i) {
      sx += x[i - 1] / range;
      if (i != j) {
        const double sign = i < j ? -1.0 : 1.0;
        sa += sign * a[std::min(i, j) - 1];
      }
      --j;
    }
  }
  sa /= static_cast<double>(n);
  sx /= static_cast<double>(n);
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  {
    std::size_t j = n;
    for (std::size_t i = 1; i <= n; ++i) {
      double asa;
      if (i != j) {
        const double sign = i < j ? -1.0 : 1.0;
        asa = sign * a[std::min(i, j) - 1] - sa;
      } else {
        asa = -sa;
      }
      const double xsx = x[i - 1] / range - sx;
      ssa += asa * asa;
      ssx += xsx * xsx;
      sax += asa * xsx;
      --j;
    }
  }
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  r.statistic = 1.0 - w1;

  // p-value
  double pw;
  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;   // 6/pi
    constexpr double stqr = 1.04719755119660;  // pi/3
    pw = pi6 * (std::asin(std::sqrt(r.statistic)) - stqr);
    pw = std::clamp(pw, 0.0, 1.0);
  } else {
    const double y = std::log(w1);
    double mu, sigma;
    if (n <= 11) {
      const double an = static_cast<double>(n);
      const double gamma = detail::poly(g, an);
      if (y >= gamma) {
        pw = 1e-99;  // W so close to 1 the transform saturates
        r.p_value = pw;
        r.verdict = pw < alpha ? Verdict::RejectNormality : Verdict::FailToReject;
        return r;
      }
      const double yy = -std::log(gamma - y);
      mu = detail::poly(c3, an);
      sigma = std::exp(detail::poly(c4, an));
      pw = detail::as66_alnorm((yy - mu) / sigma, true);
    } else {
      const double logn = std::log(static_cast<double>(n));
      mu = detail::poly(c5, logn);
      sigma = std::exp(detail::poly(c6, logn));
      pw = detail::as66_alnorm((y - mu) / sigma, true);
    }
  }
  r.p_value = pw;
  r.verdict = pw < alpha ? Verdict::RejectNormality : Verdict::FailToReject;
  return r;
}

// Critical values for the Anderson-Darling normality statistic when both
// parameters are estimated (Stephens' case 3), scaled by the finite-n
// factor 1 + 4/n - 25/n^2.
inline constexpr std::array<double, 5> kAndersonAlphas{0.15, 0.10, 0.05, 0.025, 0.01};
inline constexpr std::array<double, 5> kAndersonCriticalBase{0.576, 0.656, 0.787, 0.918, 1.092};

inline double anderson_critical_value(std::size_t n, double alpha) {
  for (std::size_t i = 0; i < kAndersonAlphas.size(); ++i) {
    if (std::abs(alpha - kAndersonAlphas[i]) < 1e-12) {
      const double nn = static_cast<double>(n);
      return kAndersonCriticalBase[i] / (1.0 + 4.0 / nn - 25.0 / (nn * nn));
    }
  }
  throw PreconditionError(
      "anderson_darling alpha must be one of {0.15, 0.10, 0.05, 0.025, 0.01}");
}

// Anderson-Darling A^2 for normality with mean and variance estimated from
// the sample. The verdict compares A^2 against the case-3 critical value at
// alpha; no p-value is reported. A^2 can saturate to +inf when an extreme
// outlier drives the fitted CDF to 1 within double precision — that is a
// rejection, not an error.
inline TestResult anderson_darling(std::span<const double> samples,
                                   double alpha = 0.05) {
  TestResult r;
  r.test = NormalityTest::AndersonDarling;
  r.alpha = alpha;
  r.n = samples.size();
  const std::size_t n = samples.size();
  if (n < 8) {
    throw PreconditionError("anderson_darling requires n >= 8, got " +
                            std::to_string(n));
  }
  const double critical = anderson_critical_value(n, alpha);

  std::vector<double> y(samples.begin(), samples.end());
  std::sort(y.begin(), y.end());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  if (ss <= 0.0) throw DegenerateSampleError("anderson_darling: zero-variance sample");
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  const double inv_n = 1.0 / static_cast<double>(n);
  double a2 = -static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = detail::normal_cdf((y[i] - mean) / sd);
    const double znr = detail::normal_cdf((y[n - 1 - i] - mean) / sd);
    const double lo = zi > 0.0 ? std::log(zi) : -std::numeric_limits<double>::infinity();
    const double omz = 1.0 - znr;
    const double hi = omz > 0.0 ? std::log(omz) : -std::numeric_limits<double>::infinity();
    a2 -= (2.0 * static_cast<double>(i) + 1.0) * inv_n * (lo + hi);
  }
  r.statistic = a2;
  r.verdict = a2 > critical ? Verdict::RejectNormality : Verdict::FailToReject;
  return r;
}

// Per-test tallies for one aggregation level.
struct NormalityTable {
  AggregationLevel level;
  double alpha = 0.05;
  std::int64_t n_groups = 0;
  std::int64_t n_skipped = 0;  // degenerate (zero variance) groups
  struct Row {
    NormalityTest test;
    std::int64_t pass_count = 0;  // FailToReject
    double pass_fraction = 0.0;   // over non-skipped groups
  };
  std::array<Row, 3> rows{Row{NormalityTest::DAgostino},
                          Row{NormalityTest::ShapiroWilk},
                          Row{NormalityTest::AndersonDarling}};
  std::vector<std::string> skipped_keys;
  // Groups where the three tests disagree on the verdict.
  std::vector<std::string> discordant_keys;
  std::vector<std::string> notes;
};

// Sample size above which Shapiro-Wilk falls back to a fixed-seed
// subsample (Royston's approximation is calibrated only up to n = 5000).
inline constexpr std::size_t kShapiroMaxN = 5000;
inline constexpr std::uint64_t kShapiroSubsampleSeed = 0x5357303153454544ULL;

// Runs all three tests on every group at the given level.
// Degenerate groups are skipped and reported, not failed.
inline NormalityTable normality_summary(const TraceDataset& ds,
                                        AggregationLevel level, double alpha,
                                        int jobs = 0) {
  const auto groups = group(ds, level);
  NormalityTable table;
  table.level = level;
  table.alpha = alpha;
  table.n_groups = static_cast<std::int64_t>(groups.size());

  struct GroupOutcome {
    bool skipped = false;
    bool subsampled = false;
    std::array<Verdict, 3> verdicts{};
  };
  std::vector<GroupOutcome> outcomes(groups.size());

  parallel_for(groups.size(), jobs, [&](std::size_t gi) {
    const auto& g = groups[gi];
    std::vector<double> ms;
    ms.reserve(g.arrivals.size());
    for (Nanoseconds v : g.arrivals) ms.push_back(to_ms(v));
    auto& out = outcomes[gi];
    try {
      out.verdicts[0] = dagostino_k2(ms, alpha).verdict;
      out.verdicts[2] = anderson_darling(ms, alpha).verdict;
      if (ms.size() > kShapiroMaxN) {
        // Fisher-Yates prefix on a deterministic stream, independent of the
        // user's master seed so reports are comparable across runs.
        std::mt19937_64 eng(detail::mix_seed(kShapiroSubsampleSeed, gi, ms.size(), 0));
        std::vector<double> sub = ms;
        for (std::size_t i = 0; i < kShapiroMaxN; ++i) {
          const std::size_t j = i + static_cast<std::size_t>(eng() % (sub.size() - i));
          std::swap(sub[i], sub[j]);
        }
        sub.resize(kShapiroMaxN);
        out.verdicts[1] = shapiro_wilk(sub, alpha).verdict;
        out.subsampled = true;
      } else {
        out.verdicts[1] = shapiro_wilk(ms, alpha).verdict;
      }
    } catch (const DegenerateSampleError&) {
      out.skipped = true;
    }
  });

  bool any_subsampled = false;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& out = outcomes[gi];
    if (out.skipped) {
      ++table.n_skipped;
      table.skipped_keys.push_back(groups[gi].key.str());
      continue;
    }
    any_subsampled = any_subsampled || out.subsampled;
    for (int t = 0; t < 3; ++t) {
      if (out.verdicts[t] == Verdict::FailToReject) ++table.rows[t].pass_count;
    }
    const bool agree = out.verdicts[0] == out.verdicts[1] &&
                       out.verdicts[1] == out.verdicts[2];
    if (!agree) table.discordant_keys.push_back(groups[gi].key.str());
  }
  const std::int64_t tested = table.n_groups - table.n_skipped;
  for (auto& row : table.rows) {
    row.pass_fraction =
        tested > 0 ? static_cast<double>(row.pass_count) / static_cast<double>(tested) : 0.0;
  }
  if (any_subsampled) {
    table.notes.push_back(
        "shapiro-wilk evaluated on a fixed-seed subsample of " +
        std::to_string(kShapiroMaxN) + " (group exceeds approximation range)");
  }
  return table;
}

}  // namespace earlybird

#endif  // EARLYBIRD_NORMALITY_HPP
