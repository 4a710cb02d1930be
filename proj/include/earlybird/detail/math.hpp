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

#ifndef EARLYBIRD_DETAIL_MATH_HPP
#define EARLYBIRD_DETAIL_MATH_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace earlybird::detail {

// Standard normal CDF. erfc keeps the tails accurate down to ~1e-300.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

// Upper-tail survival of the chi-squared distribution with 2 degrees of
// freedom; closed form.
inline double chi2_sf_2dof(double x) { return std::exp(-0.5 * x); }

// Inverse standard normal CDF, Wichura's PPND16 (algorithm AS 241).
// Accurate to ~1e-16 relative over (0,1).
inline double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -v : v;
}

// Inverse normal CDF, Beasley-Springer (algorithm AS 111). Less accurate
// than PPND16 (~1e-7); used by shapiro_wilk because the W coefficients of
// the published algorithm are defined in terms of this approximation.
inline double as111_ppnd(double p) {
  constexpr double split = 0.42;
  const double q = p - 0.5;
  if (std::abs(q) <= split) {
    const double r = q * q;
    return q *
           (((-25.44106049637 * r + 41.39119773534) * r - 18.61500062529) * r +
            2.50662823884) /
           ((((3.13082909833 * r - 21.06224101826) * r + 23.08336743743) * r -
             8.47351093090) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  if (r <= 0.0) return 0.0;
  r = std::sqrt(-std::log(r));
  const double v =
      (((2.32121276858 * r + 4.85014127135) * r - 2.29796479134) * r -
       2.78718931138) /
      ((1.63706781897 * r + 3.54388924762) * r + 1.0);
  return q < 0.0 ? -v : v;
}

// Normal tail probability, Hill's algorithm AS 66. upper=true gives
// P(Z > x). Companion approximation to AS 111 inside shapiro_wilk.
inline double as66_alnorm(double x, bool upper) {
  constexpr double ltone = 7.0, utzero = 18.66, con = 1.28;
  bool up = upper;
  double z = x;
  if (z < 0.0) {
    up = !up;
    z = -z;
  }
  double res;
  if (z <= ltone || (up && z <= utzero)) {
    const double y = 0.5 * z * z;
    if (z > con) {
      res = 0.398942280385 * std::exp(-y) /
            (z - 3.8052e-8 +
             1.00000615302 /
                 (z + 3.98064794e-4 +
                  1.98615381364 /
                      (z - 0.151679116635 +
                       5.29330324926 /
                           (z + 4.8385912808 -
                            15.1508972451 /
                                (z + 0.742380924027 +
                                 30.789933034 / (z + 3.99019417011))))));
    } else {
      res = 0.5 - z * (0.398942280444 -
                       0.399903438504 * y /
                           (y + 5.75885480458 -
                            29.8213557808 /
                                (y + 2.62433121679 +
                                 48.6959930692 / (y + 5.92885724438))));
    }
  } else {
    res = 0.0;
  }
  return up ? res : 1.0 - res;
}

// --- deterministic seeding helpers ---

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Collapses (seed, a, b, c) into one stream seed. Used to give every
// process-iteration group its own RNG stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b, std::uint64_t c) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s ^= a + 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  s ^= b + 0xc2b2ae3d27d4eb4fULL;
  h ^= splitmix64(s);
  s ^= c + 0x165667b19e3779f9ULL;
  h ^= splitmix64(s);
  return h;
}

// Uniform draw in the open interval (0,1) from a 64-bit word.
inline double to_unit_open(std::uint64_t word) {
  return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace earlybird::detail

#endif  // EARLYBIRD_DETAIL_MATH_HPP
