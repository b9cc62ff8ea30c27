#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace histtools::study {

/**
 * Seeded synthetic stand-in for a population of storage users' log2 read
 * sizes on [0, 24].
 *
 * Each user mixes one to four components: point masses on whole powers of
 * two (page- and block-sized reads), point masses at arbitrary sizes
 * (fixed-size records), and Beta-shaped spreads over a few octaves.  Every
 * user draws from its own generator seeded by (seed, user), so results do
 * not depend on evaluation order.
 */
std::vector<double> synthetic_user_samples(std::uint64_t seed, std::size_t user);

struct UserGain {
  std::size_t user;
  std::uint64_t samples;
  std::size_t occupied_bins;     // bins of the trimmed H(24,1)
  double emdcc_annotated;        // H(24,1)
  double emdcc_bisected;         // H(48,0) over the same range
  double gain;                   // information gain of H(24,1); +inf allowed
};

struct GainSummary {
  double min;
  double q10;
  double q25;
  double median;
  double q75;
  double q90;
  double frac_below_1;
  double frac_above_2_5;
  double frac_above_10;
};

struct GainStudy {
  std::vector<UserGain> users;
  GainSummary summary;
};

inline constexpr std::size_t kLogBins = 24;

GainStudy run_gain_study(std::size_t users, std::uint64_t seed);

/// Order-statistic summary; +inf gains sort above every finite value.
GainSummary summarize(std::vector<double> gains);

}  // namespace histtools::study
