#pragma once

// Multiband uncertainty sets: per-(commodity, period) deviation breakpoints
// for bands K- .. K+, and the band-count bound rules that turn a constraint's
// coefficient count n into a profile theta.

#include <cstddef>
#include <vector>

#include "mpnd/instance.hpp"

namespace mpnd {

// Band k of a [k_minus, k_plus] range lives at vector slot k - k_minus.
struct BoundRule {
  int k_minus = 0;
  int k_plus = 0;
  std::vector<double> lambda;  // lower fraction per band; band 0 ignored
  std::vector<double> mu;      // upper fraction per band; band 0 ignored

  std::size_t num_bands() const { return static_cast<std::size_t>(k_plus - k_minus + 1); }
  std::size_t slot(int k) const { return static_cast<std::size_t>(k - k_minus); }

  // floor(lambda_k * n) and ceil(mu_k * n), robust to representation error.
  std::size_t lower_count(int k, std::size_t n) const;
  std::size_t upper_count(int k, std::size_t n) const;

  // True when some negative band has a positive lower fraction, i.e. DEV can
  // be forced below zero.
  bool forces_negative() const;

  // Throws ValidationError if a fraction leaves [0, 1], lambda > mu, or the
  // lower fractions sum above 1.
  void check() const;
};

struct BandStructure {
  int k_minus = 0;
  int k_plus = 0;
  std::vector<std::vector<std::vector<double>>> delta;  // [c][t][k - k_minus]

  // Set when delta[c][t][k] = fraction[k] * demand[c][t] for every (c, t).
  bool proportional = false;
  std::vector<double> fraction;  // [k - k_minus], meaningful when proportional

  std::size_t num_bands() const { return static_cast<std::size_t>(k_plus - k_minus + 1); }
  double at(std::size_t c, std::size_t t, int k) const {
    return delta[c][t][static_cast<std::size_t>(k - k_minus)];
  }

  // Throws ValidationError if the breakpoints are not strictly increasing with
  // delta = 0 exactly on band 0, or a value is not finite.
  void check() const;
};

struct MultibandSet {
  BandStructure bands;
  BoundRule rule;
};

// Bands listed from the most negative to the most positive deviation; exactly
// one entry has fraction 0 and that entry is band 0.
struct BandSpec {
  std::vector<double> fraction;
  std::vector<double> lambda;
  std::vector<double> mu;

  // Five bands: -10%, -5%, 0, +5%, +10%; at most 25% of a constraint's
  // coefficients in +1 and 10% in +2; no forced deviations.
  static BandSpec defaults();
  // Band 0 only: no uncertainty.
  static BandSpec none();
};

BoundRule make_rule(const BandSpec& spec);

MultibandSet build_multiband(const Instance& instance, const BandSpec& spec);

struct Profile {
  int k_minus = 0;
  std::vector<std::size_t> theta;  // [k - k_minus]

  std::size_t at(int k) const { return theta[static_cast<std::size_t>(k - k_minus)]; }
  std::size_t total() const;
};

// Every band takes its lower count, then positive bands from the outermost
// inwards grow towards their upper count while coefficients remain; the rest
// stay nominal.
Profile profile(const BoundRule& rule, std::size_t n);

// Same rule with explicit per-band counts (band 0 entries ignored).
Profile profile_from_counts(int k_minus, const std::vector<std::size_t>& lower,
                            const std::vector<std::size_t>& upper, std::size_t n);

}  // namespace mpnd
