#include "mpnd/uncertainty.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpnd/errors.hpp"

namespace mpnd {

namespace {

constexpr double kCountTol = 1e-9;

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

std::size_t BoundRule::lower_count(int k, std::size_t n) const {
  const double x = lambda[slot(k)] * static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(x + kCountTol));
}

std::size_t BoundRule::upper_count(int k, std::size_t n) const {
  const double x = mu[slot(k)] * static_cast<double>(n);
  return static_cast<std::size_t>(std::ceil(x - kCountTol));
}

bool BoundRule::forces_negative() const {
  for (int k = k_minus; k < 0; ++k) {
    if (lambda[slot(k)] > 0.0) return true;
  }
  return false;
}

void BoundRule::check() const {
  if (k_minus > 0 || k_plus < 0) throw ValidationError("bound rule: band range must contain 0");
  if (lambda.size() != num_bands() || mu.size() != num_bands()) {
    throw ValidationError("bound rule: one lower and one upper fraction per band");
  }
  double lower_sum = 0.0;
  for (int k = k_minus; k <= k_plus; ++k) {
    if (k == 0) continue;
    const double l = lambda[slot(k)];
    const double u = mu[slot(k)];
    if (!in_unit(l) || !in_unit(u)) {
      throw ValidationError(fmt::format("bound rule: band {} fractions must lie in [0, 1]", k));
    }
    if (l > u) throw ValidationError(fmt::format("bound rule: band {} has lambda > mu", k));
    lower_sum += l;
  }
  // floor(l n) <= l n, so a fractional sum of at most 1 keeps every
  // constraint feasible.
  if (lower_sum > 1.0 + kCountTol) {
    throw ValidationError("bound rule: lower fractions sum above 1, no feasible realization");
  }
}

void BandStructure::check() const {
  if (k_minus > 0 || k_plus < 0) throw ValidationError("bands: band range must contain 0");
  const std::size_t zero = static_cast<std::size_t>(-k_minus);
  for (std::size_t c = 0; c < delta.size(); ++c) {
    for (std::size_t t = 0; t < delta[c].size(); ++t) {
      const auto& row = delta[c][t];
      if (row.size() != num_bands()) throw ValidationError("bands: row length mismatch");
      for (double v : row) {
        if (!std::isfinite(v)) throw ValidationError("bands: non-finite deviation");
      }
      if (row[zero] != 0.0) throw ValidationError("bands: band 0 deviation must be 0");
      // A zero nominal value has nothing to deviate from.
      if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; })) continue;
      for (std::size_t k = 1; k < row.size(); ++k) {
        if (!(row[k - 1] < row[k])) {
          throw ValidationError(
              fmt::format("bands: deviations not strictly increasing at c={}, t={}", c + 1, t + 1));
        }
      }
    }
  }
}

BandSpec BandSpec::defaults() {
  BandSpec s;
  s.fraction = {-0.10, -0.05, 0.0, 0.05, 0.10};
  s.lambda = {0.0, 0.0, 0.0, 0.0, 0.0};
  s.mu = {0.10, 0.25, 1.0, 0.25, 0.10};
  return s;
}

BandSpec BandSpec::none() {
  BandSpec s;
  s.fraction = {0.0};
  s.lambda = {0.0};
  s.mu = {1.0};
  return s;
}

BoundRule make_rule(const BandSpec& spec) {
  const std::size_t n = spec.fraction.size();
  if (n == 0) throw ValidationError("bands: at least band 0 is required");
  if (spec.lambda.size() != n || spec.mu.size() != n) {
    throw ValidationError("bands: fraction, lambda and mu lists must have equal length");
  }
  std::size_t zero = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(spec.fraction[i])) throw ValidationError("bands: non-finite fraction");
    if (i > 0 && !(spec.fraction[i - 1] < spec.fraction[i])) {
      throw ValidationError("bands: fractions must be strictly increasing");
    }
    if (spec.fraction[i] == 0.0) zero = i;
  }
  if (zero == n) throw ValidationError("bands: no zero-deviation band");
  BoundRule rule;
  rule.k_minus = -static_cast<int>(zero);
  rule.k_plus = static_cast<int>(n - 1 - zero);
  rule.lambda = spec.lambda;
  rule.mu = spec.mu;
  rule.lambda[zero] = 0.0;
  rule.mu[zero] = 1.0;
  rule.check();
  return rule;
}

MultibandSet build_multiband(const Instance& instance, const BandSpec& spec) {
  MultibandSet mb;
  mb.rule = make_rule(spec);
  BandStructure& b = mb.bands;
  b.k_minus = mb.rule.k_minus;
  b.k_plus = mb.rule.k_plus;
  b.fraction = spec.fraction;
  b.proportional = true;
  b.delta.resize(instance.num_commodities());
  for (std::size_t c = 0; c < instance.num_commodities(); ++c) {
    b.delta[c].resize(instance.periods);
    for (std::size_t t = 0; t < instance.periods; ++t) {
      const double d = instance.demand[c][t];
      if (!(d >= 0.0)) {
        throw ValidationError(fmt::format("bands: negative demand for '{}' at t={}",
                                          instance.base.commodities[c].id, t + 1));
      }
      auto& row = b.delta[c][t];
      row.resize(spec.fraction.size());
      for (std::size_t k = 0; k < row.size(); ++k) row[k] = spec.fraction[k] * d;
    }
  }
  b.check();
  return mb;
}

std::size_t Profile::total() const { return std::accumulate(theta.begin(), theta.end(), std::size_t{0}); }

Profile profile_from_counts(int k_minus, const std::vector<std::size_t>& lower,
                            const std::vector<std::size_t>& upper, std::size_t n) {
  if (lower.size() != upper.size()) throw ValidationError("profile: count lists differ in length");
  const int k_plus = k_minus + static_cast<int>(lower.size()) - 1;
  const std::size_t zero = static_cast<std::size_t>(-k_minus);
  Profile p;
  p.k_minus = k_minus;
  p.theta.assign(lower.size(), 0);
  std::size_t reserved = 0;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (i == zero) continue;
    if (lower[i] > upper[i]) throw ValidationError("profile: lower count above upper count");
    p.theta[i] = lower[i];
    reserved += lower[i];
  }
  if (reserved > n) throw ValidationError("profile: lower counts exceed the coefficient count");
  std::size_t remaining = n - reserved;
  for (int k = k_plus; k >= 1; --k) {
    const std::size_t i = static_cast<std::size_t>(k - k_minus);
    const std::size_t extra = std::min(upper[i] - lower[i], remaining);
    p.theta[i] += extra;
    remaining -= extra;
  }
  p.theta[zero] = remaining;
  return p;
}

Profile profile(const BoundRule& rule, std::size_t n) {
  std::vector<std::size_t> lower(rule.num_bands(), 0);
  std::vector<std::size_t> upper(rule.num_bands(), 0);
  for (int k = rule.k_minus; k <= rule.k_plus; ++k) {
    if (k == 0) continue;
    lower[rule.slot(k)] = rule.lower_count(k, n);
    upper[rule.slot(k)] = rule.upper_count(k, n);
  }
  return profile_from_counts(rule.k_minus, lower, upper, n);
}

}  // namespace mpnd
