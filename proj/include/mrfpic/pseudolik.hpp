#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "counts.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "model.hpp"
#include "sampler.hpp"

namespace mrfpic {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double xlogx(std::uint64_t n) {
  if (n == 0) return 0.0;
  const auto x = static_cast<double>(n);
  return x * std::log(x);
}

/// Log pseudo-likelihood: sum over observed blocks of N(a(Gamma,0)) log Q(a(0) | a(Gamma)).
/// Returns -infinity when an observed block has probability zero.
inline double log_pl(const CountTable& table, const Specification& spec) {
  if (!(table.gamma() == spec.gamma())) {
    throw ValidationError("table neighborhood " + table.gamma().to_string() + " differs from specification " +
                          spec.gamma().to_string());
  }
  const int m = table.alphabet();
  CompensatedSum acc;
  for (const auto& [key, n] : table.sorted()) {
    const double q = spec.probability(key.drop_last(m), key.last_symbol(m));
    if (q <= 0.0) return -std::numeric_limits<double>::infinity();
    acc.add(static_cast<double>(n) * std::log(q));
  }
  return acc.value();
}

/// Log maximum pseudo-likelihood: sum N(a(Gamma,0)) log(N(a(Gamma,0)) / N(a(Gamma))) over observed blocks,
/// evaluated as sum n log n - sum N log N.
inline double log_mpl(const CountTable& table) {
  CompensatedSum acc;
  for (const auto& [key, n] : table.counts()) acc.add(xlogx(n));
  for (const auto& [key, n] : table.marginal()) acc.add(-xlogx(n));
  return std::min(acc.value(), 0.0);
}

/// c * m^gamma_size * log(sample_volume).
inline double penalty(int m, std::size_t gamma_size, std::uint64_t sample_volume, double c = 1.0) {
  if (sample_volume < 2) throw ValidationError("sample volume must be at least 2");
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("penalty multiplier must be a positive real");
  const double size_term = std::pow(static_cast<double>(m), static_cast<double>(gamma_size));
  const double out = c * size_term * std::log(static_cast<double>(sample_volume));
  if (!std::isfinite(out)) throw OverflowError("penalty m^|Gamma| overflows");
  return out;
}

struct CriterionValue {
  Neighborhood gamma;
  double log_mpl = 0.0;
  double penalty = 0.0;
  double pic = 0.0;
  std::uint64_t sample_volume = 0;

  static CriterionValue make(Neighborhood gamma, double log_mpl, double penalty, std::uint64_t volume) {
    return {std::move(gamma), log_mpl, penalty, -log_mpl + penalty, volume};
  }
};

/// PIC of one candidate: -log MPL + c m^|Gamma| log |region|.
inline CriterionValue pic(const Sample& s, const Neighborhood& gamma, double c = 1.0) {
  const CountTable table = count_blocks(s, gamma);
  const std::uint64_t vol = s.region.volume();
  return CriterionValue::make(gamma, log_mpl(table), penalty(s.alphabet, gamma.size(), vol, c), vol);
}

/// PIC with blocks counted on the region shrunk by `width` rather than the window width.
inline CriterionValue pic(const Sample& s, const Neighborhood& gamma, double c, int width) {
  const CountTable table = count_blocks(s, gamma, width);
  const std::uint64_t vol = s.region.volume();
  return CriterionValue::make(gamma, log_mpl(table), penalty(s.alphabet, gamma.size(), vol, c), vol);
}

}  // namespace mrfpic
