#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "counts.hpp"
#include "detail/ball_kernel.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "model.hpp"
#include "pseudolik.hpp"
#include "sampler.hpp"

namespace mrfpic {

inline constexpr double kTieTolerance = 1e-9;

struct EstimateOptions {
  /// Permit candidate radius above the window width (no theoretical backing; recorded in the report).
  /// Forced runs count every candidate on the region shrunk by the radius, so all candidates see the
  /// same sites, unless verbatim_window keeps the window and drops sites per candidate.
  bool force_radius = false;
  bool verbatim_window = false;
  /// Count once on the radius-R ball and marginalize; false scores each candidate by direct counting.
  bool fast_path = true;
  std::uint64_t candidate_cap = kDefaultCandidateCap;
};

struct PicReport {
  std::vector<CriterionValue> candidates;  // canonical candidate order
  std::size_t selected_index = 0;
  std::vector<std::size_t> ties;  // candidates within kTieTolerance of the minimum, in canonical order
  int radius = 0;
  double c = 1.0;
  int window_width = 0;
  std::optional<Region> window_region;
  bool forced_radius = false;
  int count_width = 0;  // the region is shrunk by this much to get the counted sites
  std::optional<Region> count_region;

  const CriterionValue& best() const { return candidates[selected_index]; }
  const Neighborhood& selected() const { return best().gamma; }

  /// PIC of the best other candidate minus the selected PIC.
  double runner_up_margin() const {
    double next = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (i != selected_index) next = std::min(next, candidates[i].pic);
    }
    return next - best().pic;
  }
};

/// Index of the minimal-PIC candidate: values within kTieTolerance of the minimum are broken by
/// smaller |Gamma|, then smaller radius, then canonical order.
inline std::size_t select_minimum(const std::vector<CriterionValue>& cands, std::vector<std::size_t>* ties = nullptr) {
  if (cands.empty()) throw ValidationError("no candidates to select from");
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& cv : cands) lo = std::min(lo, cv.pic);
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].pic <= lo + kTieTolerance) tied.push_back(i);
  }
  const std::size_t pick = *std::min_element(tied.begin(), tied.end(), [&](std::size_t a, std::size_t b) {
    const auto& ga = cands[a].gamma;
    const auto& gb = cands[b].gamma;
    if (ga.size() != gb.size()) return ga.size() < gb.size();
    if (ga.radius() != gb.radius()) return ga.radius() < gb.radius();
    return a < b;
  });
  if (ties) *ties = std::move(tied);
  return pick;
}

/// Bitmask of half-ball pairs (indexed as in half_ball(radius, d)) present in gamma.
inline std::uint64_t pair_mask(const Neighborhood& gamma, const std::vector<Site>& half) {
  std::uint64_t mask = 0;
  for (const Site& v : gamma.half()) {
    const auto it = std::lower_bound(half.begin(), half.end(), v);
    if (it == half.end() || !(*it == v)) throw ValidationError("offset " + v.to_string() + " outside the ball");
    mask |= std::uint64_t{1} << static_cast<std::size_t>(it - half.begin());
  }
  return mask;
}

/// PIC estimate: minimizes PIC over all central-symmetric neighborhoods of radius <= R.
inline PicReport estimate(const Sample& s, int radius, double c = 1.0, const EstimateOptions& opts = {}) {
  if (radius < 0) throw ValidationError("radius must be nonnegative");
  const int w = window_width(s.region);
  if (radius > w && !opts.force_radius) {
    throw ValidationError("candidate radius " + std::to_string(radius) + " exceeds the window width " +
                          std::to_string(w) + " of this " + std::to_string(s.region.volume()) +
                          "-site sample; pass force_radius to override");
  }
  const std::vector<Neighborhood> family = enumerate_neighborhoods(radius, s.dim(), opts.candidate_cap);
  const std::uint64_t vol = s.region.volume();

  PicReport rep;
  rep.radius = radius;
  rep.c = c;
  rep.window_width = w;
  rep.window_region = window(s.region);
  rep.forced_radius = radius > w;
  rep.count_width = rep.forced_radius && !opts.verbatim_window ? radius : w;
  rep.count_region = shrink(s.region, rep.count_width);
  rep.candidates.reserve(family.size());

  if (opts.fast_path && detail::BallKernel::supported(radius, s.dim(), s.alphabet)) {
    detail::BallKernel kernel(s, radius, rep.count_region);
    const std::vector<double> mpl = kernel.log_mpl_all();
    for (const Neighborhood& g : family) {
      const double lm = mpl[pair_mask(g, kernel.half())];
      rep.candidates.push_back(CriterionValue::make(g, lm, penalty(s.alphabet, g.size(), vol, c), vol));
    }
  } else {
    for (const Neighborhood& g : family) rep.candidates.push_back(pic(s, g, c, rep.count_width));
  }
  rep.selected_index = select_minimum(rep.candidates, &rep.ties);
  return rep;
}

/// Radius from the typicality schedule with alpha just below the overestimation bound for q_min.
inline int schedule_radius(const Sample& s, double q_min) {
  const auto win = window(s.region);
  if (!win) return 0;
  const double alpha = std::min(1.0, 0.99 * alpha_bound(q_min, s.dim(), s.alphabet));
  return radius_schedule(win->volume(), alpha, s.dim());
}

/// Empirical one-point specification N(a(Gamma,0)) / N(a(Gamma)) over observed conditioning blocks.
inline Specification empirical_specification(const Sample& s, const Neighborhood& gamma) {
  const CountTable table = count_blocks(s, gamma);
  if (table.total() == 0) throw ValidationError("no site contributes to the counts for " + gamma.to_string());
  const int m = s.alphabet;
  Specification out(gamma, m);
  const auto marg = table.marginal();
  for (const auto& [block, n] : marg) {
    std::vector<double> row(static_cast<std::size_t>(m), 0.0);
    for (int a = 0; a < m; ++a) {
      row[static_cast<std::size_t>(a)] =
          static_cast<double>(table.count(block.append(a, m))) / static_cast<double>(n);
    }
    out.set_row(block, std::move(row));
  }
  return out;
}

/// Largest absolute entry difference over the rows of `estimate`, looked up in `truth`.
inline double max_deviation(const Specification& estimate, const Specification& truth) {
  double dev = 0.0;
  const int m = estimate.alphabet();
  for (const auto& [block, row] : estimate.rows()) {
    const auto symbols = block.decode(m);
    for (int a = 0; a < m; ++a) {
      const double q = estimate.gamma() == truth.gamma() ? truth.probability(block, a)
                                                         : truth.probability_on(estimate.gamma(), symbols, a);
      dev = std::max(dev, std::abs(row[static_cast<std::size_t>(a)] - q));
    }
  }
  return dev;
}

/// kappa slightly above the typicality threshold 2^(3d) e alpha log(m^2 + 1).
inline double kappa_auto(double alpha, int d, int m) {
  const double mm = static_cast<double>(m) * m;
  return 1.01 * std::pow(2.0, 3.0 * d) * std::numbers::e * alpha * std::log(mm + 1.0);
}

/// sqrt(kappa log N / N).
inline double typicality_bound(double kappa, std::uint64_t n) {
  const auto x = static_cast<double>(n);
  return std::sqrt(kappa * std::log(x) / x);
}

struct TypicalityRecord {
  BlockKey block;  // conditioning block a(Gamma)
  int center = 0;
  std::uint64_t block_count = 0;  // N(a(Gamma))
  std::uint64_t joint_count = 0;  // N(a(Gamma, 0))
  double ratio = 0.0;
  double truth = 0.0;
  double deviation = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct TypicalityReport {
  Neighborhood gamma;
  double alpha = 1.0;
  double kappa = 0.0;
  std::vector<TypicalityRecord> records;
  double worst_margin = std::numeric_limits<double>::infinity();  // min over records of bound - deviation

  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.pass; }));
  }
};

/// Compares empirical conditional ratios to a specification on every observed block with N(a(Gamma)) >= 2.
/// `spec` may live on gamma or on any sub-neighborhood of it; kappa defaults to kappa_auto(alpha, d, m).
inline TypicalityReport typicality_check(const Sample& s, const Neighborhood& gamma, const Specification& spec,
                                         double alpha, std::optional<double> kappa = std::nullopt) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in (0, 1]");
  if (!spec.gamma().is_subset_of(gamma)) {
    throw ValidationError("specification neighborhood " + spec.gamma().to_string() + " is not contained in " +
                          gamma.to_string());
  }
  const int m = s.alphabet;
  TypicalityReport rep;
  rep.gamma = gamma;
  rep.alpha = alpha;
  rep.kappa = kappa ? *kappa : kappa_auto(alpha, s.dim(), m);
  if (!(rep.kappa > 0.0)) throw ValidationError("kappa must be positive");
  const CountTable table = count_blocks(s, gamma);
  for (const auto& [block, n] : table.marginal()) {
    if (n < 2) continue;
    const auto symbols = block.decode(m);
    for (int a = 0; a < m; ++a) {
      TypicalityRecord r;
      r.block = block;
      r.center = a;
      r.block_count = n;
      r.joint_count = table.count(block.append(a, m));
      r.ratio = static_cast<double>(r.joint_count) / static_cast<double>(n);
      r.truth = spec.gamma() == gamma ? spec.probability(block, a) : spec.probability_on(gamma, symbols, a);
      r.deviation = std::abs(r.ratio - r.truth);
      r.bound = typicality_bound(rep.kappa, n);
      r.pass = r.deviation < r.bound;
      rep.worst_margin = std::min(rep.worst_margin, r.bound - r.deviation);
      rep.records.push_back(std::move(r));
    }
  }
  return rep;
}

/// How a selection relates to the true basic neighborhood.
enum class Selection { Exact, Over, Under, Mixed };

inline Selection classify(const Neighborhood& selected, const Neighborhood& truth) {
  if (selected == truth) return Selection::Exact;
  if (truth.is_subset_of(selected)) return Selection::Over;
  if (selected.is_subset_of(truth)) return Selection::Under;
  return Selection::Mixed;
}

inline const char* to_string(Selection s) {
  switch (s) {
    case Selection::Exact: return "exact";
    case Selection::Over: return "over";
    case Selection::Under: return "under";
    case Selection::Mixed: return "mixed";
  }
  return "?";
}

}  // namespace mrfpic
