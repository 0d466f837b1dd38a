#pragma once

// Evaluates log MPL for every central-symmetric neighborhood inside the radius-R ball from one
// scan of the sample. Blocks are bit-packed over the ball, and each candidate's table is obtained
// from a parent holding one more offset pair by masking and re-aggregating, walking the subset
// lattice depth-first. Window sites whose ball leaves the sample region ("rim" sites) join a
// candidate's table exactly when all of its offsets stay inside the region, so the result
// equals per-candidate counting whether or not R exceeds the window width.

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "../counts.hpp"
#include "../lattice.hpp"
#include "../pseudolik.hpp"
#include "../sampler.hpp"

namespace mrfpic::detail {

/// Open-addressing counter for 64-bit keys.
class FlatCounter {
 public:
  void reset(std::size_t expected) {
    std::size_t cap = 16;
    while (cap < 2 * expected) cap <<= 1;
    if (keys_.size() != cap) {
      keys_.assign(cap, 0);
      counts_.assign(cap, 0);
    } else {
      std::fill(counts_.begin(), counts_.end(), 0);
    }
    shift_ = 64 - std::countr_zero(cap);
    mask_ = cap - 1;
    used_.clear();
  }

  void add(std::uint64_t key, std::uint64_t n) {
    std::size_t slot = static_cast<std::size_t>((key * 0x9e3779b97f4a7c15ULL) >> shift_);
    while (counts_[slot] != 0 && keys_[slot] != key) slot = (slot + 1) & mask_;
    if (counts_[slot] == 0) {
      keys_[slot] = key;
      used_.push_back(slot);
    }
    counts_[slot] += n;
  }

  /// Visits occupied slots in first-insertion order.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t slot : used_) f(keys_[slot], counts_[slot]);
  }

  std::size_t size() const { return used_.size(); }

 private:
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::size_t> used_;
  std::size_t mask_ = 0;
  int shift_ = 60;
};

struct PackedEntry {
  std::uint64_t code;
  std::uint64_t count;
};

/// Bit layout: center symbol at slot 0, pair p's +v at slot 1 + 2p and -v at slot 2 + 2p.
class BallKernel {
 public:
  static int bits_per_symbol(int m) { return std::bit_width(static_cast<unsigned>(m - 1)); }

  static bool supported(int radius, int d, int m) {
    const std::uint64_t h = half_ball_size(radius, d);
    return h <= 30 && (2 * h + 1) * static_cast<std::uint64_t>(bits_per_symbol(m)) <= 64;
  }

  /// Counts blocks centered in `sites` (a sub-box of the sample region; nullopt for none).
  BallKernel(const Sample& s, int radius, const std::optional<Region>& sites) : radius_(radius), m_(s.alphabet) {
    half_ = half_ball(radius, s.dim());
    h_ = static_cast<int>(half_.size());
    bits_ = bits_per_symbol(m_);
    if (!supported(radius, s.dim(), m_)) throw ResourceError("ball too large for the packed kernel");
    sym_mask_ = (std::uint64_t{1} << bits_) - 1;
    pair_code_mask_.resize(static_cast<std::size_t>(h_));
    for (int p = 0; p < h_; ++p) {
      pair_code_mask_[static_cast<std::size_t>(p)] =
          (sym_mask_ << ((1 + 2 * p) * bits_)) | (sym_mask_ << ((2 + 2 * p) * bits_));
    }
    if (sites) scan(s, *sites);
  }

  int pairs() const { return h_; }
  const std::vector<Site>& half() const { return half_; }

  /// Code mask keeping the center and the pairs in `subset`.
  std::uint64_t code_mask(std::uint64_t subset) const {
    std::uint64_t cm = sym_mask_;
    for (int p = 0; p < h_; ++p) {
      if (subset >> p & 1U) cm |= pair_code_mask_[static_cast<std::size_t>(p)];
    }
    return cm;
  }

  /// log MPL for every subset of half-ball pairs, indexed by the subset bitmask.
  std::vector<double> log_mpl_all() {
    const std::uint64_t full = (std::uint64_t{1} << h_) - 1;
    std::vector<double> out(std::size_t{1} << h_, 0.0);
    levels_.assign(static_cast<std::size_t>(h_) + 1, {});
    counter_.reset(interior_.size() + rim_.size());
    for (const PackedEntry& e : interior_) counter_.add(e.code, e.count);
    extract(levels_[0]);
    out[full] = table_log_mpl(levels_[0]);
    descend(full, 0, out);
    return out;
  }

 private:
  struct RimSite {
    std::uint64_t code;
    std::uint64_t valid;  // pairs whose two offsets stay inside the region
  };

  void scan(const Sample& s, const Region& sites) {
    std::vector<Site> offs;
    for (const Site& v : half_) {
      offs.push_back(v);
      offs.push_back(-v);
    }
    const auto lin = linear_offsets(s.region, offs);
    const std::optional<Region> inner = shrink(s.region, radius_);  // sites whose whole ball fits
    FlatCounter interior;
    interior.reset(sites.volume());
    for_each_site(sites, s.region, [&](const Site& site, std::size_t idx) {
      std::uint64_t code = s.symbols[idx];
      if (inner && inner->contains(site)) {
        for (std::size_t j = 0; j < offs.size(); ++j) {
          const std::uint64_t sym = s.symbols[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + lin[j])];
          code |= sym << ((1 + j) * static_cast<std::size_t>(bits_));
        }
        interior.add(code, 1);
        return;
      }
      std::uint64_t valid = 0;
      for (int p = 0; p < h_; ++p) {
        bool both = true;
        for (int side = 0; side < 2; ++side) {
          const std::size_t j = static_cast<std::size_t>(2 * p + side);
          Site t = site + offs[j];
          if (!s.region.contains(t)) {
            both = false;
            continue;
          }
          const std::uint64_t sym = s.symbols[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + lin[j])];
          code |= sym << ((1 + j) * static_cast<std::size_t>(bits_));
        }
        if (both) valid |= std::uint64_t{1} << p;
      }
      rim_.push_back({code, valid});
    });
    interior.for_each([&](std::uint64_t code, std::uint64_t n) { interior_.push_back({code, n}); });
  }

  void extract(std::vector<PackedEntry>& dst) {
    dst.clear();
    dst.reserve(counter_.size());
    counter_.for_each([&](std::uint64_t code, std::uint64_t n) { dst.push_back({code, n}); });
  }

  double table_log_mpl(const std::vector<PackedEntry>& table) {
    CompensatedSum acc;
    marginal_.reset(table.size());
    const std::uint64_t drop_center = ~sym_mask_;
    for (const PackedEntry& e : table) {
      acc.add(xlogx(e.count));
      marginal_.add(e.code & drop_center, e.count);
    }
    marginal_.for_each([&](std::uint64_t, std::uint64_t n) { acc.add(-xlogx(n)); });
    return std::min(acc.value(), 0.0);
  }

  void descend(std::uint64_t subset, std::size_t depth, std::vector<double>& out) {
    const std::uint64_t full = (std::uint64_t{1} << h_) - 1;
    const int limit = subset == full ? h_ : std::countr_zero(~subset & full);
    for (int p = 0; p < limit; ++p) {
      if (!(subset >> p & 1U)) continue;
      const std::uint64_t child = subset & ~(std::uint64_t{1} << p);
      const std::uint64_t cm = code_mask(child);
      const std::vector<PackedEntry>& parent = levels_[depth];
      counter_.reset(parent.size() + rim_.size());
      for (const PackedEntry& e : parent) counter_.add(e.code & cm, e.count);
      for (const RimSite& r : rim_) {
        if ((child & ~r.valid) == 0 && !(r.valid >> p & 1U)) counter_.add(r.code & cm, 1);
      }
      extract(levels_[depth + 1]);
      out[child] = table_log_mpl(levels_[depth + 1]);
      descend(child, depth + 1, out);
    }
  }

  int radius_;
  int m_;
  int h_ = 0;
  int bits_ = 1;
  std::uint64_t sym_mask_ = 1;
  std::vector<Site> half_;
  std::vector<std::uint64_t> pair_code_mask_;
  std::vector<PackedEntry> interior_;
  std::vector<RimSite> rim_;
  std::vector<std::vector<PackedEntry>> levels_;
  FlatCounter counter_;
  FlatCounter marginal_;
};

}  // namespace mrfpic::detail
