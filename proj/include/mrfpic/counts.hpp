#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "block_key.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "sampler.hpp"

namespace mrfpic {

/// Counts N(a(Gamma, 0)) of blocks centered in the window, keyed by BlockKey (center last).
class CountTable {
 public:
  using Map = std::unordered_map<BlockKey, std::uint64_t, BlockKeyHash>;

  CountTable() = default;
  CountTable(Neighborhood gamma, int m, int window_width)
      : gamma_(std::move(gamma)), m_(m), window_width_(window_width) {}

  const Neighborhood& gamma() const { return gamma_; }
  int alphabet() const { return m_; }
  /// Width the sample region was shrunk by to get the counted sites (the window width by default).
  int window_width() const { return window_width_; }
  std::uint64_t total() const { return total_; }
  const Map& counts() const { return counts_; }
  std::size_t distinct() const { return counts_.size(); }

  void add(const BlockKey& key, std::uint64_t n = 1) {
    if (n == 0) return;
    counts_[key] += n;
    total_ += n;
  }

  std::uint64_t count(const BlockKey& key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }

  /// N(a(Gamma)) for every observed conditioning block.
  std::map<BlockKey, std::uint64_t> marginal() const {
    std::map<BlockKey, std::uint64_t> out;
    for (const auto& [k, n] : counts_) out[k.drop_last(m_)] += n;
    return out;
  }

  /// Entries in key order.
  std::vector<std::pair<BlockKey, std::uint64_t>> sorted() const {
    std::vector<std::pair<BlockKey, std::uint64_t>> out(counts_.begin(), counts_.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

  void merge(const CountTable& other) {
    if (!(other.gamma_ == gamma_) || other.m_ != m_) throw ValidationError("cannot merge tables of different shape");
    for (const auto& [k, n] : other.counts_) add(k, n);
  }

  bool operator==(const CountTable& o) const {
    return gamma_ == o.gamma_ && m_ == o.m_ && total_ == o.total_ && counts_ == o.counts_;
  }

 private:
  Neighborhood gamma_;
  int m_ = 2;
  int window_width_ = 0;
  Map counts_;
  std::uint64_t total_ = 0;
};

namespace detail {

/// Visits every site of `box` in row-major order, passing the site and its index in `outer`.
template <typename F>
void for_each_site(const Region& box, const Region& outer, F&& f) {
  const int d = box.dim();
  Site cur = box.lo();
  while (true) {
    f(cur, outer.linear_index(cur));
    int k = d - 1;
    while (k >= 0 && cur[k] + 1 == box.hi()[k]) {
      cur[k] = box.lo()[k];
      --k;
    }
    if (k < 0) break;
    ++cur[k];
  }
}

/// Linear index displacement of each offset in `region`'s layout.
inline std::vector<std::ptrdiff_t> linear_offsets(const Region& region, const std::vector<Site>& offsets) {
  const auto st = region.strides();
  std::vector<std::ptrdiff_t> out;
  out.reserve(offsets.size());
  for (const Site& v : offsets) {
    std::ptrdiff_t o = 0;
    for (int k = 0; k < region.dim(); ++k) o += static_cast<std::ptrdiff_t>(v[k]) * st[k];
    out.push_back(o);
  }
  return out;
}

/// Whether site + v lies in region for every offset v.
inline bool translate_inside(const Region& region, const Site& site, const std::vector<Site>& offsets) {
  for (const Site& v : offsets) {
    for (int k = 0; k < region.dim(); ++k) {
      const int c = site[k] + v[k];
      if (c < region.lo()[k] || c >= region.hi()[k]) return false;
    }
  }
  return true;
}

/// Counts over the sites of `sites` (a sub-box of the window), honoring the Gamma^i inside restriction.
inline void count_into(CountTable& table, const Sample& s, const Region& sites) {
  const auto& offs = table.gamma().offsets();
  const auto lin = linear_offsets(s.region, offs);
  std::vector<std::uint8_t> block(offs.size() + 1);
  for_each_site(sites, s.region, [&](const Site& site, std::size_t idx) {
    if (!translate_inside(s.region, site, offs)) return;
    for (std::size_t j = 0; j < offs.size(); ++j) {
      block[j] = s.symbols[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + lin[j])];
    }
    block.back() = s.symbols[idx];
    table.add(BlockKey::encode(block, s.alphabet));
  });
}

}  // namespace detail

/// The sample region shrunk by `width` on every face; nullopt when an axis is exhausted.
inline std::optional<Region> shrink(const Region& region, int width) {
  Site lo = region.lo();
  Site hi = region.hi();
  for (int k = 0; k < region.dim(); ++k) {
    lo[k] += width;
    hi[k] -= width;
    if (hi[k] <= lo[k]) return std::nullopt;
  }
  return Region(lo, hi);
}

/// N(a(Gamma, 0)) over window sites i whose translate Gamma^i lies inside the sample region.
inline CountTable count_blocks(const Sample& s, const Neighborhood& gamma) {
  if (gamma.dim() != s.dim()) throw ValidationError("neighborhood dimension does not match the sample");
  CountTable table(gamma, s.alphabet, window_width(s.region));
  if (auto win = window(s.region)) detail::count_into(table, s, *win);
  return table;
}

/// Same counts over the region shrunk by `width` instead of the window width.
/// With width >= r(Gamma) every counted site has its whole translate inside the region.
inline CountTable count_blocks(const Sample& s, const Neighborhood& gamma, int width) {
  if (gamma.dim() != s.dim()) throw ValidationError("neighborhood dimension does not match the sample");
  if (width < 0) throw ValidationError("counting width must be nonnegative");
  CountTable table(gamma, s.alphabet, width);
  if (auto box = shrink(s.region, width)) detail::count_into(table, s, *box);
  return table;
}

/// Marginalizes a table counted on a larger neighborhood down to `gamma`.
///
/// Requires gamma's offsets to be contained in the source's and the source radius to be within the
/// window width, so both tables count the same sites.
inline CountTable project(const CountTable& full, const Neighborhood& gamma) {
  if (!gamma.is_subset_of(full.gamma())) {
    throw ValidationError("projection target " + gamma.to_string() + " is not contained in " +
                          full.gamma().to_string());
  }
  if (full.gamma().radius() > full.window_width()) {
    throw ValidationError("projection needs the source radius (" + std::to_string(full.gamma().radius()) +
                          ") within the window width (" + std::to_string(full.window_width()) + ")");
  }
  const int m = full.alphabet();
  std::vector<std::size_t> keep;
  {
    std::size_t j = 0;
    for (const Site& v : gamma.offsets()) {
      while (!(full.gamma().offsets()[j] == v)) ++j;
      keep.push_back(j);
    }
  }
  keep.push_back(full.gamma().size());  // center
  CountTable out(gamma, m, full.window_width());
  std::vector<std::uint8_t> block(keep.size());
  for (const auto& [key, n] : full.counts()) {
    const auto src = key.decode(m);
    for (std::size_t j = 0; j < keep.size(); ++j) block[j] = src[keep[j]];
    out.add(BlockKey::encode(block, m), n);
  }
  return out;
}

/// Per-offset tables over the sieve classes i = k (mod 4R+1), k in [-2R, 2R]^d.
struct SieveCounts {
  int radius = 0;
  std::map<Site, CountTable> by_offset;

  int period() const { return 4 * radius + 1; }

  /// Sum of all per-offset tables.
  CountTable combined() const {
    CountTable out;
    bool first = true;
    for (const auto& [k, t] : by_offset) {
      if (first) {
        out = CountTable(t.gamma(), t.alphabet(), t.window_width());
        first = false;
      }
      out.merge(t);
    }
    return out;
  }
};

/// Sieve class representative of site i: each coordinate reduced mod 4R+1 into [-2R, 2R].
inline Site sieve_offset(const Site& i, int radius) {
  const int p = 4 * radius + 1;
  Site k = i;
  for (int a = 0; a < i.dim(); ++a) {
    int r = ((i[a] % p) + p) % p;
    if (r > 2 * radius) r -= p;
    k[a] = r;
  }
  return k;
}

inline SieveCounts count_sieves(const Sample& s, const Neighborhood& gamma, int radius) {
  if (radius < 0) throw ValidationError("sieve radius must be nonnegative");
  if (gamma.dim() != s.dim()) throw ValidationError("neighborhood dimension does not match the sample");
  SieveCounts out;
  out.radius = radius;
  const int w = window_width(s.region);
  for (const Site& k : [&] {
         std::vector<Site> ks{Site::zero(s.dim())};
         for (const Site& v : half_ball(2 * radius, s.dim())) {
           ks.push_back(v);
           ks.push_back(-v);
         }
         std::sort(ks.begin(), ks.end());
         return ks;
       }()) {
    out.by_offset.emplace(k, CountTable(gamma, s.alphabet, w));
  }
  const auto win = window(s.region);
  if (!win) return out;
  const auto& offs = gamma.offsets();
  const auto lin = detail::linear_offsets(s.region, offs);
  std::vector<std::uint8_t> block(offs.size() + 1);
  detail::for_each_site(*win, s.region, [&](const Site& site, std::size_t idx) {
    if (!detail::translate_inside(s.region, site, offs)) return;
    for (std::size_t j = 0; j < offs.size(); ++j) {
      block[j] = s.symbols[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + lin[j])];
    }
    block.back() = s.symbols[idx];
    out.by_offset.at(sieve_offset(site, radius)).add(BlockKey::encode(block, s.alphabet));
  });
  return out;
}

}  // namespace mrfpic
