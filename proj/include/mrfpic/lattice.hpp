#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mrfpic {

/// A point of Z^d in lattice units.
class Site {
 public:
  Site() = default;
  explicit Site(std::vector<int> coords) : coords_(std::move(coords)) {}
  Site(std::initializer_list<int> coords) : coords_(coords) {}

  static Site zero(int d) { return Site(std::vector<int>(static_cast<std::size_t>(d), 0)); }

  int dim() const { return static_cast<int>(coords_.size()); }
  int operator[](std::size_t k) const { return coords_[k]; }
  int& operator[](std::size_t k) { return coords_[k]; }
  const std::vector<int>& coords() const { return coords_; }

  /// Max norm.
  int norm() const {
    int r = 0;
    for (int c : coords_) r = std::max(r, c < 0 ? -c : c);
    return r;
  }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](int c) { return c == 0; });
  }

  /// First nonzero coordinate is positive.
  bool lex_positive() const {
    for (int c : coords_) {
      if (c != 0) return c > 0;
    }
    return false;
  }

  Site operator-() const {
    Site s = *this;
    for (int& c : s.coords_) c = -c;
    return s;
  }

  Site operator+(const Site& o) const {
    Site s = *this;
    for (std::size_t k = 0; k < coords_.size(); ++k) s.coords_[k] += o.coords_[k];
    return s;
  }

  Site operator-(const Site& o) const { return *this + (-o); }

  auto operator<=>(const Site&) const = default;
  bool operator==(const Site&) const = default;

  std::string to_string() const {
    std::string out = "(";
    for (std::size_t k = 0; k < coords_.size(); ++k) {
      if (k) out += ',';
      out += std::to_string(coords_[k]);
    }
    return out + ")";
  }

 private:
  std::vector<int> coords_;
};

/// Axis-aligned half-open box [lo, hi).
class Region {
 public:
  Region() = default;
  Region(Site lo, Site hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.dim() != hi_.dim() || lo_.dim() < 1) {
      throw ValidationError("region corners must share a dimension >= 1");
    }
    for (int k = 0; k < lo_.dim(); ++k) {
      if (hi_[k] <= lo_[k]) throw ValidationError("region must be nonempty on every axis");
    }
  }

  /// The box [0, dims).
  static Region from_dims(const std::vector<int>& dims) {
    return Region(Site::zero(static_cast<int>(dims.size())), Site(dims));
  }

  int dim() const { return lo_.dim(); }
  const Site& lo() const { return lo_; }
  const Site& hi() const { return hi_; }
  int extent(int k) const { return hi_[k] - lo_[k]; }

  std::vector<int> dims() const {
    std::vector<int> out(static_cast<std::size_t>(dim()));
    for (int k = 0; k < dim(); ++k) out[k] = extent(k);
    return out;
  }

  std::uint64_t volume() const {
    std::uint64_t v = 1;
    for (int k = 0; k < dim(); ++k) v *= static_cast<std::uint64_t>(extent(k));
    return v;
  }

  bool contains(const Site& s) const {
    for (int k = 0; k < dim(); ++k) {
      if (s[k] < lo_[k] || s[k] >= hi_[k]) return false;
    }
    return true;
  }

  bool contains(const Region& r) const {
    for (int k = 0; k < dim(); ++k) {
      if (r.lo_[k] < lo_[k] || r.hi_[k] > hi_[k]) return false;
    }
    return true;
  }

  /// Row-major offset of a contained site, last axis fastest.
  std::size_t linear_index(const Site& s) const {
    std::size_t idx = 0;
    for (int k = 0; k < dim(); ++k) {
      idx = idx * static_cast<std::size_t>(extent(k)) + static_cast<std::size_t>(s[k] - lo_[k]);
    }
    return idx;
  }

  Site site_at(std::size_t idx) const {
    Site s = lo_;
    for (int k = dim() - 1; k >= 0; --k) {
      const auto e = static_cast<std::size_t>(extent(k));
      s[k] = lo_[k] + static_cast<int>(idx % e);
      idx /= e;
    }
    return s;
  }

  /// Linear stride of one step along each axis.
  std::vector<std::ptrdiff_t> strides() const {
    std::vector<std::ptrdiff_t> st(static_cast<std::size_t>(dim()));
    std::ptrdiff_t s = 1;
    for (int k = dim() - 1; k >= 0; --k) {
      st[k] = s;
      s *= extent(k);
    }
    return st;
  }

  bool operator==(const Region&) const = default;

 private:
  Site lo_;
  Site hi_;
};

/// Central-symmetric finite set of nonzero offsets in canonical (lexicographic) order.
class Neighborhood {
 public:
  Neighborhood() = default;

  /// Empty neighborhood in dimension d.
  explicit Neighborhood(int d) : d_(d) {}

  /// Validates: nonzero, no duplicates, closed under negation.
  Neighborhood(int d, std::vector<Site> offsets) : d_(d), offsets_(std::move(offsets)) {
    std::sort(offsets_.begin(), offsets_.end());
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
      const Site& v = offsets_[i];
      if (v.dim() != d_) throw ValidationError("offset " + v.to_string() + " has wrong dimension");
      if (v.is_zero()) throw ValidationError("neighborhood must not contain the origin");
      if (i > 0 && offsets_[i - 1] == v) {
        throw ValidationError("duplicate offset " + v.to_string());
      }
    }
    for (const Site& v : offsets_) {
      if (!std::binary_search(offsets_.begin(), offsets_.end(), -v)) {
        throw ValidationError("neighborhood not central-symmetric: missing " + (-v).to_string());
      }
    }
    for (const Site& v : offsets_) radius_ = std::max(radius_, v.norm());
  }

  /// Union of the given offsets and their negatives.
  static Neighborhood symmetrized(int d, const std::vector<Site>& half) {
    std::vector<Site> all;
    for (const Site& v : half) {
      all.push_back(v);
      all.push_back(-v);
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return Neighborhood(d, std::move(all));
  }

  int dim() const { return d_; }
  int radius() const { return radius_; }
  std::size_t size() const { return offsets_.size(); }
  bool empty() const { return offsets_.empty(); }
  const std::vector<Site>& offsets() const { return offsets_; }

  bool contains(const Site& v) const { return std::binary_search(offsets_.begin(), offsets_.end(), v); }

  bool is_subset_of(const Neighborhood& o) const {
    return std::includes(o.offsets_.begin(), o.offsets_.end(), offsets_.begin(), offsets_.end());
  }

  /// Offsets with the first nonzero coordinate positive, in canonical order.
  std::vector<Site> half() const {
    std::vector<Site> h;
    for (const Site& v : offsets_) {
      if (v.lex_positive()) h.push_back(v);
    }
    return h;
  }

  /// Canonical text form "(a,b);(c,d)"; "{}" for the empty set.
  std::string to_string() const {
    if (offsets_.empty()) return "{}";
    std::string out;
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
      if (i) out += ';';
      out += offsets_[i].to_string();
    }
    return out;
  }

  bool operator==(const Neighborhood& o) const { return d_ == o.d_ && offsets_ == o.offsets_; }

 private:
  int d_ = 1;
  std::vector<Site> offsets_;
  int radius_ = 0;
};

/// Candidate ordering: by cardinality, then lexicographic on the offset list.
inline bool canonical_less(const Neighborhood& a, const Neighborhood& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.offsets() < b.offsets();
}

/// Half-width of the counting window: floor((log |region|)^(1/(2d))).
inline int window_width(const Region& region) {
  const double vol = static_cast<double>(region.volume());
  if (vol <= 1.0) return 0;
  const double w = std::pow(std::log(vol), 1.0 / (2.0 * region.dim()));
  return static_cast<int>(std::floor(w));
}

/// The region shrunk by the window width on every face; nullopt when the shrink exhausts an axis.
inline std::optional<Region> window(const Region& region) {
  const int w = window_width(region);
  Site lo = region.lo();
  Site hi = region.hi();
  for (int k = 0; k < region.dim(); ++k) {
    lo[k] += w;
    hi[k] -= w;
    if (hi[k] <= lo[k]) return std::nullopt;
  }
  return Region(lo, hi);
}

/// Radius R_n = floor(alpha^(1/(2d)) * ceil(log volume)^(1/(2d))), volume read as the window volume.
inline int radius_schedule(std::uint64_t volume, double alpha, int d) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in (0, 1]");
  if (volume < 1) throw ValidationError("volume must be at least 1");
  if (d < 1) throw ValidationError("dimension must be at least 1");
  const double ceil_log = std::ceil(std::log(static_cast<double>(volume)));
  const double e = 1.0 / (2.0 * d);
  return static_cast<int>(std::floor(std::pow(alpha, e) * std::pow(ceil_log, e)));
}

/// Positive half of the radius-R ball, in canonical order. Its size is ((2R+1)^d - 1)/2.
inline std::vector<Site> half_ball(int radius, int d) {
  if (radius < 0) throw ValidationError("radius must be nonnegative");
  if (d < 1) throw ValidationError("dimension must be at least 1");
  std::vector<Site> out;
  Site cur(std::vector<int>(static_cast<std::size_t>(d), -radius));
  while (true) {
    if (cur.lex_positive()) out.push_back(cur);
    int k = d - 1;
    while (k >= 0 && cur[k] == radius) {
      cur[k] = -radius;
      --k;
    }
    if (k < 0) break;
    ++cur[k];
  }
  return out;
}

inline constexpr std::uint64_t kDefaultCandidateCap = std::uint64_t{1} << 20;

/// Number of positive offsets h = ((2R+1)^d - 1)/2 in the radius-R ball.
inline std::uint64_t half_ball_size(int radius, int d) {
  std::uint64_t side = 2 * static_cast<std::uint64_t>(radius) + 1;
  std::uint64_t full = 1;
  for (int k = 0; k < d; ++k) {
    if (full > std::numeric_limits<std::uint64_t>::max() / side) throw OverflowError("ball size overflows");
    full *= side;
  }
  return (full - 1) / 2;
}

/// All central-symmetric neighborhoods of radius <= R, ordered by cardinality then lexicographically.
inline std::vector<Neighborhood> enumerate_neighborhoods(int radius, int d,
                                                         std::uint64_t cap = kDefaultCandidateCap) {
  const std::vector<Site> half = half_ball(radius, d);
  const std::size_t h = half.size();
  if (h >= 63 || (std::uint64_t{1} << h) > cap) {
    throw ResourceError("candidate family too large: 2^" + std::to_string(h) + " neighborhoods exceed the cap of " +
                        std::to_string(cap));
  }
  std::vector<Neighborhood> out;
  out.reserve(std::size_t{1} << h);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << h); ++mask) {
    std::vector<Site> chosen;
    for (std::size_t p = 0; p < h; ++p) {
      if (mask >> p & 1U) chosen.push_back(half[p]);
    }
    out.push_back(Neighborhood::symmetrized(d, chosen));
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) throw OverflowError("block count overflows 64 bits");
  return a * b;
}

}  // namespace detail

/// Exact number of pairs (Gamma, a(Gamma u {0})) over all Gamma with radius <= R: m * (m^2 + 1)^h.
inline std::uint64_t block_count_exact(int radius, int d, int m) {
  if (radius < 0) throw ValidationError("radius must be nonnegative");
  if (m < 2) throw ValidationError("alphabet size must be at least 2");
  const std::uint64_t h = half_ball_size(radius, d);
  const std::uint64_t base = detail::checked_mul(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(m)) + 1;
  std::uint64_t out = static_cast<std::uint64_t>(m);
  for (std::uint64_t i = 0; i < h; ++i) out = detail::checked_mul(out, base);
  return out;
}

/// Upper bound (m^2 + 1)^((2R+1)^d / 2) on the same count.
inline double block_count_bound(int radius, int d, int m) {
  const double side = 2.0 * radius + 1.0;
  return std::pow(static_cast<double>(m) * m + 1.0, std::pow(side, d) / 2.0);
}

}  // namespace mrfpic
