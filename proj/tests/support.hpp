#pragma once

// Brute-force oracles and random fixtures shared by the test binaries.

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "mrfpic/mrfpic.hpp"

namespace mrfpic::fixtures {

using BlockMap = std::map<std::vector<std::uint8_t>, std::uint64_t>;

inline Sample random_sample(std::mt19937_64& rng, const std::vector<int>& dims, int m) {
  const Region r = Region::from_dims(dims);
  std::vector<std::uint8_t> sym(r.volume());
  std::uniform_int_distribution<int> pick(0, m - 1);
  for (auto& x : sym) x = static_cast<std::uint8_t>(pick(rng));
  return Sample(r, m, std::move(sym));
}

/// Recounts blocks by visiting every site of `sites` and checking each translate by hand.
inline BlockMap naive_count(const Sample& s, const Neighborhood& gamma, const std::optional<Region>& sites) {
  BlockMap out;
  if (!sites) return out;
  for (std::size_t i = 0; i < s.region.volume(); ++i) {
    const Site x = s.region.site_at(i);
    if (!sites->contains(x)) continue;
    std::vector<std::uint8_t> block;
    bool inside = true;
    for (const Site& v : gamma.offsets()) {
      const Site y = x + v;
      if (!s.region.contains(y)) {
        inside = false;
        break;
      }
      block.push_back(s.at(y));
    }
    if (!inside) continue;
    block.push_back(s.at(x));
    ++out[block];
  }
  return out;
}

inline BlockMap as_map(const CountTable& t) {
  BlockMap out;
  for (const auto& [k, n] : t.counts()) out[k.decode(t.alphabet())] = n;
  return out;
}

/// Random strictly positive specification covering every block on gamma.
inline Specification random_specification(std::mt19937_64& rng, const Neighborhood& gamma, int m) {
  Specification spec(gamma, m);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<std::uint8_t> block(gamma.size(), 0);
  while (true) {
    std::vector<double> row(static_cast<std::size_t>(m));
    double z = 0.0;
    for (double& p : row) z += (p = u(rng));
    for (double& p : row) p /= z;
    spec.set_row(BlockKey::encode(block, m), row);
    std::size_t k = block.size();
    while (k > 0 && block[k - 1] == m - 1) block[--k] = 0;
    if (k == 0) break;
    ++block[k - 1];
  }
  return spec;
}

inline Neighborhood nn2() { return Neighborhood::symmetrized(2, {Site({0, 1}), Site({1, 0})}); }

}  // namespace mrfpic::fixtures
