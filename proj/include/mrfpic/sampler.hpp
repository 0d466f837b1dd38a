#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lattice.hpp"
#include "model.hpp"

namespace mrfpic {

/// Symbols observed on a box region, row-major with the last axis fastest.
struct Sample {
  Region region;
  int alphabet = 2;
  std::vector<std::uint8_t> symbols;

  // Provenance; zero/empty for samples read from foreign files.
  std::uint64_t seed = 0;
  int sweeps = 0;
  int burn_in = 0;
  std::string model_id;

  Sample() = default;
  Sample(Region r, int m, std::vector<std::uint8_t> s) : region(std::move(r)), alphabet(m), symbols(std::move(s)) {
    validate();
  }

  int dim() const { return region.dim(); }

  std::uint8_t at(const Site& s) const { return symbols[region.linear_index(s)]; }

  void validate() const {
    if (alphabet < 2 || alphabet > 256) throw ValidationError("alphabet size must lie in [2, 256]");
    if (symbols.size() != region.volume()) throw ValidationError("symbol count does not match the region volume");
    for (std::uint8_t s : symbols) {
      if (s >= alphabet) throw ValidationError("symbol " + std::to_string(s) + " outside the alphabet");
    }
  }
};

/// splitmix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for replicate `index` of a run with master seed `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Single-site heat-bath chain on a torus.
class GibbsChain {
 public:
  GibbsChain(Potential potential, std::vector<int> dims, std::uint64_t seed)
      : potential_(std::move(potential)), dims_(std::move(dims)), rng_(seed) {
    if (static_cast<int>(dims_.size()) != potential_.dim()) {
      throw ValidationError("dims have " + std::to_string(dims_.size()) + " axes but the potential has d=" +
                            std::to_string(potential_.dim()));
    }
    for (int l : dims_) {
      if (l <= 2 * potential_.range()) {
        throw ValidationError("axis too small: every axis length must exceed 2*range = " +
                              std::to_string(2 * potential_.range()));
      }
    }
    const Region box = Region::from_dims(dims_);
    n_ = box.volume();
    const Neighborhood& g = potential_.interaction_neighborhood();
    k_ = g.size();
    neighbors_.resize(n_ * k_);
    for (std::size_t i = 0; i < n_; ++i) {
      const Site si = box.site_at(i);
      for (std::size_t j = 0; j < k_; ++j) {
        Site sj = si + g.offsets()[j];
        for (int a = 0; a < box.dim(); ++a) sj[a] = ((sj[a] % dims_[a]) + dims_[a]) % dims_[a];
        neighbors_[i * k_ + j] = static_cast<std::uint32_t>(box.linear_index(sj));
      }
    }
    const int m = potential_.alphabet();
    state_.resize(n_);
    for (auto& s : state_) s = static_cast<std::uint8_t>(unit_uniform(rng_) * m);
    block_.resize(k_);
    probs_.resize(static_cast<std::size_t>(m));
  }

  const std::vector<std::uint8_t>& state() const { return state_; }
  std::vector<std::uint8_t>& mutable_state() { return state_; }
  const std::vector<int>& dims() const { return dims_; }
  const Potential& potential() const { return potential_; }
  std::size_t sites() const { return n_; }

  /// Conditional law of site i given the current configuration.
  std::vector<double> site_conditional(std::size_t i) const {
    std::vector<std::uint8_t> block(k_);
    for (std::size_t j = 0; j < k_; ++j) block[j] = state_[neighbors_[i * k_ + j]];
    return potential_.conditional(block);
  }

  /// Redraw site i from its conditional law.
  void update(std::size_t i) {
    for (std::size_t j = 0; j < k_; ++j) block_[j] = state_[neighbors_[i * k_ + j]];
    potential_.conditional_into(block_, probs_);
    const double u = unit_uniform(rng_);
    const int m = potential_.alphabet();
    double acc = 0.0;
    int pick = m - 1;
    for (int a = 0; a < m - 1; ++a) {
      acc += probs_[static_cast<std::size_t>(a)];
      if (u < acc) {
        pick = a;
        break;
      }
    }
    state_[i] = static_cast<std::uint8_t>(pick);
  }

  /// One raster-scan sweep over all sites.
  void sweep() {
    for (std::size_t i = 0; i < n_; ++i) update(i);
  }

 private:
  Potential potential_;
  std::vector<int> dims_;
  std::mt19937_64 rng_;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<std::uint32_t> neighbors_;
  std::vector<std::uint8_t> state_;
  std::vector<std::uint8_t> block_;
  std::vector<double> probs_;
};

/// Final configuration after burn_in + sweeps heat-bath sweeps on the torus `dims`, seen as a sample on [0, dims).
inline Sample gibbs_sample(const Potential& p, const std::vector<int>& dims, int sweeps, int burn_in,
                           std::uint64_t seed) {
  if (sweeps < 1) throw ValidationError("sweeps must be at least 1");
  if (burn_in < 0) throw ValidationError("burn-in must be nonnegative");
  GibbsChain chain(p, dims, seed);
  for (int s = 0; s < burn_in + sweeps; ++s) chain.sweep();
  Sample out(Region::from_dims(dims), p.alphabet(), chain.state());
  out.seed = seed;
  out.sweeps = sweeps;
  out.burn_in = burn_in;
  out.model_id = p.id();
  return out;
}

}  // namespace mrfpic
