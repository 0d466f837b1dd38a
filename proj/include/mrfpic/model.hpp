#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "block_key.hpp"
#include "errors.hpp"
#include "lattice.hpp"

namespace mrfpic {

struct PairTerm {
  Site offset;
  double coupling = 0.0;
};

/// Pair potential with an optional single-site field.
///
/// For m = 2 symbols act as spins (0 -> -1, 1 -> +1) and a pair contributes coupling * s(a) * s(b);
/// for m >= 3 a pair contributes coupling * [a == b]. The conditional law of a site is proportional
/// to exp(field[a] + sum over v in Gamma0 of coupling(v) * J(a, x(v))).
class Potential {
 public:
  Potential() = default;

  Potential(int d, int m, std::vector<PairTerm> terms, std::vector<double> field = {}, int declared_range = 0,
            std::string id = "custom")
      : d_(d), m_(m), terms_(std::move(terms)), field_(std::move(field)), id_(std::move(id)) {
    if (d_ < 1) throw ValidationError("dimension must be at least 1");
    if (m_ < 2 || m_ > 256) throw ValidationError("alphabet size must lie in [2, 256]");
    if (field_.empty()) field_.assign(static_cast<std::size_t>(m_), 0.0);
    if (static_cast<int>(field_.size()) != m_) throw ValidationError("field must have one weight per symbol");
    int max_norm = 0;
    for (PairTerm& t : terms_) {
      if (t.offset.dim() != d_) throw ValidationError("pair offset " + t.offset.to_string() + " has wrong dimension");
      if (t.offset.is_zero()) throw ValidationError("pair offset must be nonzero");
      if (!t.offset.lex_positive()) t.offset = -t.offset;
      if (!std::isfinite(t.coupling)) throw ValidationError("coupling must be finite");
      max_norm = std::max(max_norm, t.offset.norm());
    }
    std::sort(terms_.begin(), terms_.end(), [](const PairTerm& a, const PairTerm& b) { return a.offset < b.offset; });
    for (std::size_t i = 1; i < terms_.size(); ++i) {
      if (terms_[i].offset == terms_[i - 1].offset) {
        throw ValidationError("duplicate pair offset " + terms_[i].offset.to_string());
      }
    }
    range_ = declared_range > 0 ? declared_range : std::max(1, max_norm);
    if (max_norm > range_) throw ValidationError("pair offset exceeds the declared range");

    std::vector<Site> nonzero;
    for (const PairTerm& t : terms_) {
      if (t.coupling != 0.0) nonzero.push_back(t.offset);
    }
    gamma0_ = Neighborhood::symmetrized(d_, nonzero);
    gamma0_coupling_.resize(gamma0_.size());
    for (std::size_t j = 0; j < gamma0_.size(); ++j) {
      const Site& v = gamma0_.offsets()[j];
      const Site canon = v.lex_positive() ? v : -v;
      for (const PairTerm& t : terms_) {
        if (t.offset == canon) gamma0_coupling_[j] = t.coupling;
      }
    }
  }

  /// Ising model with coupling beta on the axis offsets k*e_j (k <= range), or on the whole ball.
  static Potential ising(int d, double beta, int range = 1, bool whole_ball = false, double field = 0.0) {
    return Potential(d, 2, uniform_terms(d, beta, range, whole_ball), {-field, field}, range, "ising");
  }

  /// Potts model: coupling beta * [a == b] on the same offset families as ising().
  static Potential potts(int d, int m, double beta, int range = 1, bool whole_ball = false) {
    return Potential(d, m, uniform_terms(d, beta, range, whole_ball), {}, range, "potts");
  }

  int dim() const { return d_; }
  int alphabet() const { return m_; }
  int range() const { return range_; }
  const std::string& id() const { return id_; }
  const std::vector<PairTerm>& terms() const { return terms_; }
  const std::vector<double>& field() const { return field_; }

  /// Gamma0: offsets with nonzero coupling and their negatives.
  const Neighborhood& interaction_neighborhood() const { return gamma0_; }

  /// Coupling of each Gamma0 offset, aligned with its canonical order.
  const std::vector<double>& gamma0_couplings() const { return gamma0_coupling_; }

  double pair_interaction(int a, int b) const {
    if (m_ == 2) return static_cast<double>((2 * a - 1) * (2 * b - 1));
    return a == b ? 1.0 : 0.0;
  }

  /// Conditional law of the center given the Gamma0 block (symbols in canonical offset order).
  std::vector<double> conditional(std::span<const std::uint8_t> neighbors) const {
    std::vector<double> out(static_cast<std::size_t>(m_));
    conditional_into(neighbors, out);
    return out;
  }

  void conditional_into(std::span<const std::uint8_t> neighbors, std::span<double> out) const {
    double hi = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < m_; ++a) {
      double e = field_[static_cast<std::size_t>(a)];
      for (std::size_t j = 0; j < neighbors.size(); ++j) {
        e += gamma0_coupling_[j] * pair_interaction(a, neighbors[j]);
      }
      out[static_cast<std::size_t>(a)] = e;
      hi = std::max(hi, e);
    }
    double z = 0.0;
    for (int a = 0; a < m_; ++a) {
      out[static_cast<std::size_t>(a)] = std::exp(out[static_cast<std::size_t>(a)] - hi);
      z += out[static_cast<std::size_t>(a)];
    }
    for (int a = 0; a < m_; ++a) out[static_cast<std::size_t>(a)] /= z;
  }

 private:
  static std::vector<PairTerm> uniform_terms(int d, double beta, int range, bool whole_ball) {
    if (range < 1) throw ValidationError("range must be at least 1");
    std::vector<PairTerm> terms;
    if (whole_ball) {
      for (const Site& v : half_ball(range, d)) terms.push_back({v, beta});
    } else {
      for (int j = 0; j < d; ++j) {
        for (int k = 1; k <= range; ++k) {
          Site v = Site::zero(d);
          v[static_cast<std::size_t>(j)] = k;
          terms.push_back({v, beta});
        }
      }
    }
    return terms;
  }

  int d_ = 1;
  int m_ = 2;
  std::vector<PairTerm> terms_;
  std::vector<double> field_;
  int range_ = 1;
  std::string id_;
  Neighborhood gamma0_;
  std::vector<double> gamma0_coupling_;
};

/// Conditional table Q(a | a(Gamma)) keyed by the conditioning block.
///
/// Rows built from a potential are complete and strictly positive. Empirical tables only carry rows
/// for observed blocks and may contain zeros.
class Specification {
 public:
  Specification() = default;
  Specification(Neighborhood gamma, int m) : gamma_(std::move(gamma)), m_(m) {}

  const Neighborhood& gamma() const { return gamma_; }
  int alphabet() const { return m_; }
  const std::map<BlockKey, std::vector<double>>& rows() const { return rows_; }

  void set_row(const BlockKey& block, std::vector<double> probs) {
    if (block.length() != static_cast<int>(gamma_.size())) throw ValidationError("row key length mismatch");
    if (static_cast<int>(probs.size()) != m_) throw ValidationError("row must have one entry per symbol");
    rows_[block] = std::move(probs);
  }

  const std::vector<double>* row(const BlockKey& block) const {
    auto it = rows_.find(block);
    return it == rows_.end() ? nullptr : &it->second;
  }

  /// Q(center | block); 0 for a block without a row.
  double probability(const BlockKey& block, int center) const {
    const auto* r = row(block);
    return r ? (*r)[static_cast<std::size_t>(center)] : 0.0;
  }

  /// Q(center | block) where the block is given on a neighborhood containing this table's gamma.
  double probability_on(const Neighborhood& wider, std::span<const std::uint8_t> wider_block, int center) const {
    std::vector<std::uint8_t> own;
    own.reserve(gamma_.size());
    std::size_t j = 0;
    for (const Site& v : gamma_.offsets()) {
      while (j < wider.size() && wider.offsets()[j] < v) ++j;
      if (j == wider.size() || !(wider.offsets()[j] == v)) {
        throw ValidationError("neighborhood " + wider.to_string() + " does not contain " + gamma_.to_string());
      }
      own.push_back(wider_block[j]);
    }
    return probability(BlockKey::encode(own, m_), center);
  }

  double q_min() const {
    double q = 1.0;
    for (const auto& [k, r] : rows_) {
      for (double p : r) q = std::min(q, p);
    }
    return q;
  }

  /// Every row sums to one within tol.
  bool normalized(double tol = 1e-12) const {
    for (const auto& [k, r] : rows_) {
      double s = 0.0;
      for (double p : r) s += p;
      if (std::abs(s - 1.0) > tol) return false;
    }
    return true;
  }

 private:
  Neighborhood gamma_;
  int m_ = 2;
  std::map<BlockKey, std::vector<double>> rows_;
};

inline constexpr std::uint64_t kMaxSpecificationRows = std::uint64_t{1} << 22;

/// Full one-point specification on Gamma0 induced by the potential.
inline Specification spec_from_potential(const Potential& p) {
  const Neighborhood& g = p.interaction_neighborhood();
  const int m = p.alphabet();
  double rows = std::pow(static_cast<double>(m), static_cast<double>(g.size()));
  if (rows > static_cast<double>(kMaxSpecificationRows)) {
    throw ResourceError("specification table has too many rows (" + std::to_string(rows) + ")");
  }
  Specification spec(g, m);
  std::vector<std::uint8_t> block(g.size(), 0);
  while (true) {
    spec.set_row(BlockKey::encode(block, m), p.conditional(block));
    std::size_t k = block.size();
    while (k > 0 && block[k - 1] == m - 1) block[--k] = 0;
    if (k == 0) break;
    ++block[k - 1];
  }
  return spec;
}

/// Strict upper bound on alpha for which the radius schedule excludes overestimation:
/// q_min / (2^(3d) e) * (m - 1) / (m^2 log(m^2 + 1)).
inline double alpha_bound(double q_min, int d, int m) {
  if (!(q_min > 0.0) || q_min > 1.0 / m + 1e-15) throw ValidationError("q_min must lie in (0, 1/m]");
  const double mm = static_cast<double>(m) * m;
  return q_min / (std::pow(2.0, 3.0 * d) * std::numbers::e) * (m - 1.0) / (mm * std::log(mm + 1.0));
}

/// Exact Gibbs distribution of a potential on a small finite box, by enumeration.
///
/// Configurations are indexed in base m with site s (row-major) as digit s, least significant first.
class ExactJoint {
 public:
  ExactJoint(std::vector<int> dims, int m, std::vector<double> probs)
      : dims_(std::move(dims)), m_(m), probs_(std::move(probs)) {
    sites_ = 1;
    for (int l : dims_) sites_ *= static_cast<std::size_t>(l);
    pow_.assign(sites_ + 1, 1);
    for (std::size_t s = 1; s <= sites_; ++s) pow_[s] = pow_[s - 1] * static_cast<std::uint64_t>(m_);
  }

  const std::vector<int>& dims() const { return dims_; }
  int alphabet() const { return m_; }
  std::size_t sites() const { return sites_; }
  std::uint64_t states() const { return probs_.size(); }
  double probability(std::uint64_t config) const { return probs_[config]; }
  const std::vector<double>& probabilities() const { return probs_; }

  int symbol(std::uint64_t config, std::size_t site) const { return static_cast<int>(config / pow_[site] % m_); }

  std::uint64_t with_symbol(std::uint64_t config, std::size_t site, int a) const {
    return config - static_cast<std::uint64_t>(symbol(config, site)) * pow_[site] +
           static_cast<std::uint64_t>(a) * pow_[site];
  }

  /// Joint marginal of the listed sites, indexed in base m with the first listed site most significant.
  std::vector<double> marginal(const std::vector<std::size_t>& sites) const {
    std::uint64_t cells = 1;
    for (std::size_t i = 0; i < sites.size(); ++i) cells *= static_cast<std::uint64_t>(m_);
    std::vector<double> out(cells, 0.0);
    for (std::uint64_t c = 0; c < probs_.size(); ++c) {
      std::uint64_t idx = 0;
      for (std::size_t s : sites) idx = idx * static_cast<std::uint64_t>(m_) + static_cast<std::uint64_t>(symbol(c, s));
      out[idx] += probs_[c];
    }
    return out;
  }

  /// Q(a(delta) | a(phi)) for disjoint site lists.
  double conditional(const std::vector<std::size_t>& delta, const std::vector<int>& a_delta,
                     const std::vector<std::size_t>& phi, const std::vector<int>& a_phi) const {
    double joint = 0.0;
    double cond = 0.0;
    for (std::uint64_t c = 0; c < probs_.size(); ++c) {
      bool match_phi = true;
      for (std::size_t i = 0; i < phi.size() && match_phi; ++i) match_phi = symbol(c, phi[i]) == a_phi[i];
      if (!match_phi) continue;
      cond += probs_[c];
      bool match_delta = true;
      for (std::size_t i = 0; i < delta.size() && match_delta; ++i) match_delta = symbol(c, delta[i]) == a_delta[i];
      if (match_delta) joint += probs_[c];
    }
    return joint / cond;
  }

  /// Law of the symbol at `site` given every other site of `config`.
  std::vector<double> single_site_conditional(std::uint64_t config, std::size_t site) const {
    std::vector<double> out(static_cast<std::size_t>(m_));
    double z = 0.0;
    for (int a = 0; a < m_; ++a) {
      out[static_cast<std::size_t>(a)] = probs_[with_symbol(config, site, a)];
      z += out[static_cast<std::size_t>(a)];
    }
    for (double& v : out) v /= z;
    return out;
  }

 private:
  std::vector<int> dims_;
  int m_;
  std::vector<double> probs_;
  std::size_t sites_ = 0;
  std::vector<std::uint64_t> pow_;
};

inline constexpr std::uint64_t kMaxExactStates = std::uint64_t{1} << 20;

/// Brute-force Gibbs distribution on the box `dims`, periodic or free boundary.
inline ExactJoint exact_joint_tiny(const Potential& p, const std::vector<int>& dims, bool periodic = true) {
  if (static_cast<int>(dims.size()) != p.dim()) throw ValidationError("dims must match the potential's dimension");
  const Region box = Region::from_dims(dims);
  const std::size_t n = box.volume();
  const int m = p.alphabet();
  double states_d = std::pow(static_cast<double>(m), static_cast<double>(n));
  if (states_d > static_cast<double>(kMaxExactStates)) {
    throw ResourceError("exact enumeration limited to " + std::to_string(kMaxExactStates) + " configurations");
  }
  if (periodic) {
    for (int l : dims) {
      if (l <= 2 * p.range()) throw ValidationError("axis too small for the interaction range on a torus");
    }
  }
  const auto states = static_cast<std::uint64_t>(std::llround(states_d));

  // Bonds (i, j, coupling), each unordered pair once.
  struct Bond {
    std::size_t i, j;
    double c;
  };
  std::vector<Bond> bonds;
  for (std::size_t i = 0; i < n; ++i) {
    const Site si = box.site_at(i);
    for (const PairTerm& t : p.terms()) {
      if (t.coupling == 0.0) continue;
      Site sj = si + t.offset;
      bool inside = true;
      for (int k = 0; k < box.dim(); ++k) {
        if (periodic) {
          sj[k] = ((sj[k] % dims[k]) + dims[k]) % dims[k];
        } else if (sj[k] < 0 || sj[k] >= dims[k]) {
          inside = false;
        }
      }
      if (inside) bonds.push_back({i, box.linear_index(sj), t.coupling});
    }
  }

  std::vector<double> energy(states);
  std::vector<int> sym(n);
  double hi = -std::numeric_limits<double>::infinity();
  for (std::uint64_t c = 0; c < states; ++c) {
    std::uint64_t x = c;
    double e = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      sym[s] = static_cast<int>(x % static_cast<std::uint64_t>(m));
      x /= static_cast<std::uint64_t>(m);
      e += p.field()[static_cast<std::size_t>(sym[s])];
    }
    for (const Bond& b : bonds) e += b.c * p.pair_interaction(sym[b.i], sym[b.j]);
    energy[c] = e;
    hi = std::max(hi, e);
  }
  double z = 0.0;
  for (double& e : energy) {
    e = std::exp(e - hi);
    z += e;
  }
  for (double& e : energy) e /= z;
  return ExactJoint(dims, m, std::move(energy));
}

}  // namespace mrfpic
