#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "errors.hpp"

namespace mrfpic {

/// Packed code of a symbol tuple in base m, first symbol most significant.
///
/// Tuples that fit in 128 bits (m = 2 up to 128 symbols, m = 3 up to 80) are stored as an integer
/// code; longer tuples fall back to a byte string of the symbols. For a block a(Gamma, 0) the
/// center symbol is last, so dropping the final digit yields the conditioning block a(Gamma).
class BlockKey {
 public:
  using u128 = unsigned __int128;

  BlockKey() = default;

  /// Longest tuple length whose base-m code fits in 128 bits.
  static int packed_capacity(int m) {
    static const std::vector<int> table = [] {
      std::vector<int> t(257, 0);
      const u128 max = ~u128{0};
      for (int base = 2; base <= 256; ++base) {
        const auto b = static_cast<u128>(base);
        u128 p = 1;
        int n = 0;
        while (p <= max / b) {
          p *= b;
          ++n;
        }
        if (p * b == 0) ++n;  // base^(n+1) == 2^128 exactly
        t[static_cast<std::size_t>(base)] = n;
      }
      return t;
    }();
    return table[static_cast<std::size_t>(m)];
  }

  static BlockKey encode(std::span<const std::uint8_t> symbols, int m) {
    if (m < 2 || m > 256) throw ValidationError("alphabet size must lie in [2, 256]");
    BlockKey k;
    k.length_ = static_cast<int>(symbols.size());
    if (k.length_ <= packed_capacity(m)) {
      u128 code = 0;
      for (std::uint8_t s : symbols) code = code * static_cast<u128>(m) + s;
      k.packed_ = code;
    } else {
      k.wide_.assign(symbols.begin(), symbols.end());
    }
    return k;
  }

  static BlockKey from_packed(u128 code, int length) {
    BlockKey k;
    k.packed_ = code;
    k.length_ = length;
    return k;
  }

  int length() const { return length_; }
  bool is_wide() const { return !wide_.empty(); }
  u128 packed() const { return packed_; }

  std::vector<std::uint8_t> decode(int m) const {
    if (is_wide()) return wide_;
    std::vector<std::uint8_t> out(static_cast<std::size_t>(length_));
    u128 code = packed_;
    for (int i = length_ - 1; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(code % static_cast<u128>(m));
      code /= static_cast<u128>(m);
    }
    return out;
  }

  /// Final symbol of the tuple (the center for a(Gamma, 0)).
  int last_symbol(int m) const {
    if (is_wide()) return wide_.back();
    return static_cast<int>(packed_ % static_cast<u128>(m));
  }

  /// Key of the tuple with its final symbol removed.
  BlockKey drop_last(int m) const {
    if (length_ == 0) throw ValidationError("cannot drop a symbol from an empty block");
    if (is_wide()) {
      std::vector<std::uint8_t> s = wide_;
      s.pop_back();
      return encode(s, m);
    }
    return from_packed(packed_ / static_cast<u128>(m), length_ - 1);
  }

  /// Key of the tuple extended by one trailing symbol.
  BlockKey append(int symbol, int m) const {
    if (!is_wide() && length_ + 1 <= packed_capacity(m)) {
      return from_packed(packed_ * static_cast<u128>(m) + static_cast<u128>(symbol), length_ + 1);
    }
    std::vector<std::uint8_t> s = decode(m);
    s.push_back(static_cast<std::uint8_t>(symbol));
    return encode(s, m);
  }

  bool operator==(const BlockKey& o) const {
    return length_ == o.length_ && packed_ == o.packed_ && wide_ == o.wide_;
  }

  bool operator<(const BlockKey& o) const {
    if (length_ != o.length_) return length_ < o.length_;
    if (is_wide() || o.is_wide()) return wide_ < o.wide_;
    return packed_ < o.packed_;
  }

  std::size_t hash() const {
    auto mix = [](std::uint64_t x) {
      x ^= x >> 33;
      x *= 0xff51afd7ed558ccdULL;
      x ^= x >> 33;
      x *= 0xc4ceb9fe1a85ec53ULL;
      x ^= x >> 33;
      return x;
    };
    std::uint64_t h = mix(static_cast<std::uint64_t>(packed_) ^ 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(length_));
    h ^= mix(static_cast<std::uint64_t>(packed_ >> 64) + 0x632be59bd9b4e019ULL);
    for (std::uint8_t s : wide_) h = mix(h ^ s);
    return static_cast<std::size_t>(h);
  }

 private:
  u128 packed_ = 0;
  std::vector<std::uint8_t> wide_;
  int length_ = 0;
};

struct BlockKeyHash {
  std::size_t operator()(const BlockKey& k) const { return k.hash(); }
};

}  // namespace mrfpic
