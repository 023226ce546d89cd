#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsqkd/protocol.hpp"

namespace fsqkd {

/// Secret bits shared in advance for tagging classical messages. Each bit is
/// used for at most one tag; consumption only moves forward.
class AuthKeyPool {
 public:
  AuthKeyPool() = default;
  explicit AuthKeyPool(std::vector<std::uint8_t> bits);

  /// Pool of n bits from the auth_pool substream of seed.
  static AuthKeyPool random(std::size_t n, std::uint64_t seed);

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t consumed() const noexcept { return consumed_; }
  std::size_t available() const noexcept { return bits_.size() - consumed_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  /// Consume the next 64 bits as a word (LSB first). Throws AuthError when
  /// fewer than 64 remain.
  std::uint64_t take_word();

  void append(std::span<const std::uint8_t> bits);

  friend bool operator==(const AuthKeyPool&, const AuthKeyPool&) = default;

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t consumed_ = 0;
};

inline constexpr unsigned kTagBits = 64;
/// 64-bit words compressed into one word per hash level.
inline constexpr unsigned kChunkWords = 16;

/// Carry-less product in GF(2^64) modulo x^64 + x^4 + x^3 + x + 1.
std::uint64_t gf64_mul(std::uint64_t a, std::uint64_t b) noexcept;

/// Number of tree levels for a message of the given byte length.
unsigned auth_levels(std::size_t message_bytes) noexcept;

/// Key bits one tag consumes: 64 per level plus a 64-bit one-time pad.
/// For a message of n bits this is at most 16*log2(n) + 128.
std::uint64_t auth_key_bits(std::size_t message_bytes) noexcept;

/// Wegman-Carter style tree hash: the message (plus a length word) is split
/// into 64-bit words; each level compresses chunks of up to 16 words with a
/// fresh key k via the polynomial k^(m+1) + sum x_i k^(m-i+1) over GF(2^64),
/// until one word remains. That word is masked with a fresh 64-bit pad.
/// Forgery probability per level is at most 17 / 2^64.
std::uint64_t tree_hash(std::span<const std::uint8_t> message,
                        std::span<const std::uint64_t> level_keys);

struct TagResult {
  std::uint64_t tag = 0;
  std::uint64_t key_bits_used = 0;
  std::uint64_t key_offset = 0;  // pool position before this tag
};

/// Tag a message with fresh pool bits. Throws AuthError if the pool cannot
/// cover auth_key_bits(message.size()).
TagResult generate_tag(std::span<const std::uint8_t> message, AuthKeyPool& pool);

/// Recompute and compare, consuming the same bits generate_tag did. A
/// key_offset different from pool.consumed() means the parties are out of
/// step and throws AuthError without consuming anything.
bool verify_tag(std::span<const std::uint8_t> message, std::uint64_t tag,
                std::uint64_t key_offset, AuthKeyPool& pool);

struct Replenishment {
  KeyBuffer delivered;
  std::uint64_t moved = 0;
  bool replenished = false;
};

/// Move the first k bits of the final key into the pool. A key shorter than k
/// is delivered untouched and flagged as not replenished.
Replenishment replenish(AuthKeyPool& pool, const KeyBuffer& final_key, std::size_t k);

}  // namespace fsqkd
