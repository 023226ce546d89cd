#include "fsqkd/auth.hpp"

#include "fsqkd/errors.hpp"
#include "fsqkd/rng.hpp"

namespace fsqkd {

AuthKeyPool::AuthKeyPool(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b &= 1U;
}

AuthKeyPool AuthKeyPool::random(std::size_t n, std::uint64_t seed) {
  auto rng = Rng::substream(seed, Stream::auth_pool);
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
  return AuthKeyPool(std::move(bits));
}

std::uint64_t AuthKeyPool::take_word() {
  if (available() < 64) throw AuthError("authentication key pool exhausted");
  std::uint64_t w = 0;
  for (unsigned i = 0; i < 64; ++i)
    w |= static_cast<std::uint64_t>(bits_[consumed_ + i]) << i;
  consumed_ += 64;
  return w;
}

void AuthKeyPool::append(std::span<const std::uint8_t> bits) {
  for (auto b : bits) bits_.push_back(b & 1U);
}

std::uint64_t gf64_mul(std::uint64_t a, std::uint64_t b) noexcept {
  constexpr std::uint64_t kReduce = 0x1bULL;  // x^4 + x^3 + x + 1
  std::uint64_t r = 0;
  while (b != 0) {
    if (b & 1U) r ^= a;
    b >>= 1;
    const bool carry = (a >> 63) != 0;
    a <<= 1;
    if (carry) a ^= kReduce;
  }
  return r;
}

namespace {

std::vector<std::uint64_t> message_words(std::span<const std::uint8_t> message) {
  std::vector<std::uint64_t> words((message.size() + 7) / 8 + 1, 0);
  for (std::size_t i = 0; i < message.size(); ++i)
    words[i / 8] |= static_cast<std::uint64_t>(message[i]) << (8 * (i % 8));
  words.back() = static_cast<std::uint64_t>(message.size());
  return words;
}

std::uint64_t chunk_hash(std::span<const std::uint64_t> chunk, std::uint64_t key) noexcept {
  std::uint64_t h = 1;  // leading monomial separates chunk lengths
  for (auto x : chunk) h = gf64_mul(h, key) ^ x;
  return gf64_mul(h, key);
}

}  // namespace

unsigned auth_levels(std::size_t message_bytes) noexcept {
  std::size_t words = (message_bytes + 7) / 8 + 1;
  unsigned levels = 0;
  do {
    words = (words + kChunkWords - 1) / kChunkWords;
    ++levels;
  } while (words > 1);
  return levels;
}

std::uint64_t auth_key_bits(std::size_t message_bytes) noexcept {
  return static_cast<std::uint64_t>(auth_levels(message_bytes) + 1) * kTagBits;
}

std::uint64_t tree_hash(std::span<const std::uint8_t> message,
                        std::span<const std::uint64_t> level_keys) {
  auto words = message_words(message);
  std::size_t level = 0;
  do {
    if (level >= level_keys.size()) throw AuthError("tree hash: not enough level keys");
    std::vector<std::uint64_t> next;
    next.reserve((words.size() + kChunkWords - 1) / kChunkWords);
    for (std::size_t i = 0; i < words.size(); i += kChunkWords) {
      const auto len = std::min<std::size_t>(kChunkWords, words.size() - i);
      next.push_back(chunk_hash(std::span(words).subspan(i, len), level_keys[level]));
    }
    words = std::move(next);
    ++level;
  } while (words.size() > 1);
  return words.front();
}

namespace {

std::uint64_t keyed_tag(std::span<const std::uint8_t> message, AuthKeyPool& pool) {
  const unsigned levels = auth_levels(message.size());
  if (pool.available() < auth_key_bits(message.size()))
    throw AuthError("authentication key pool exhausted");
  std::vector<std::uint64_t> keys(levels);
  for (auto& k : keys) k = pool.take_word();
  const std::uint64_t pad = pool.take_word();
  return tree_hash(message, keys) ^ pad;
}

}  // namespace

TagResult generate_tag(std::span<const std::uint8_t> message, AuthKeyPool& pool) {
  TagResult r;
  r.key_offset = pool.consumed();
  r.tag = keyed_tag(message, pool);
  r.key_bits_used = pool.consumed() - r.key_offset;
  return r;
}

bool verify_tag(std::span<const std::uint8_t> message, std::uint64_t tag,
                std::uint64_t key_offset, AuthKeyPool& pool) {
  if (key_offset != pool.consumed())
    throw AuthError("authentication pools out of step (offset " + std::to_string(key_offset) +
                    ", local " + std::to_string(pool.consumed()) + ")");
  return keyed_tag(message, pool) == tag;
}

Replenishment replenish(AuthKeyPool& pool, const KeyBuffer& final_key, std::size_t k) {
  Replenishment r;
  if (k == 0) {
    r.delivered = final_key;
    r.replenished = true;
    return r;
  }
  if (final_key.size() < k) {
    r.delivered = final_key;
    return r;
  }
  pool.append(final_key.bits().first(k));
  std::vector<std::uint8_t> rest(final_key.bits().begin() + static_cast<std::ptrdiff_t>(k),
                                 final_key.bits().end());
  r.delivered = KeyBuffer::from_bits(std::move(rest), final_key.stage());
  r.delivered.add_leak(final_key.leaked_bits());
  r.moved = k;
  r.replenished = true;
  return r;
}

}  // namespace fsqkd
