#include <doctest.h>

#include <cmath>

#include "fsqkd/auth.hpp"
#include "fsqkd/errors.hpp"
#include "support/oracles.hpp"

using namespace fsqkd;

namespace {

std::vector<std::uint8_t> bytes(std::size_t n, std::uint64_t seed) {
  auto r = Rng::substream(seed, Stream::misc);
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(r() & 0xFF);
  return v;
}

}  // namespace

TEST_CASE("GF(2^64) multiply against a shift-and-add oracle") {
  auto r = Rng::substream(1, Stream::misc);
  for (int i = 0; i < 2000; ++i) {
    const auto a = r(), b = r();
    REQUIRE(gf64_mul(a, b) == oracle::gf_mul_slow(a, b));
  }
  CHECK(gf64_mul(1, 0xABCDEF) == 0xABCDEF);
  CHECK(gf64_mul(0, 0xABCDEF) == 0);
  // x^63 * x = x^64 = x^4 + x^3 + x + 1
  CHECK(gf64_mul(1ULL << 63, 2) == 0x1B);
}

TEST_CASE("tag round trip and determinism") {
  const auto msg = bytes(300, 2);
  auto p1 = AuthKeyPool::random(4096, 7);
  auto p2 = p1;
  auto p3 = p1;
  const auto t1 = generate_tag(msg, p1);
  const auto t2 = generate_tag(msg, p2);
  CHECK(t1.tag == t2.tag);
  CHECK(t1.key_offset == 0);
  CHECK(p1.consumed() == t1.key_bits_used);
  CHECK(verify_tag(msg, t1.tag, t1.key_offset, p3));
  CHECK(p3.consumed() == p1.consumed());
  // next message uses fresh bits
  const auto t3 = generate_tag(msg, p1);
  CHECK(t3.key_offset == t1.key_bits_used);
  CHECK(t3.tag != t1.tag);
}

TEST_CASE("key consumption grows by a constant per doubling") {
  std::vector<std::uint64_t> used;
  for (unsigned e = 6; e <= 20; ++e) {
    const std::size_t n_bits = std::size_t{1} << e;
    auto pool = AuthKeyPool::random(4096, e);
    const auto t = generate_tag(std::vector<std::uint8_t>(n_bits / 8, 1), pool);
    CHECK(t.key_bits_used == auth_key_bits(n_bits / 8));
    CHECK(t.key_bits_used <= 16 * e + 128);
    used.push_back(t.key_bits_used);
  }
  for (std::size_t i = 1; i < used.size(); ++i) CHECK(used[i] >= used[i - 1]);
  // 16-word chunks: four doublings per extra level of 64 bits.
  CHECK(used.back() - used.front() <= 64 * ((20 - 6) / 4 + 1));
  CHECK(auth_levels(0) >= 1);
}

TEST_CASE("forgery: a single flipped bit changes the tag") {
  // With random keys the tag of a modified message collides with probability
  // at most a few times 2^-64; over 10^4 trials we expect no collision at all.
  int differ = 0;
  const int trials = 10'000;
  for (int i = 0; i < trials; ++i) {
    auto msg = bytes(64 + static_cast<std::size_t>(i % 500), 100 + static_cast<std::uint64_t>(i));
    auto pool = AuthKeyPool::random(1024, static_cast<std::uint64_t>(i));
    auto copy = pool;
    const auto tag = generate_tag(msg, pool);
    auto r = Rng::substream(static_cast<std::uint64_t>(i), Stream::qber_sample);
    const auto bit = r.below(msg.size() * 8);
    msg[bit / 8] ^= static_cast<std::uint8_t>(1U << (bit % 8));
    differ += !verify_tag(msg, tag.tag, tag.key_offset, copy);
  }
  CHECK(differ == trials);
}

TEST_CASE("length extension is caught by the length word") {
  std::vector<std::uint8_t> msg(64, 0);
  auto a = AuthKeyPool::random(1024, 3), b = a;
  const auto t = generate_tag(msg, a);
  msg.push_back(0);
  CHECK_FALSE(verify_tag(msg, t.tag, t.key_offset, b));
}

TEST_CASE("wrong key offset is a desync error") {
  const auto msg = bytes(100, 4);
  auto a = AuthKeyPool::random(1024, 5), b = a;
  const auto t = generate_tag(msg, a);
  CHECK_THROWS_AS(verify_tag(msg, t.tag, t.key_offset + 64, b), AuthError);
  CHECK(b.consumed() == 0);
}

TEST_CASE("exhausted pool") {
  auto p = AuthKeyPool::random(100, 1);
  CHECK_THROWS_AS(generate_tag(bytes(10, 1), p), AuthError);
  CHECK(p.consumed() == 0);
}

TEST_CASE("replenishment") {
  std::vector<std::uint8_t> bits(1000);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = static_cast<std::uint8_t>(i % 3 == 0);
  const auto key = KeyBuffer::from_bits(bits, Stage::final);
  SUBCASE("k = 0 is the identity") {
    auto pool = AuthKeyPool::random(256, 1);
    const auto before = pool;
    const auto r = replenish(pool, key, 0);
    CHECK(r.delivered == key);
    CHECK(pool == before);
  }
  SUBCASE("k = 128 from 1000 bits") {
    auto pool = AuthKeyPool::random(256, 1);
    const auto r = replenish(pool, key, 128);
    CHECK(r.delivered.size() == 872);
    CHECK(pool.size() == 256 + 128);
    CHECK(r.moved == 128);
    CHECK(r.replenished);
    CHECK(std::equal(pool.bits().begin() + 256, pool.bits().end(), bits.begin()));
    CHECK(r.delivered.bit(0) == bits[128]);
  }
  SUBCASE("short key is flagged, not consumed") {
    auto pool = AuthKeyPool::random(256, 1);
    const auto r = replenish(pool, key, 2000);
    CHECK_FALSE(r.replenished);
    CHECK(r.delivered.size() == 1000);
    CHECK(pool.size() == 256);
  }
}
