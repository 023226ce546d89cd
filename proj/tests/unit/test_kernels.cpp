#include <doctest.h>

#include "fsqkd/errors.hpp"
#include "fsqkd/kernels.hpp"
#include "fsqkd/reconciliation.hpp"

using namespace fsqkd;

namespace {

std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed, Stream s = Stream::misc) {
  auto r = Rng::substream(seed, s);
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(r.bit());
  return v;
}

bool same(const TickResult& a, const TickResult& b) {
  return a.emitted.photon_count == b.emitted.photon_count &&
         a.emitted.polarization == b.emitted.polarization && a.arrived_photons == b.arrived_photons &&
         a.detection.outcome == b.detection.outcome && a.detection.cause == b.detection.cause &&
         a.eve.acted == b.eve.acted && a.eve.guess == b.eve.guess;
}

TransmissionSetup noisy(AttackKind kind) {
  TransmissionSetup s;
  s.source = {0.6, 1e6};
  s.channel.transmittance = 0.3;
  s.channel.detector_efficiency = 0.7;
  s.channel.background_rate = 1e6;
  s.channel.dark_rate = 2e5;
  s.channel.gate_window = 1e-8;
  s.channel.optical_flip_probability = 0.02;
  s.attack.kind = kind;
  s.attack.fraction = 0.5;
  s.seed = 12;
  return s;
}

}  // namespace

TEST_CASE("transmission: serial and parallel agree for every attack") {
  set_thread_count(4);
  const std::size_t n = 50'000;
  const auto a = random_bits(n, 1, Stream::alice_bits);
  const auto b = random_bits(n, 1, Stream::bob_choice);
  for (auto kind : {AttackKind::none, AttackKind::intercept_resend_alice_basis,
                    AttackKind::intercept_resend_bobs_basis, AttackKind::beamsplit, AttackKind::qnd}) {
    const auto s = noisy(kind);
    const auto x = run_transmission(s, a, {}, b, Exec::serial);
    const auto y = run_transmission(s, a, {}, b, Exec::parallel);
    REQUIRE(x.size() == n);
    std::size_t diff = 0;
    for (std::size_t i = 0; i < n; ++i) diff += !same(x[i], y[i]);
    CHECK(diff == 0);
    // and a single tick recomputed alone
    const auto t = simulate_tick(s, 777, a[777], 0, b[777]);
    CHECK(same(t, x[777]));
  }
  set_thread_count(0);
}

TEST_CASE("transmission: BB84 serial and parallel agree") {
  set_thread_count(3);
  const std::size_t n = 30'000;
  auto s = noisy(AttackKind::beamsplit);
  s.scheme = Scheme::bb84;
  const auto a = random_bits(n, 2), ab = random_bits(n, 3), bb = random_bits(n, 4);
  const auto x = run_transmission(s, a, ab, bb, Exec::serial);
  const auto y = run_transmission(s, a, ab, bb, Exec::parallel);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < n; ++i) diff += !same(x[i], y[i]);
  CHECK(diff == 0);
  set_thread_count(0);
}

TEST_CASE("transmission input validation") {
  TransmissionSetup s;
  s.source = {0.3, 1e6};
  const std::vector<std::uint8_t> ok(10, 0), bad{0, 2};
  CHECK_THROWS_AS(run_transmission(s, bad, {}, std::vector<std::uint8_t>(2, 0)), ParameterError);
  CHECK_THROWS_AS(run_transmission(s, ok, {}, std::vector<std::uint8_t>(9, 0)), ProtocolError);
  s.scheme = Scheme::bb84;
  CHECK_THROWS_AS(run_transmission(s, ok, {}, ok), ProtocolError);
  s.attack.kind = AttackKind::intercept_resend_alice_basis;
  CHECK_THROWS_AS(run_transmission(s, ok, ok, ok), ParameterError);
}

TEST_CASE("noise and optics never touch vacuum ticks without noise") {
  TransmissionSetup s;
  s.source = {0.0, 1e6};
  s.channel.optical_flip_probability = 0.5;
  const auto a = random_bits(1000, 5);
  const auto ticks = run_transmission(s, a, {}, a);
  for (const auto& t : ticks) CHECK(t.detection.outcome == Outcome::none);
}

TEST_CASE("parity pass: serial and parallel agree, including Bob's corrections") {
  set_thread_count(4);
  const std::size_t n = 10'000;  // last block padded
  const auto a = random_bits(n, 6);
  auto b = a;
  for (std::size_t i = 0; i < n; i += 97) b[i] ^= 1U;
  auto r = Rng::substream(6, Stream::reconcile);
  const auto perm = random_permutation(n, r);
  auto b1 = b, b2 = b;
  const auto x = parity_pass(a, b1, perm, 16, 16, 0, Exec::serial);
  const auto y = parity_pass(a, b2, perm, 16, 16, 0, Exec::parallel);
  CHECK(b1 == b2);
  CHECK(x.message == y.message);
  CHECK(x.flips == y.flips);
  CHECK(x.failing_blocks == y.failing_blocks);
  CHECK(x.failing_lines == y.failing_lines);
  CHECK(x.message.blocks.size() == (n + 255) / 256);
  set_thread_count(0);
}

TEST_CASE("parity pass matches fold_blocks + block_parities") {
  const auto a = random_bits(1000, 7);
  auto b = a;
  auto r = Rng::substream(7, Stream::reconcile);
  const auto perm = random_permutation(a.size(), r);
  const auto res = parity_pass(a, b, perm, 8, 8, 5, Exec::serial);
  const auto blocks = fold_blocks(a, perm, 8, 8);
  REQUIRE(blocks.size() == res.message.blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i)
    CHECK(block_parities(blocks[i]) == res.message.blocks[i].bits);
  CHECK(res.message.pass == 5);
  CHECK(res.flips == 0);
}

TEST_CASE("subset parities: serial and parallel agree") {
  set_thread_count(4);
  const auto k = random_bits(5000, 8);
  std::vector<std::uint8_t> x(2000), y(2000);
  subset_parities(k, 42, x, Exec::serial);
  subset_parities(k, 42, y, Exec::parallel);
  CHECK(x == y);
  set_thread_count(0);
}

TEST_CASE("pack_words is LSB first") {
  std::vector<std::uint8_t> bits(70, 0);
  bits[0] = bits[65] = 1;
  const auto w = pack_words(bits);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == 1);
  CHECK(w[1] == 2);
}
