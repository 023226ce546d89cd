#include <doctest.h>

#include <cmath>
#include <string>

#include "fsqkd/errors.hpp"
#include "fsqkd/kernels.hpp"
#include "fsqkd/protocol.hpp"

using namespace fsqkd;

namespace {

DetectionRecord click(std::uint64_t tick, int bit) {
  return DetectionRecord{tick, bit ? Outcome::bit1 : Outcome::bit0, Cause::signal};
}

std::vector<std::uint8_t> parse_bits(const std::string& s) {
  std::vector<std::uint8_t> v;
  for (char c : s)
    if (c == '0' || c == '1') v.push_back(static_cast<std::uint8_t>(c - '0'));
  return v;
}

// Daylight 0.5 km sample: Alice's and Bob's sifted bits.
const char* kSampleA =
    "10101110 10011001 10001111 00001101 10011011 10110011 10011001 100000001"
    "11001110 01101010 10010111 10001110 10110000 11001110 11101101 10110011"
    "01000000 01010001 00010000 00010010 01000111 00010011 11001000 01001001"
    "01110101 10110010 01110010 11101111 00101101 00010101 10011111 00101111";
const char* kSampleB =
    "10101110 10011001 10001111 10001101 10011011 10110011 10011001 101000001"
    "11001110 01101010 10010111 10001110 10110000 11001110 11101101 10110011"
    "01000001 01010001 00010000 00010010 01000111 00010011 11001000 01011001"
    "11110101 10110010 01110010 11101111 00101101 00010101 10011111 00101111";

}  // namespace

TEST_CASE("alice_round prepares the B92 state") {
  auto r = Rng::substream(1, Stream::source);
  PulseSource s{0.3, 1e6};
  CHECK(alice_round(0, 0, s, r).polarization == PolarizationState::V);
  CHECK(alice_round(1, 1, s, r).polarization == PolarizationState::Plus45);
  PulseSource vac{0.0, 1e6};
  for (int b = 0; b < 2; ++b) CHECK(alice_round(2, b, vac, r).photon_count == 0);
}

TEST_CASE("bob_round on the four-bit example") {
  ChannelParams ideal;
  auto r = Rng::substream(2, Stream::detector);
  // Alice 1 vs Bob 0: crossed, never a pass.
  for (int i = 0; i < 1000; ++i)
    REQUIRE(bob_round({0, 1, PolarizationState::Plus45}, 0, ideal, r).outcome == Outcome::none);
  int pass = 0;
  for (int i = 0; i < 100'000; ++i) {
    const auto d = bob_round({0, 1, PolarizationState::Plus45}, 1, ideal, r);
    REQUIRE(d.outcome != Outcome::bit0);
    pass += d.outcome == Outcome::bit1;
  }
  CHECK(std::abs(pass / 1e5 - 0.5) < 4 * std::sqrt(0.25 / 1e5));
  CHECK(bob_round({0, 0, PolarizationState::V}, 0, ideal, r).outcome == Outcome::none);
}

TEST_CASE("four-bit example sifts to a single bit 1") {
  const std::vector<std::uint8_t> alice{1, 0, 1, 0};
  const std::vector<std::uint8_t> bob{0, 0, 1, 1};
  const std::vector<DetectionRecord> det{{0}, {1}, click(2, 1), {3}};
  const auto r = sift(alice, bob, det);
  REQUIRE(r.alice_key.size() == 1);
  CHECK(r.alice_key.bit(0) == 1);
  CHECK(r.bob_key.bit(0) == 1);
  CHECK(r.alice_key.ticks()[0] == 2);
  CHECK(r.detected_indices == std::vector<std::uint64_t>{2});
}

TEST_CASE("sift edge cases") {
  const std::vector<std::uint8_t> bits(5, 0);
  const std::vector<DetectionRecord> none(5);
  CHECK(sift(bits, bits, none).alice_key.empty());
  std::vector<DetectionRecord> det(5);
  det[1] = {1, Outcome::dual, Cause::signal};
  det[3] = click(3, 0);
  const auto r = sift(bits, bits, det);
  CHECK(r.dual_fire_count == 1);
  CHECK(r.alice_key.size() == 1);
  CHECK_THROWS_AS(sift(bits, std::vector<std::uint8_t>(4), det), ProtocolError);
}

TEST_CASE("ideal channel sift yield is one in four") {
  TransmissionSetup s;
  s.source = {1.0, 1e6};
  s.force_single_photon = true;
  s.seed = 3;
  const std::size_t n = 400'000;
  std::vector<std::uint8_t> a(n), b(n);
  auto ra = Rng::substream(3, Stream::alice_bits), rb = Rng::substream(3, Stream::bob_choice);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<std::uint8_t>(ra.bit());
    b[i] = static_cast<std::uint8_t>(rb.bit());
  }
  const auto ticks = run_transmission(s, a, {}, b);
  std::vector<DetectionRecord> det(n);
  for (std::size_t i = 0; i < n; ++i) det[i] = ticks[i].detection;
  const auto r = sift(a, b, det);
  const double y = r.alice_key.size() / double(n);
  CHECK(std::abs(y - 0.25) < 4 * std::sqrt(0.25 * 0.75 / n));
  CHECK(r.alice_key == r.bob_key);  // no errors on an ideal channel
}

TEST_CASE("BB84 sifting truth table") {
  // All eight (Alice bit, Alice basis, Bob basis) combinations with one click
  // each; only matched bases keep a bit, and Bob's bit is the click.
  std::vector<std::uint8_t> a, ab, bb;
  std::vector<DetectionRecord> det;
  std::uint64_t t = 0;
  for (int bit = 0; bit < 2; ++bit)
    for (int abasis = 0; abasis < 2; ++abasis)
      for (int bbasis = 0; bbasis < 2; ++bbasis) {
        a.push_back(static_cast<std::uint8_t>(bit));
        ab.push_back(static_cast<std::uint8_t>(abasis));
        bb.push_back(static_cast<std::uint8_t>(bbasis));
        det.push_back(click(t++, abasis == bbasis ? bit : 1 - bit));
      }
  const auto r = sift_bb84(a, ab, bb, det);
  CHECK(r.detected_indices.size() == 8);
  const std::vector<std::uint64_t> kept{0, 3, 4, 7};
  REQUIRE(r.alice_key.size() == kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    CHECK(r.alice_key.ticks()[i] == kept[i]);
    CHECK(r.alice_key.bit(i) == r.bob_key.bit(i));
  }
  CHECK(r.alice_key.bit(0) == 0);
  CHECK(r.alice_key.bit(3) == 1);

  std::vector<std::uint8_t> flipped(bb.size());
  for (std::size_t i = 0; i < bb.size(); ++i) flipped[i] = static_cast<std::uint8_t>(1 - ab[i]);
  CHECK(sift_bb84(a, ab, flipped, det).alice_key.empty());
}

TEST_CASE("BB84 matched bases keep half the detections") {
  TransmissionSetup s;
  s.scheme = Scheme::bb84;
  s.source = {1.0, 1e6};
  s.force_single_photon = true;
  s.seed = 4;
  const std::size_t n = 200'000;
  std::vector<std::uint8_t> a(n), ab(n), bb(n);
  auto r = Rng::substream(4, Stream::misc);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<std::uint8_t>(r.bit());
    ab[i] = static_cast<std::uint8_t>(r.bit());
    bb[i] = static_cast<std::uint8_t>(r.bit());
  }
  const auto ticks = run_transmission(s, a, ab, bb);
  std::vector<DetectionRecord> det(n);
  for (std::size_t i = 0; i < n; ++i) det[i] = ticks[i].detection;
  const auto res = sift_bb84(a, ab, bb, det);
  const double frac = res.alice_key.size() / double(res.detected_indices.size());
  CHECK(std::abs(frac - 0.5) < 4 * std::sqrt(0.25 / res.detected_indices.size()));
  CHECK(res.alice_key.bits().size() == res.bob_key.bits().size());
  for (std::size_t i = 0; i < res.alice_key.size(); ++i) REQUIRE(res.alice_key.bit(i) == res.bob_key.bit(i));
}

TEST_CASE("QBER estimation") {
  auto make = [](const std::vector<std::uint8_t>& bits) {
    return KeyBuffer::from_bits(bits, Stage::sifted);
  };
  SUBCASE("identical keys") {
    auto a = make(std::vector<std::uint8_t>(1000, 1));
    auto b = a;
    auto r = Rng::substream(1, Stream::qber_sample);
    const auto e = estimate_qber(a, b, 0.1, r);
    CHECK(e.qber == 0.0);
    CHECK(e.disclosed == 100);
    CHECK(a.size() == 900);
    CHECK(b.size() == 900);
    CHECK(a.leaked_bits() == 100);
    CHECK(e.sample.size() == 100);
    for (std::size_t i = 1; i < e.sample.size(); ++i) CHECK(e.sample[i - 1].tick < e.sample[i].tick);
  }
  SUBCASE("daylight sample with five errors, full disclosure") {
    const auto sa = parse_bits(kSampleA), sb = parse_bits(kSampleB);
    REQUIRE(sa.size() == sb.size());
    auto a = make(sa), b = make(sb);
    auto r = Rng::substream(2, Stream::qber_sample);
    const auto e = estimate_qber(a, b, 1.0, r);
    CHECK(e.mismatches == 5);
    CHECK(e.qber == doctest::Approx(0.0195).epsilon(0.0005 / 0.0195));
    CHECK(a.empty());
  }
  SUBCASE("sample is drawn without replacement and at least one bit") {
    auto a = make(std::vector<std::uint8_t>(10, 0));
    auto b = a;
    auto r = Rng::substream(3, Stream::qber_sample);
    CHECK(estimate_qber(a, b, 0.01, r).disclosed == 1);
    KeyBuffer empty(Stage::sifted);
    auto e2 = empty;
    CHECK_THROWS_AS(estimate_qber(empty, e2, 0.1, r), ProtocolError);
  }
}

TEST_CASE("key buffer invariants") {
  KeyBuffer k(Stage::sifted);
  k.push_back(3, 1);
  CHECK_THROWS_AS(k.push_back(3, 0), ProtocolError);
  CHECK_THROWS_AS(k.advance(Stage::raw), ProtocolError);
  k.advance(Stage::reconciled);
  CHECK(k.stage() == Stage::reconciled);
  k.push_back(9, 0);
  k.push_back(11, 1);
  k.erase_positions({1, 1});
  CHECK(k.size() == 2);
  CHECK(k.ticks()[1] == 11);
  k.truncate(1);
  CHECK(k.size() == 1);
  CHECK(std::string(to_string(Stage::amplified)) == "amplified");
}
