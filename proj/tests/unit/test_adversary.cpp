#include <doctest.h>

#include <cmath>

#include "fsqkd/adversary.hpp"
#include "fsqkd/errors.hpp"
#include "fsqkd/kernels.hpp"
#include "support/oracles.hpp"

using namespace fsqkd;

namespace {

struct Tally {
  double sifted = 0, errors = 0, eve_correct = 0, eve_holds = 0, pulses = 0;
  double qber() const { return errors / sifted; }
  double eve() const { return eve_correct / sifted; }
};

Tally run(const TransmissionSetup& s, std::size_t n) {
  std::vector<std::uint8_t> a(n), b(n);
  auto ra = Rng::substream(s.seed, Stream::alice_bits), rb = Rng::substream(s.seed, Stream::bob_choice);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<std::uint8_t>(ra.bit());
    b[i] = static_cast<std::uint8_t>(rb.bit());
  }
  const auto ticks = run_transmission(s, a, {}, b);
  Tally t;
  t.pulses = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = ticks[i].detection;
    if (!d.is_bit()) continue;
    ++t.sifted;
    t.errors += d.bit() != a[i];
    t.eve_correct += ticks[i].eve.guess == a[i];
    t.eve_holds += ticks[i].eve.guess >= 0;
  }
  return t;
}

TransmissionSetup single_photon(std::uint64_t seed, AttackKind kind) {
  TransmissionSetup s;
  s.source = {1.0, 1e6};
  s.force_single_photon = true;
  s.attack.kind = kind;
  s.seed = seed;
  return s;
}

double sd(double p, double n) { return std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST_CASE("probability tree for the Alice-basis attack") {
  const auto best = oracle::intercept_resend_alice_basis(false);
  CHECK(std::abs(best.qber - 0.25) < 1e-12);
  CHECK(std::abs(best.eve_accuracy - 0.75) < 1e-12);
  const auto eig = oracle::intercept_resend_alice_basis(true);
  CHECK(std::abs(eig.qber - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("Alice-basis intercept-resend by Monte Carlo") {
  const auto t = run(single_photon(21, AttackKind::intercept_resend_alice_basis), 400'000);
  REQUIRE(t.sifted > 90'000);
  CHECK(std::abs(t.qber() - 0.25) < 4 * sd(0.25, t.sifted));
  CHECK(std::abs(t.eve() - 0.75) < 4 * sd(0.75, t.sifted));

  auto s = single_photon(22, AttackKind::intercept_resend_alice_basis);
  s.attack.resend = ResendModel::eigenstate;
  const auto e = run(s, 400'000);
  const auto tree = oracle::intercept_resend_alice_basis(true);
  CHECK(std::abs(e.qber() - tree.qber) < 4 * sd(tree.qber, e.sifted));
  CHECK(std::abs(e.sifted / e.pulses - tree.sift_rate) < 4 * sd(tree.sift_rate, e.pulses));
}

TEST_CASE("Bob's-basis attack cuts the rate by four without errors") {
  const auto base = run(single_photon(23, AttackKind::none), 400'000);
  const auto att = run(single_photon(23, AttackKind::intercept_resend_bobs_basis), 400'000);
  const auto tree = oracle::intercept_resend_bobs_basis();
  CHECK(tree.qber < 1e-15);
  CHECK(tree.eve_accuracy == doctest::Approx(1.0));
  CHECK(att.errors == 0);
  CHECK(att.eve_correct == att.sifted);
  CHECK(std::abs(att.sifted / base.sifted - 0.25) < 0.01);
}

TEST_CASE("partial intercept") {
  std::vector<PulseEvent> stream;
  for (std::uint64_t t = 0; t < 2000; ++t)
    stream.push_back({t, 1, encode_b92(static_cast<int>(t % 2), Party::alice)});

  SUBCASE("f = 0 leaves the stream untouched") {
    const auto r = partial_intercept(stream, 0.0, InterceptStrategy::alice_basis, 5);
    for (std::size_t i = 0; i < stream.size(); ++i) {
      REQUIRE(r.forwarded[i].pulse.has_value());
      CHECK(r.forwarded[i].pulse->polarization == stream[i].polarization);
      CHECK_FALSE(r.record.entries[i].acted);
    }
  }
  SUBCASE("f = 1 equals attacking every pulse") {
    const auto r = partial_intercept(stream, 1.0, InterceptStrategy::alice_basis, 5);
    for (std::size_t i = 0; i < stream.size(); ++i) {
      auto rng = Rng::substream(5, Stream::eve, stream[i].tick_index);
      const auto step = intercept_resend(stream[i], InterceptStrategy::alice_basis, rng);
      CHECK(r.record.entries[i].guess == step.record.guess);
      CHECK(r.forwarded[i].pulse->polarization == step.forwarded.pulse->polarization);
    }
  }
  SUBCASE("f = 0.5 halves the induced QBER") {
    auto s = single_photon(24, AttackKind::intercept_resend_alice_basis);
    s.attack.fraction = 0.5;
    const auto t = run(s, 440'000);
    REQUIRE(t.sifted > 100'000);
    CHECK(std::abs(t.qber() - 0.125) < 4 * sd(0.125, t.sifted));
  }
  CHECK_THROWS_AS(partial_intercept(stream, 1.5, InterceptStrategy::alice_basis, 5), ParameterError);
}

TEST_CASE("vacuum passes an intercept untouched") {
  auto r = Rng::substream(1, Stream::eve);
  const PulseEvent vac{0, 0, PolarizationState::V};
  const auto step = intercept_resend(vac, InterceptStrategy::alice_basis, r);
  CHECK_FALSE(step.record.acted);
  CHECK(step.forwarded.pulse->photon_count == 0);
}

TEST_CASE("beamsplit on a single photon") {
  int kept = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    auto r = Rng::substream(6, Stream::eve, static_cast<std::uint64_t>(i));
    const auto step = beamsplit_attack({0, 1, PolarizationState::V}, 0.5, r);
    const bool eve = step.record.guess >= 0;
    kept += eve;
    REQUIRE(step.forwarded.pulse->photon_count == (eve ? 0U : 1U));
    if (eve) REQUIRE(step.record.guess == 0);
  }
  CHECK(std::abs(kept / double(n) - 0.5) < 4 * sd(0.5, n));
  auto r = Rng::substream(6, Stream::eve);
  CHECK_THROWS_AS(beamsplit_attack({0, 1, PolarizationState::V}, 1.0, r), ParameterError);
}

TEST_CASE("beamsplit exposure at mu 0.3 matches the Poisson x binomial enumeration") {
  // Switched routing: every forwarded photon meets the tick's analyzer, so a
  // sift needs a conclusive analyzer (1/2) and at least one of m photons to
  // pass (1 - 2^-m).
  const double mu = 0.3, t = 0.5;
  const auto p = oracle::poisson_terms(mu, 40);
  double sift = 0, known = 0;
  for (unsigned n = 1; n < p.size(); ++n)
    for (unsigned k = 0; k <= n; ++k) {
      const double w = p[n] * oracle::binomial_pmf(n, k, t) * 0.5 * (1 - std::pow(0.5, n - k));
      sift += w;
      if (k >= 1) known += w;
    }
  const double expected = known / sift;

  TransmissionSetup s;
  s.source = {mu, 1e6};
  s.routing = Routing::switched;
  s.attack.kind = AttackKind::beamsplit;
  s.attack.tap_ratio = t;
  s.seed = 25;
  const auto m = run(s, 2'000'000);
  CHECK(m.errors == 0);
  CHECK(std::abs(m.eve_holds / m.sifted - expected) < 4 * sd(expected, m.sifted));
  CHECK(std::abs(m.sifted / m.pulses - sift) < 4 * sd(sift, m.pulses));
  // Enumeration cross-check for the joint hold-and-forward event.
  CHECK(oracle::beamsplit_both_hold(mu, t) < oracle::poisson_summary(mu).p_nonvacuum);
}

TEST_CASE("tiny tap ratio leaves the stream statistically unchanged") {
  TransmissionSetup s;
  s.source = {0.3, 1e6};
  s.seed = 26;
  const auto base = run(s, 400'000);
  s.attack.kind = AttackKind::beamsplit;
  s.attack.tap_ratio = 1e-7;
  const auto att = run(s, 400'000);
  CHECK(att.eve_holds <= 2);
  const double p = base.sifted / base.pulses;
  CHECK(std::abs(att.sifted - base.sifted) < 4 * std::sqrt(2 * base.pulses * p * (1 - p)));
}

TEST_CASE("QND feasibility") {
  CHECK(qnd_feasible(0.3, 0.005));
  CHECK(multi_photon_probability(0.3) == doctest::Approx(0.0369).epsilon(0.002));
  CHECK_FALSE(qnd_feasible(0.01, 0.005));

  std::vector<PulseEvent> stream;
  auto r = Rng::substream(27, Stream::source);
  PulseSource src{0.3, 1e6};
  for (std::uint64_t t = 0; t < 100'000; ++t)
    stream.push_back({t, sample_photon_count(src, r), PolarizationState::V});
  const auto q = qnd_attack(stream, 0.005);
  CHECK(q.feasible);
  CHECK(std::abs(q.multi_photon_rate - 0.0369) < 4 * sd(0.0369, 1e5));
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (stream[i].photon_count >= 2) {
      REQUIRE(q.forwarded[i].pulse.has_value());
      CHECK(q.forwarded[i].bypass_channel);
      CHECK(q.forwarded[i].pulse->photon_count == 1);
    } else {
      CHECK_FALSE(q.forwarded[i].pulse.has_value());
    }
  }
}

TEST_CASE("QND attack on the daylight link: full knowledge, no errors") {
  TransmissionSetup s;
  s.source = {0.3, 1e6};
  s.channel.transmittance = 0.104;
  s.channel.detector_efficiency = 0.65;
  s.attack.kind = AttackKind::qnd;
  s.seed = 28;
  const auto t = run(s, 400'000);
  REQUIRE(t.sifted > 1000);
  CHECK(t.errors == 0);
  CHECK(t.eve_correct == t.sifted);
}

TEST_CASE("attack kind names round-trip") {
  for (auto k : {AttackKind::none, AttackKind::intercept_resend_alice_basis,
                 AttackKind::intercept_resend_bobs_basis, AttackKind::beamsplit, AttackKind::qnd})
    CHECK(attack_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(attack_kind_from_string("laser"), ParameterError);
  CHECK(decode_b92_alice(PolarizationState::Plus45) == 1);
  CHECK_THROWS_AS(decode_b92_alice(PolarizationState::H), ParameterError);
  CHECK(decode_alice(PolarizationState::V, Scheme::bb84) == 1);
  CHECK(decode_alice(PolarizationState::V, Scheme::b92) == 0);
  CHECK(decode_alice(PolarizationState::Minus45, Scheme::bb84) == 1);
  CHECK_THROWS_AS(decode_alice(PolarizationState(10.0), Scheme::bb84), ParameterError);
}
