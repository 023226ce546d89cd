#include "fsqkd/adversary.hpp"

#include "fsqkd/channel.hpp"
#include "fsqkd/errors.hpp"

namespace fsqkd {

std::string_view to_string(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::none: return "none";
    case AttackKind::intercept_resend_alice_basis: return "intercept_resend_alice_basis";
    case AttackKind::intercept_resend_bobs_basis: return "intercept_resend_bobs_basis";
    case AttackKind::beamsplit: return "beamsplit";
    case AttackKind::qnd: return "qnd";
  }
  return "?";
}

AttackKind attack_kind_from_string(std::string_view s) {
  for (auto k : {AttackKind::none, AttackKind::intercept_resend_alice_basis,
                 AttackKind::intercept_resend_bobs_basis, AttackKind::beamsplit, AttackKind::qnd})
    if (to_string(k) == s) return k;
  throw ParameterError("unknown attack kind: " + std::string(s));
}

void AttackModel::validate() const {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ParameterError("attack fraction must be in [0,1]");
  if (kind == AttackKind::beamsplit && !(tap_ratio > 0.0 && tap_ratio < 1.0))
    throw ParameterError("tap ratio must be in (0,1)");
}

int decode_b92_alice(PolarizationState state) {
  if (state == encode_b92(0, Party::alice)) return 0;
  if (state == encode_b92(1, Party::alice)) return 1;
  throw ParameterError("not a B92 preparation state");
}

int decode_alice(PolarizationState state, Scheme scheme) {
  if (scheme == Scheme::b92) return decode_b92_alice(state);
  for (auto basis : {Basis::rectilinear, Basis::diagonal})
    for (int bit = 0; bit < 2; ++bit)
      if (state == encode_bb84(bit, basis)) return bit;
  throw ParameterError("not a BB84 preparation state");
}

namespace {

PulseEvent resend(const PulseEvent& original, PolarizationState state,
                  std::uint32_t forward_photons) {
  PulseEvent out = original;
  out.polarization = state;
  if (forward_photons != 0) out.photon_count = forward_photons;
  return out;
}

}  // namespace

AttackStep intercept_resend(const PulseEvent& pulse, InterceptStrategy strategy, Rng& rng,
                            ResendModel resend_model, std::uint32_t forward_photons) {
  AttackStep step;
  if (pulse.photon_count == 0) {
    step.forwarded.pulse = pulse;
    return step;
  }
  step.record.acted = true;

  if (strategy == InterceptStrategy::alice_basis) {
    // Measure one photon in a uniformly chosen basis.
    const auto basis = rng.bit() == 0 ? Basis::rectilinear : Basis::diagonal;
    const auto e0 = encode_bb84(0, basis);
    const auto e1 = encode_bb84(1, basis);
    const auto outcome = rng.uniform() < pass_probability(pulse.polarization, e0) ? e0 : e1;
    // An outcome orthogonal to one of Alice's states rules that state out;
    // otherwise the outcome coincides with the other state and is taken as the guess.
    const auto a0 = encode_b92(0, Party::alice);
    int guess;
    if (pass_probability(outcome, a0) == 0.0)
      guess = 1;
    else if (pass_probability(outcome, encode_b92(1, Party::alice)) == 0.0)
      guess = 0;
    else
      guess = outcome == a0 ? 0 : 1;
    step.record.guess = static_cast<std::int8_t>(guess);
    const auto state =
        resend_model == ResendModel::best_guess ? encode_b92(guess, Party::alice) : outcome;
    step.forwarded.pulse = resend(pulse, state, forward_photons);
    return step;
  }

  // Bob's basis: a pass through Bob's analyzer for bit b proves Alice sent b.
  const int b = rng.bit();
  const bool passed = rng.uniform() < pass_probability(pulse.polarization, encode_b92(b, Party::bob));
  if (!passed) return step;  // suppressed
  step.record.guess = static_cast<std::int8_t>(b);
  step.forwarded.pulse = resend(pulse, encode_b92(b, Party::alice), forward_photons);
  return step;
}

AttackStep beamsplit_attack(const PulseEvent& pulse, double tap_ratio, Rng& rng, Scheme scheme) {
  if (!(tap_ratio > 0.0 && tap_ratio < 1.0)) throw ParameterError("tap ratio must be in (0,1)");
  AttackStep step;
  const auto kept = thin(pulse.photon_count, tap_ratio, rng);
  PulseEvent rest = pulse;
  rest.photon_count = pulse.photon_count - kept;
  step.forwarded.pulse = rest;
  if (kept > 0) {
    step.record.acted = true;
    step.record.guess = static_cast<std::int8_t>(decode_alice(pulse.polarization, scheme));
  }
  return step;
}

AttackStep qnd_step(const PulseEvent& pulse, Scheme scheme) {
  AttackStep step;
  if (pulse.photon_count == 0) return step;
  step.record.acted = true;
  if (pulse.photon_count < 2) return step;
  step.record.guess = static_cast<std::int8_t>(decode_alice(pulse.polarization, scheme));
  PulseEvent fresh = pulse;
  fresh.photon_count = 1;
  step.forwarded.pulse = fresh;
  step.forwarded.bypass_channel = true;
  return step;
}

AttackStep apply_attack(const AttackModel& model, const PulseEvent& pulse, Rng& rng,
                        Scheme scheme) {
  switch (model.kind) {
    case AttackKind::none: break;
    case AttackKind::intercept_resend_alice_basis:
    case AttackKind::intercept_resend_bobs_basis: {
      const bool attacked = model.fraction >= 1.0 || rng.bernoulli(model.fraction);
      if (!attacked) break;
      const auto strategy = model.kind == AttackKind::intercept_resend_alice_basis
                                ? InterceptStrategy::alice_basis
                                : InterceptStrategy::bobs_basis;
      return intercept_resend(pulse, strategy, rng, model.resend, model.forward_photons);
    }
    case AttackKind::beamsplit: return beamsplit_attack(pulse, model.tap_ratio, rng, scheme);
    case AttackKind::qnd: return qnd_step(pulse, scheme);
  }
  AttackStep step;
  step.forwarded.pulse = pulse;
  return step;
}

StreamAttack partial_intercept(std::span<const PulseEvent> stream, double fraction,
                               InterceptStrategy strategy, std::uint64_t seed,
                               ResendModel resend_model) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ParameterError("fraction must be in [0,1]");
  AttackModel model;
  model.kind = strategy == InterceptStrategy::alice_basis ? AttackKind::intercept_resend_alice_basis
                                                          : AttackKind::intercept_resend_bobs_basis;
  model.fraction = fraction;
  model.resend = resend_model;
  StreamAttack out;
  out.forwarded.reserve(stream.size());
  out.record.entries.reserve(stream.size());
  for (const auto& p : stream) {
    auto rng = Rng::substream(seed, Stream::eve, p.tick_index);
    auto step = fraction == 0.0 ? AttackStep{Forwarded{p, false}, {}} : apply_attack(model, p, rng);
    out.forwarded.push_back(step.forwarded);
    out.record.entries.push_back(step.record);
  }
  return out;
}

QndResult qnd_attack(std::span<const PulseEvent> stream, double bob_detection_rate) {
  QndResult out;
  std::uint64_t multi = 0;
  for (const auto& p : stream) {
    auto step = qnd_step(p);
    if (p.photon_count >= 2) ++multi;
    out.forwarded.push_back(step.forwarded);
    out.record.entries.push_back(step.record);
  }
  out.multi_photon_rate =
      stream.empty() ? 0.0 : static_cast<double>(multi) / static_cast<double>(stream.size());
  out.feasible = out.multi_photon_rate >= bob_detection_rate;
  return out;
}

bool qnd_feasible(double mu, double bob_detection_rate) {
  return multi_photon_probability(mu) >= bob_detection_rate;
}

}  // namespace fsqkd
