#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fsqkd/photonics.hpp"
#include "fsqkd/rng.hpp"

namespace fsqkd {

enum class AttackKind : std::uint8_t {
  none = 0,
  intercept_resend_alice_basis,
  intercept_resend_bobs_basis,
  beamsplit,
  qnd,
};

enum class InterceptStrategy : std::uint8_t { alice_basis, bobs_basis };

/// What Eve sends on after an Alice-basis measurement.
enum class ResendModel : std::uint8_t {
  best_guess,  // Alice's B92 state for Eve's best guess of the bit
  eigenstate,  // the eigenstate Eve's measurement collapsed onto
};

std::string_view to_string(AttackKind kind) noexcept;
AttackKind attack_kind_from_string(std::string_view s);

struct AttackModel {
  AttackKind kind = AttackKind::none;
  /// Probability that a given pulse is attacked (intercept kinds only).
  double fraction = 1.0;
  /// Share of photons Eve taps off in the beamsplit attack, in (0,1).
  double tap_ratio = 0.5;
  ResendModel resend = ResendModel::best_guess;
  /// Photons per forwarded pulse for intercept-resend; 0 keeps the
  /// intercepted pulse's photon count.
  std::uint32_t forward_photons = 0;

  void validate() const;
};

/// Eve's ledger entry for one tick. guess is -1 when she has no bit value.
struct EveEntry {
  bool acted = false;
  std::int8_t guess = -1;
};

struct EveRecord {
  std::vector<EveEntry> entries;
};

/// The pulse Eve lets through, if any. bypass_channel marks a pulse injected
/// after the lossy path (the QND attack's lossless channel).
struct Forwarded {
  std::optional<PulseEvent> pulse;
  bool bypass_channel = false;
};

struct AttackStep {
  Forwarded forwarded;
  EveEntry record;
};

/// Alice's bit for one of her two B92 states.
int decode_b92_alice(PolarizationState state);

/// Alice's bit for any of her preparation states under the given scheme.
int decode_alice(PolarizationState state, Scheme scheme);

/// Intercept one pulse and resend. Vacuum passes through untouched.
AttackStep intercept_resend(const PulseEvent& pulse, InterceptStrategy strategy, Rng& rng,
                            ResendModel resend = ResendModel::best_guess,
                            std::uint32_t forward_photons = 0);

/// Tap Binomial(n, t) photons; the remainder goes on unchanged.
AttackStep beamsplit_attack(const PulseEvent& pulse, double tap_ratio, Rng& rng,
                            Scheme scheme = Scheme::b92);

/// Per-pulse QND step: keep n >= 2 pulses and forward one fresh photon over a
/// lossless channel, suppress everything else.
AttackStep qnd_step(const PulseEvent& pulse, Scheme scheme = Scheme::b92);

/// Dispatch on the model. For intercept kinds the pulse is attacked with
/// probability model.fraction.
AttackStep apply_attack(const AttackModel& model, const PulseEvent& pulse, Rng& rng,
                        Scheme scheme = Scheme::b92);

struct StreamAttack {
  std::vector<Forwarded> forwarded;
  EveRecord record;
};

/// Attack each pulse independently with probability f. Each tick draws from
/// its own eve substream of seed.
StreamAttack partial_intercept(std::span<const PulseEvent> stream, double fraction,
                               InterceptStrategy strategy, std::uint64_t seed,
                               ResendModel resend = ResendModel::best_guess);

struct QndResult {
  std::vector<Forwarded> forwarded;
  EveRecord record;
  bool feasible = false;
  double multi_photon_rate = 0.0;  // per pulse, measured on the stream
};

/// QND attack over a stream. Feasible when the stream's n >= 2 rate is at
/// least Bob's baseline per-pulse detection probability.
QndResult qnd_attack(std::span<const PulseEvent> stream, double bob_detection_rate);

/// Analytic feasibility: P(n >= 2) at mu against Bob's detection probability.
bool qnd_feasible(double mu, double bob_detection_rate);

}  // namespace fsqkd
