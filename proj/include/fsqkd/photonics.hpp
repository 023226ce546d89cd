#pragma once

#include <cstdint>

#include "fsqkd/rng.hpp"

namespace fsqkd {

/// Linear polarization, stored as an angle in degrees from horizontal,
/// normalized to [0, 180).
class PolarizationState {
 public:
  constexpr PolarizationState() = default;
  explicit PolarizationState(double degrees);

  constexpr double degrees() const noexcept { return angle_; }

  friend constexpr bool operator==(PolarizationState, PolarizationState) = default;

  static const PolarizationState H;
  static const PolarizationState V;
  static const PolarizationState Plus45;
  static const PolarizationState Minus45;

 private:
  struct Normalized {};
  constexpr PolarizationState(double degrees, Normalized) : angle_(degrees) {}

  double angle_ = 0.0;
};

inline constexpr PolarizationState PolarizationState::H{0.0, Normalized{}};
inline constexpr PolarizationState PolarizationState::V{90.0, Normalized{}};
inline constexpr PolarizationState PolarizationState::Plus45{45.0, Normalized{}};
inline constexpr PolarizationState PolarizationState::Minus45{135.0, Normalized{}};

enum class Scheme : std::uint8_t { b92 = 0, bb84 = 1 };
enum class Party { alice, bob };
enum class Basis : std::uint8_t { rectilinear = 0, diagonal = 1 };

/// Malus-law transmission probability cos^2 of the angle between a photon's
/// polarization and an analyzer. Exact for multiples of 45 degrees.
double pass_probability(PolarizationState state, PolarizationState analyzer) noexcept;

/// B92 alphabet. Alice prepares 0 -> V, 1 -> +45; Bob's analyzer for his bit
/// is 0 -> -45, 1 -> H.
PolarizationState encode_b92(int bit, Party party);

/// BB84 alphabet: rectilinear 0 -> H, 1 -> V; diagonal 0 -> +45, 1 -> -45.
PolarizationState encode_bb84(int bit, Basis basis);

/// Weak coherent pulse source.
struct PulseSource {
  double mean_photon_number = 0.0;  // mu
  double pulse_rate = 1.0e6;        // Hz

  void validate() const;
};

struct PulseEvent {
  std::uint64_t tick_index = 0;
  std::uint32_t photon_count = 0;
  PolarizationState polarization{};
};

/// Poisson(mu) draw by sequential inversion. Deterministic given the generator.
std::uint32_t sample_photon_count(const PulseSource& source, Rng& rng);

/// P(n photons) for a Poisson pulse of mean mu.
double poisson_pmf(double mu, unsigned n);

/// P(n >= 1).
double nonvacuum_probability(double mu);

/// P(n >= 2).
double multi_photon_probability(double mu);

/// P(n > 1 | n >= 1), the multi-photon share of non-empty pulses.
double multi_photon_fraction(double mu);

}  // namespace fsqkd
