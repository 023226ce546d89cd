#pragma once

#include <cstdint>

#include "fsqkd/photonics.hpp"
#include "fsqkd/rng.hpp"

namespace fsqkd {

/// Free-space path and Bob's gated detector pair.
struct ChannelParams {
  double transmittance = 1.0;        // eta_T, combined path transmission
  double detector_efficiency = 1.0;  // eta_D
  double background_rate = 0.0;      // Hz
  double dark_rate = 0.0;            // Hz
  double gate_window = 1.0e-9;       // s
  double trigger_rate = 1.0e6;       // Hz
  /// Per-detection bit-flip probability lumping misalignment and polarizer
  /// imperfections. Applied after detection by apply_optical_error.
  double optical_flip_probability = 0.0;

  void validate() const;
};

struct ArrivalEvent {
  std::uint64_t tick_index = 0;
  std::uint32_t surviving_photons = 0;
  PolarizationState polarization{};
};

enum class Outcome : std::uint8_t { none = 0, bit0 = 1, bit1 = 2, dual = 3 };
enum class Cause : std::uint8_t { none = 0, signal = 1, background = 2, dark = 3, mixed = 4 };

struct DetectionRecord {
  std::uint64_t tick_index = 0;
  Outcome outcome = Outcome::none;
  Cause cause = Cause::none;

  bool is_bit() const noexcept { return outcome == Outcome::bit0 || outcome == Outcome::bit1; }
  int bit() const noexcept { return outcome == Outcome::bit1 ? 1 : 0; }
};

/// How photons of one pulse are distributed over Bob's two analyzer paths.
enum class Routing : std::uint8_t {
  /// Passive 50/50 beamsplitter: the first photon takes the tick's chosen
  /// path, every further photon picks a path independently.
  beamsplitter = 0,
  /// Active switch: every photon of the pulse meets the chosen analyzer.
  switched = 1,
};

/// Binomial thinning of the pulse at the channel transmittance. Polarization
/// is preserved.
ArrivalEvent transmit(const PulseEvent& pulse, const ChannelParams& params, Rng& rng);

/// Independent survival of each photon with probability p.
std::uint32_t thin(std::uint32_t photons, double p, Rng& rng);

/// Bob's B92 receiver. Path b carries the analyzer encode_b92(b, bob) and
/// feeds detector b; a photon that fails its analyzer is discarded.
DetectionRecord measure_b92(const ArrivalEvent& arrival, int bob_bit, const ChannelParams& params,
                            Rng& rng, Routing routing = Routing::beamsplitter);

/// BB84 receiver in the given basis: a polarizing beamsplitter routes each
/// photon to detector 0 or 1.
DetectionRecord measure_bb84(const ArrivalEvent& arrival, Basis basis, const ChannelParams& params,
                             Rng& rng);

/// (R_bg + R_dark) * gate. Throws ParameterError when the product reaches 1.
double noise_click_probability(const ChannelParams& params);

/// Swap bit0 and bit1 with the given probability; none and dual pass through.
DetectionRecord apply_optical_error(const DetectionRecord& record, double flip_probability,
                                    Rng& rng);

}  // namespace fsqkd
