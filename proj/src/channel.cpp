#include "fsqkd/channel.hpp"

#include <cmath>

#include "fsqkd/errors.hpp"

namespace fsqkd {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

struct Clicks {
  bool signal[2] = {false, false};
  Cause noise[2] = {Cause::none, Cause::none};
};

// Background and dark counts split evenly between the detectors.
void add_noise(Clicks& clicks, const ChannelParams& params, Rng& rng) {
  const double p_bg = params.background_rate * params.gate_window / 2.0;
  const double p_dark = params.dark_rate * params.gate_window / 2.0;
  for (auto& n : clicks.noise) {
    const double u = rng.uniform();
    if (u < p_bg)
      n = Cause::background;
    else if (u < p_bg + p_dark)
      n = Cause::dark;
  }
}

DetectionRecord classify(std::uint64_t tick, const Clicks& c) {
  DetectionRecord rec;
  rec.tick_index = tick;
  const bool fired[2] = {c.signal[0] || c.noise[0] != Cause::none,
                         c.signal[1] || c.noise[1] != Cause::none};
  if (fired[0] && fired[1])
    rec.outcome = Outcome::dual;
  else if (fired[0])
    rec.outcome = Outcome::bit0;
  else if (fired[1])
    rec.outcome = Outcome::bit1;
  else
    return rec;

  // A detector whose signal photon fired is attributed to the signal even if
  // a noise count landed on it in the same gate.
  Cause per[2] = {Cause::none, Cause::none};
  for (int d = 0; d < 2; ++d) {
    if (c.signal[d])
      per[d] = Cause::signal;
    else
      per[d] = c.noise[d];
  }
  if (rec.outcome == Outcome::dual)
    rec.cause = per[0] == per[1] ? per[0] : Cause::mixed;
  else
    rec.cause = fired[0] ? per[0] : per[1];
  return rec;
}

}  // namespace

void ChannelParams::validate() const {
  if (!is_probability(transmittance)) throw ParameterError("transmittance must be in [0,1]");
  if (!is_probability(detector_efficiency))
    throw ParameterError("detector efficiency must be in [0,1]");
  if (!(background_rate >= 0.0) || !(dark_rate >= 0.0))
    throw ParameterError("noise rates must be >= 0");
  if (!(gate_window > 0.0)) throw ParameterError("gate window must be > 0");
  if (!(trigger_rate > 0.0)) throw ParameterError("trigger rate must be > 0");
  if (!(optical_flip_probability >= 0.0 && optical_flip_probability <= 0.5))
    throw ParameterError("optical flip probability must be in [0, 0.5]");
  noise_click_probability(*this);
}

std::uint32_t thin(std::uint32_t photons, double p, Rng& rng) {
  if (p >= 1.0) return photons;
  std::uint32_t kept = 0;
  for (std::uint32_t i = 0; i < photons; ++i)
    if (rng.bernoulli(p)) ++kept;
  return kept;
}

ArrivalEvent transmit(const PulseEvent& pulse, const ChannelParams& params, Rng& rng) {
  return ArrivalEvent{pulse.tick_index, thin(pulse.photon_count, params.transmittance, rng),
                      pulse.polarization};
}

DetectionRecord measure_b92(const ArrivalEvent& arrival, int bob_bit, const ChannelParams& params,
                            Rng& rng, Routing routing) {
  if (bob_bit != 0 && bob_bit != 1) throw ParameterError("bob bit must be 0 or 1");
  Clicks clicks;
  const double pass[2] = {
      pass_probability(arrival.polarization, encode_b92(0, Party::bob)),
      pass_probability(arrival.polarization, encode_b92(1, Party::bob)),
  };
  for (std::uint32_t i = 0; i < arrival.surviving_photons; ++i) {
    int path = bob_bit;
    if (routing == Routing::beamsplitter && i > 0) path = rng.bit();
    // Draws are taken unconditionally so the stream position does not depend
    // on earlier outcomes within the tick.
    const bool passed = rng.uniform() < pass[path];
    const bool detected = rng.uniform() < params.detector_efficiency;
    if (passed && detected) clicks.signal[path] = true;
  }
  add_noise(clicks, params, rng);
  return classify(arrival.tick_index, clicks);
}

DetectionRecord measure_bb84(const ArrivalEvent& arrival, Basis basis, const ChannelParams& params,
                             Rng& rng) {
  Clicks clicks;
  const double p0 = pass_probability(arrival.polarization, encode_bb84(0, basis));
  for (std::uint32_t i = 0; i < arrival.surviving_photons; ++i) {
    const int port = rng.uniform() < p0 ? 0 : 1;
    if (rng.uniform() < params.detector_efficiency) clicks.signal[port] = true;
  }
  add_noise(clicks, params, rng);
  return classify(arrival.tick_index, clicks);
}

double noise_click_probability(const ChannelParams& params) {
  const double p = (params.background_rate + params.dark_rate) * params.gate_window;
  if (!(p < 1.0)) throw ParameterError("per-gate noise probability must be < 1");
  return p;
}

DetectionRecord apply_optical_error(const DetectionRecord& record, double flip_probability,
                                    Rng& rng) {
  if (!(flip_probability >= 0.0 && flip_probability <= 0.5))
    throw ParameterError("flip probability must be in [0, 0.5]");
  DetectionRecord out = record;
  if (!record.is_bit()) return out;
  if (flip_probability > 0.0 && rng.bernoulli(flip_probability))
    out.outcome = record.outcome == Outcome::bit0 ? Outcome::bit1 : Outcome::bit0;
  return out;
}

}  // namespace fsqkd
