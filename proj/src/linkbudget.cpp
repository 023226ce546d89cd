#include "fsqkd/linkbudget.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <utility>

#include "fsqkd/errors.hpp"
#include "fsqkd/reconciliation.hpp"

namespace fsqkd::link {

namespace {

constexpr double kArcsecToRad = std::numbers::pi / (180.0 * 3600.0);

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

struct Field {
  const char* name;
  double LinkParams::*member;
};

// Boolean and integer fields are handled separately in set/get.
constexpr Field kFields[] = {
    {"wavelength", &LinkParams::wavelength},
    {"tx_aperture", &LinkParams::tx_aperture},
    {"rx_aperture", &LinkParams::rx_aperture},
    {"range", &LinkParams::range},
    {"seeing_multiplier", &LinkParams::seeing_multiplier},
    {"pulse_rate", &LinkParams::pulse_rate},
    {"mean_photon", &LinkParams::mean_photon},
    {"atmospheric_transmission", &LinkParams::atmospheric_transmission},
    {"detector_efficiency", &LinkParams::detector_efficiency},
    {"protocol_efficiency", &LinkParams::protocol_efficiency},
    {"radiance", &LinkParams::radiance},
    {"filter_bandwidth", &LinkParams::filter_bandwidth},
    {"receiver_fov", &LinkParams::receiver_fov},
    {"gate_window", &LinkParams::gate_window},
    {"dark_rate", &LinkParams::dark_rate},
    {"pass_duration", &LinkParams::pass_duration},
    {"qkd_duration", &LinkParams::qkd_duration},
    {"trigger_rate", &LinkParams::trigger_rate},
    {"bright_pulse_margin", &LinkParams::bright_pulse_margin},
    {"optical_ber", &LinkParams::optical_ber},
    {"reconciliation_leak_fraction", &LinkParams::reconciliation_leak_fraction},
};

}  // namespace

void LinkParams::validate() const {
  for (double v : {wavelength, tx_aperture, rx_aperture, range, pulse_rate, filter_bandwidth,
                   receiver_fov, gate_window})
    if (!(v > 0.0)) throw ParameterError("link parameters must be positive");
  if (!(seeing_multiplier >= 1.0)) throw ParameterError("seeing multiplier must be >= 1");
  if (!(mean_photon >= 0.0) || !(radiance >= 0.0) || !(dark_rate >= 0.0) ||
      !(pass_duration >= 0.0) || !(qkd_duration >= 0.0) || !(bright_pulse_margin > 0.0))
    throw ParameterError("link rates and durations must be non-negative");
  for (double v : {atmospheric_transmission, detector_efficiency, protocol_efficiency, optical_ber,
                   reconciliation_leak_fraction})
    if (!is_probability(v)) throw ParameterError("link efficiencies must be in [0,1]");
}

LinkParams preset(std::string_view name) {
  LinkParams p;
  if (name == "night") return p;
  if (name == "tilt") {
    p.tilt_control = true;
    return p;
  }
  if (name == "day") {
    p.radiance = 2e19;
    p.filter_bandwidth = 0.01;
    return p;
  }
  throw ParameterError("unknown preset: " + std::string(name));
}

double diffraction_spot_diameter(const LinkParams& p) {
  return p.wavelength / p.tx_aperture * p.range;
}

double collection_efficiency(const LinkParams& p) {
  const double wander = p.tilt_control ? 1.0 : p.seeing_multiplier;
  const double ratio = p.rx_aperture / (wander * diffraction_spot_diameter(p));
  return std::min(1.0, ratio * ratio);
}

double key_rate(const LinkParams& p) {
  return p.pulse_rate * std::min(p.mean_photon, 1.0) * collection_efficiency(p) *
         p.atmospheric_transmission * p.detector_efficiency * p.protocol_efficiency;
}

double collecting_area(double diameter) {
  return std::numbers::pi * diameter * diameter / 4.0;
}

double solid_angle(double radius_arcsec) {
  const double theta = radius_arcsec * kArcsecToRad;
  return std::numbers::pi * theta * theta;
}

double background_rate(const LinkParams& p) {
  return p.radiance * collecting_area(p.rx_aperture) * solid_angle(p.receiver_fov) *
         (p.filter_bandwidth * 1e-3);
}

double trigger_rate(const LinkParams& p) {
  if (p.trigger_rate > 0.0) return p.trigger_rate;
  return std::min(p.pulse_rate, p.pulse_rate * collection_efficiency(p) *
                                    p.atmospheric_transmission * p.bright_pulse_margin);
}

double background_ber(const LinkParams& p, double trigger_rate_hz, double key_rate_hz) {
  if (!(key_rate_hz > 0.0)) throw ParameterError("background BER needs a positive key rate");
  if (!(trigger_rate_hz >= key_rate_hz))
    throw ParameterError("trigger rate must be at least the key rate");
  const double noise_per_gate = (background_rate(p) + p.dark_rate) * p.gate_window;
  return noise_per_gate * 0.5 / (key_rate_hz / trigger_rate_hz);
}

PassYield pass_yield(const LinkParams& p) {
  PassYield y;
  const double duration = std::min(p.qkd_duration, p.pass_duration);
  if (!(duration > 0.0)) return y;
  const double rate = key_rate(p);
  y.raw_bits = static_cast<std::uint64_t>(std::floor(rate * duration));
  if (y.raw_bits == 0) return y;
  const double ber = background_ber(p, trigger_rate(p), rate) + p.optical_ber;
  const auto leaked = static_cast<std::uint64_t>(
      std::ceil(p.reconciliation_leak_fraction * static_cast<double>(y.raw_bits)));
  // Photon-number exposure is left to the simulation; only the error-rate bound applies here.
  const auto eve = eve_bound_bits(EveBoundPolicy::conservative, y.raw_bits, ber, 0.0);
  y.post_processing_estimate = compute_final_length(y.raw_bits, leaked, eve, p.security_parameter);
  return y;
}

XorRelay xor_relay(std::span<const std::uint8_t> key_alice_sat,
                   std::span<const std::uint8_t> key_bob_sat) {
  if (key_alice_sat.size() != key_bob_sat.size())
    throw ParameterError("xor relay: keys must have equal length");
  XorRelay r;
  r.broadcast.resize(key_alice_sat.size());
  r.bob_final.resize(key_alice_sat.size());
  for (std::size_t i = 0; i < key_alice_sat.size(); ++i) {
    r.broadcast[i] = (key_alice_sat[i] ^ key_bob_sat[i]) & 1U;
    r.bob_final[i] = (r.broadcast[i] ^ key_bob_sat[i]) & 1U;
  }
  return r;
}

Report evaluate(const LinkParams& p) {
  p.validate();
  Report r;
  r.spot_diameter = diffraction_spot_diameter(p);
  r.collection_efficiency = collection_efficiency(p);
  r.key_rate = key_rate(p);
  r.background_rate = background_rate(p);
  r.trigger_rate = trigger_rate(p);
  r.ber = r.key_rate > 0.0 ? background_ber(p, r.trigger_rate, r.key_rate) : 0.0;
  const auto y = pass_yield(p);
  r.raw_bits = y.raw_bits;
  r.final_bits = y.post_processing_estimate;
  return r;
}

const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& f : kFields) v.emplace_back(f.name);
    v.emplace_back("tilt_control");
    v.emplace_back("security_parameter");
    return v;
  }();
  return names;
}

void set_parameter(LinkParams& p, std::string_view name, double value) {
  for (const auto& f : kFields)
    if (name == f.name) {
      p.*f.member = value;
      return;
    }
  if (name == "tilt_control") {
    p.tilt_control = value != 0.0;
    return;
  }
  if (name == "security_parameter") {
    if (!(value >= 0.0)) throw ParameterError("security parameter must be >= 0");
    p.security_parameter = static_cast<std::uint64_t>(value);
    return;
  }
  throw ParameterError("unknown link parameter: " + std::string(name));
}

double get_parameter(const LinkParams& p, std::string_view name) {
  for (const auto& f : kFields)
    if (name == f.name) return p.*f.member;
  if (name == "tilt_control") return p.tilt_control ? 1.0 : 0.0;
  if (name == "security_parameter") return static_cast<double>(p.security_parameter);
  throw ParameterError("unknown link parameter: " + std::string(name));
}

std::vector<SweepRow> sweep(const LinkParams& base, std::string_view name, double from, double to,
                            std::size_t steps) {
  if (steps == 0) throw ParameterError("sweep needs at least one step");
  std::vector<SweepRow> rows;
  rows.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    LinkParams p = base;
    const double v = from + (to - from) * t;
    set_parameter(p, name, v);
    rows.push_back({v, evaluate(p)});
  }
  return rows;
}

std::string format_text(const LinkParams& p, const Report& r) {
  std::ostringstream os;
  os.precision(4);
  os << "link budget\n"
     << "  wavelength            " << p.wavelength * 1e9 << " nm\n"
     << "  range                 " << p.range / 1e3 << " km\n"
     << "  tilt control          " << (p.tilt_control ? "on" : "off") << "\n"
     << "  spot diameter         " << r.spot_diameter << " m\n"
     << "  collection efficiency " << r.collection_efficiency << "\n"
     << "  key rate              " << r.key_rate << " Hz\n"
     << "  background rate       " << r.background_rate << " Hz\n"
     << "  trigger rate          " << r.trigger_rate << " Hz\n"
     << "  background BER        " << r.ber << "\n"
     << "  raw bits per pass     " << r.raw_bits << "\n"
     << "  final bits estimate   " << r.final_bits << "\n";
  return os.str();
}

std::string csv_header(bool with_sweep_column) {
  return std::string(with_sweep_column ? "value," : "") +
         "key_rate,background_rate,ber,raw_bits,final_bits";
}

std::string csv_row(const Report& r) {
  std::ostringstream os;
  os.precision(10);
  os << r.key_rate << ',' << r.background_rate << ',' << r.ber << ',' << r.raw_bits << ','
     << r.final_bits;
  return os.str();
}

}  // namespace fsqkd::link
