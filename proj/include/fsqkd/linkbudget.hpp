#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fsqkd::link {

/// Ground-to-satellite link parameters. Defaults describe the nighttime,
/// full-moon, 10-arcsecond-seeing case without tilt control.
struct LinkParams {
  double wavelength = 770e-9;          // m
  double tx_aperture = 0.20;           // m
  double rx_aperture = 0.20;           // m
  double range = 300e3;                // m
  double seeing_multiplier = 10.0;     // wander as a multiple of the diffraction spot
  double pulse_rate = 10e6;            // Hz
  double mean_photon = 1.0;            // photons per pulse
  double atmospheric_transmission = 0.8;
  double detector_efficiency = 0.65;
  double protocol_efficiency = 0.25;   // 0.25 for B92, 0.5 for BB84
  double radiance = 4e15;              // photons s^-1 m^-2 sr^-1 um^-1
  double filter_bandwidth = 1.0;       // nm
  double receiver_fov = 5.0;           // arcsec, angular radius of the acceptance cone
  double gate_window = 1e-9;           // s
  double dark_rate = 50.0;             // Hz
  double pass_duration = 480.0;        // s, whole overhead pass
  double qkd_duration = 60.0;          // s of QKD transmission within the pass
  bool tilt_control = false;
  /// Detector trigger rate; <= 0 derives it from the bright timing pulse.
  double trigger_rate = 0.0;           // Hz
  /// Detected bright-pulse photons per transmitted pulse relative to one
  /// photon collected through the same link; sets the derived trigger rate.
  double bright_pulse_margin = 37.5;
  /// Misalignment and polarizer error folded into the post-processing estimate.
  double optical_ber = 0.015;
  /// Parity bits disclosed per raw bit during error correction.
  double reconciliation_leak_fraction = 0.25;
  std::uint64_t security_parameter = 30;

  void validate() const;
};

/// Preset by name: "night", "tilt", "day".
LinkParams preset(std::string_view name);

/// Diffraction-limited spot diameter, lambda * R / D_tx.
double diffraction_spot_diameter(const LinkParams& p);

/// (D_rx / (seeing * spot))^2 clamped to 1; tilt control removes the seeing
/// factor.
double collection_efficiency(const LinkParams& p);

/// pulse_rate * min(mu, 1) * collection * eta_atm * eta_D * eta_Q.
double key_rate(const LinkParams& p);

/// Collecting area of an aperture of diameter d.
double collecting_area(double diameter);

/// Solid angle of a cone with the given angular radius in arcseconds.
double solid_angle(double radius_arcsec);

/// radiance * area * solid angle * bandwidth (nm converted to um).
double background_rate(const LinkParams& p);

/// Bright-pulse detector triggers per second.
double trigger_rate(const LinkParams& p);

/// (background + dark) * gate / 2 per trigger, normalized to the sifted
/// detections per trigger.
double background_ber(const LinkParams& p, double trigger_rate_hz, double key_rate_hz);

struct PassYield {
  std::uint64_t raw_bits = 0;
  std::uint64_t post_processing_estimate = 0;
};

PassYield pass_yield(const LinkParams& p);

struct XorRelay {
  std::vector<std::uint8_t> broadcast;
  std::vector<std::uint8_t> bob_final;
};

/// Satellite broadcasts k_A xor k_B; Bob recovers k_A by xoring his own key.
XorRelay xor_relay(std::span<const std::uint8_t> key_alice_sat,
                   std::span<const std::uint8_t> key_bob_sat);

struct Report {
  double spot_diameter = 0.0;
  double collection_efficiency = 0.0;
  double key_rate = 0.0;
  double background_rate = 0.0;
  double trigger_rate = 0.0;
  double ber = 0.0;
  std::uint64_t raw_bits = 0;
  std::uint64_t final_bits = 0;
};

Report evaluate(const LinkParams& p);

/// Names accepted by set_parameter / sweep.
const std::vector<std::string>& parameter_names();

void set_parameter(LinkParams& p, std::string_view name, double value);
double get_parameter(const LinkParams& p, std::string_view name);

struct SweepRow {
  double value = 0.0;
  Report report;
};

/// Evaluate at `steps` evenly spaced values of one parameter, endpoints included.
std::vector<SweepRow> sweep(const LinkParams& base, std::string_view name, double from, double to,
                            std::size_t steps);

std::string format_text(const LinkParams& p, const Report& r);
std::string csv_header(bool with_sweep_column);
std::string csv_row(const Report& r);

}  // namespace fsqkd::link
