#include "fsqkd/photonics.hpp"

#include <cmath>
#include <numbers>

#include "fsqkd/errors.hpp"

namespace fsqkd {

namespace {

double normalize_degrees(double deg) {
  double a = std::fmod(deg, 180.0);
  if (a < 0.0) a += 180.0;
  if (a >= 180.0) a -= 180.0;  // fmod rounding on tiny negatives
  return a;
}

void require_bit(int bit) {
  if (bit != 0 && bit != 1) throw ParameterError("bit must be 0 or 1");
}

}  // namespace

PolarizationState::PolarizationState(double degrees) : angle_(normalize_degrees(degrees)) {}

double pass_probability(PolarizationState state, PolarizationState analyzer) noexcept {
  const double delta = normalize_degrees(state.degrees() - analyzer.degrees());
  if (delta == 0.0) return 1.0;
  if (delta == 90.0) return 0.0;
  if (delta == 45.0 || delta == 135.0) return 0.5;
  const double c = std::cos(delta * std::numbers::pi / 180.0);
  return c * c;
}

PolarizationState encode_b92(int bit, Party party) {
  require_bit(bit);
  if (party == Party::alice) return bit == 0 ? PolarizationState::V : PolarizationState::Plus45;
  return bit == 0 ? PolarizationState::Minus45 : PolarizationState::H;
}

PolarizationState encode_bb84(int bit, Basis basis) {
  require_bit(bit);
  if (basis == Basis::rectilinear) return bit == 0 ? PolarizationState::H : PolarizationState::V;
  return bit == 0 ? PolarizationState::Plus45 : PolarizationState::Minus45;
}

void PulseSource::validate() const {
  if (!(mean_photon_number >= 0.0) || !std::isfinite(mean_photon_number))
    throw ParameterError("mean photon number must be finite and >= 0");
  if (!(pulse_rate > 0.0)) throw ParameterError("pulse rate must be > 0");
}

std::uint32_t sample_photon_count(const PulseSource& source, Rng& rng) {
  const double mu = source.mean_photon_number;
  if (!(mu >= 0.0)) throw ParameterError("mean photon number must be >= 0");
  if (mu == 0.0) return 0;
  // Inversion: walk the cdf until it exceeds u. Fine for the small mu of weak pulses.
  const double u = rng.uniform();
  double p = std::exp(-mu);
  double cdf = p;
  std::uint32_t n = 0;
  while (u >= cdf) {
    ++n;
    p *= mu / n;
    const double next = cdf + p;
    if (next == cdf) break;  // tail underflow
    cdf = next;
  }
  return n;
}

double poisson_pmf(double mu, unsigned n) {
  if (!(mu >= 0.0)) throw ParameterError("mean photon number must be >= 0");
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0));
}

double nonvacuum_probability(double mu) {
  if (!(mu >= 0.0)) throw ParameterError("mean photon number must be >= 0");
  return -std::expm1(-mu);
}

double multi_photon_probability(double mu) {
  if (!(mu >= 0.0)) throw ParameterError("mean photon number must be >= 0");
  return -std::expm1(-mu) - mu * std::exp(-mu);
}

double multi_photon_fraction(double mu) {
  if (!(mu > 0.0)) throw ParameterError("multi_photon_fraction needs mu > 0");
  return multi_photon_probability(mu) / nonvacuum_probability(mu);
}

}  // namespace fsqkd
