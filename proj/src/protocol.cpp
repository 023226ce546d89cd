#include "fsqkd/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsqkd/errors.hpp"

namespace fsqkd {

const char* to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::raw: return "raw";
    case Stage::sifted: return "sifted";
    case Stage::reconciled: return "reconciled";
    case Stage::amplified: return "amplified";
    case Stage::final: return "final";
  }
  return "?";
}

KeyBuffer KeyBuffer::from_bits(std::vector<std::uint8_t> bits, Stage stage) {
  KeyBuffer k(stage);
  k.ticks_.resize(bits.size());
  std::iota(k.ticks_.begin(), k.ticks_.end(), std::uint64_t{0});
  for (auto& b : bits) b &= 1U;
  k.bits_ = std::move(bits);
  return k;
}

void KeyBuffer::push_back(std::uint64_t tick, int bit) {
  if (!ticks_.empty() && tick <= ticks_.back())
    throw ProtocolError("key buffer tick indices must be strictly increasing");
  ticks_.push_back(tick);
  bits_.push_back(static_cast<std::uint8_t>(bit & 1));
}

void KeyBuffer::advance(Stage next) {
  if (next < stage_) throw ProtocolError("key buffer stage cannot move backwards");
  stage_ = next;
}

void KeyBuffer::erase_positions(std::vector<std::size_t> positions) {
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  std::size_t out = 0;
  std::size_t p = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (p < positions.size() && positions[p] == i) {
      ++p;
      continue;
    }
    bits_[out] = bits_[i];
    ticks_[out] = ticks_[i];
    ++out;
  }
  bits_.resize(out);
  ticks_.resize(out);
}

void KeyBuffer::truncate(std::size_t n) {
  if (n < bits_.size()) {
    bits_.resize(n);
    ticks_.resize(n);
  }
}

PulseEvent alice_round(std::uint64_t tick, int bit, const PulseSource& source, Rng& rng) {
  return PulseEvent{tick, sample_photon_count(source, rng), encode_b92(bit, Party::alice)};
}

DetectionRecord bob_round(const ArrivalEvent& arrival, int bob_bit, const ChannelParams& params,
                          Rng& rng, Routing routing) {
  return measure_b92(arrival, bob_bit, params, rng, routing);
}

SiftResult sift(std::span<const std::uint8_t> alice_bits, std::span<const std::uint8_t> bob_bits,
                std::span<const DetectionRecord> detections) {
  if (alice_bits.size() != detections.size() || bob_bits.size() != detections.size())
    throw ProtocolError("sift: sequences are not tick-aligned");
  SiftResult r;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    if (d.outcome == Outcome::dual) {
      ++r.dual_fire_count;
    } else if (d.is_bit()) {
      r.detected_indices.push_back(d.tick_index);
      r.alice_key.push_back(d.tick_index, alice_bits[i]);
      r.bob_key.push_back(d.tick_index, d.bit());
    }
  }
  return r;
}

SiftResult sift_bb84(std::span<const std::uint8_t> alice_bits,
                     std::span<const std::uint8_t> alice_bases,
                     std::span<const std::uint8_t> bob_bases,
                     std::span<const DetectionRecord> detections) {
  const auto n = detections.size();
  if (alice_bits.size() != n || alice_bases.size() != n || bob_bases.size() != n)
    throw ProtocolError("sift_bb84: sequences are not tick-aligned");
  SiftResult r;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = detections[i];
    if (d.outcome == Outcome::dual) {
      ++r.dual_fire_count;
      continue;
    }
    if (!d.is_bit()) continue;
    r.detected_indices.push_back(d.tick_index);
    if (alice_bases[i] != bob_bases[i]) continue;
    r.alice_key.push_back(d.tick_index, alice_bits[i]);
    r.bob_key.push_back(d.tick_index, d.bit());
  }
  return r;
}

QberEstimate estimate_qber(KeyBuffer& alice_key, KeyBuffer& bob_key, double sample_fraction,
                           Rng& rng) {
  if (alice_key.empty() || bob_key.empty()) throw ProtocolError("estimate_qber: empty key");
  if (alice_key.size() != bob_key.size() ||
      !std::equal(alice_key.ticks().begin(), alice_key.ticks().end(), bob_key.ticks().begin()))
    throw ProtocolError("estimate_qber: keys are not aligned");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0))
    throw ParameterError("sample fraction must be in (0, 1]");

  const std::size_t n = alice_key.size();
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(sample_fraction * static_cast<double>(n))), 1, n);

  // Partial Fisher-Yates: the first k slots become the sample.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());

  QberEstimate est;
  est.disclosed = k;
  est.sample.reserve(k);
  for (auto i : idx) {
    est.sample.push_back({bob_key.ticks()[i], static_cast<std::uint8_t>(bob_key.bit(i))});
    if (alice_key.bit(i) != bob_key.bit(i)) ++est.mismatches;
  }
  est.qber = static_cast<double>(est.mismatches) / static_cast<double>(k);

  alice_key.erase_positions(idx);
  bob_key.erase_positions(idx);
  alice_key.add_leak(k);
  bob_key.add_leak(k);
  return est;
}

}  // namespace fsqkd
