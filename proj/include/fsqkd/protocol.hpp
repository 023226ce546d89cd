#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsqkd/channel.hpp"
#include "fsqkd/photonics.hpp"
#include "fsqkd/rng.hpp"

namespace fsqkd {

enum class Stage : std::uint8_t { raw = 0, sifted = 1, reconciled = 2, amplified = 3, final = 4 };

const char* to_string(Stage stage) noexcept;

/// Indexed bit sequence moving through the post-processing pipeline.
///
/// Tick indices are strictly increasing. The stage only moves forward and the
/// leaked-bit ledger only grows.
class KeyBuffer {
 public:
  KeyBuffer() = default;
  explicit KeyBuffer(Stage stage) : stage_(stage) {}

  /// Bits with consecutive tick indices 0..n-1.
  static KeyBuffer from_bits(std::vector<std::uint8_t> bits, Stage stage);

  void push_back(std::uint64_t tick, int bit);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::span<const std::uint64_t> ticks() const noexcept { return ticks_; }
  int bit(std::size_t i) const { return bits_.at(i); }
  void flip(std::size_t i) { bits_.at(i) ^= 1U; }

  Stage stage() const noexcept { return stage_; }
  void advance(Stage next);

  std::uint64_t leaked_bits() const noexcept { return leaked_; }
  void add_leak(std::uint64_t n) noexcept { leaked_ += n; }

  /// Drop the given positions (any order, duplicates ignored).
  void erase_positions(std::vector<std::size_t> positions);

  /// Keep the first n bits.
  void truncate(std::size_t n);

  friend bool operator==(const KeyBuffer&, const KeyBuffer&) = default;

 private:
  std::vector<std::uint8_t> bits_;
  std::vector<std::uint64_t> ticks_;
  Stage stage_ = Stage::raw;
  std::uint64_t leaked_ = 0;
};

struct SiftResult {
  KeyBuffer alice_key{Stage::sifted};
  KeyBuffer bob_key{Stage::sifted};
  std::vector<std::uint64_t> detected_indices;
  std::uint64_t dual_fire_count = 0;
};

/// One Alice tick: Poisson photon number, B92 state for her bit.
PulseEvent alice_round(std::uint64_t tick, int bit, const PulseSource& source, Rng& rng);

/// One Bob tick; a thin wrapper over measure_b92.
DetectionRecord bob_round(const ArrivalEvent& arrival, int bob_bit, const ChannelParams& params,
                          Rng& rng, Routing routing = Routing::beamsplitter);

/// B92 sifting. Keeps every tick whose outcome is a single-detector click;
/// Bob's key bit is the detector that fired. Dual fires are counted, not kept.
SiftResult sift(std::span<const std::uint8_t> alice_bits, std::span<const std::uint8_t> bob_bits,
                std::span<const DetectionRecord> detections);

/// BB84 sifting: single-detector clicks where Alice's and Bob's bases agree.
SiftResult sift_bb84(std::span<const std::uint8_t> alice_bits,
                     std::span<const std::uint8_t> alice_bases,
                     std::span<const std::uint8_t> bob_bases,
                     std::span<const DetectionRecord> detections);

struct QberSampleEntry {
  std::uint64_t tick = 0;
  std::uint8_t bit = 0;
};

struct QberEstimate {
  double qber = 0.0;
  std::uint64_t disclosed = 0;
  std::uint64_t mismatches = 0;
  /// Bob's disclosed (tick, bit) pairs, in tick order.
  std::vector<QberSampleEntry> sample;
};

/// Disclose a random subset of round(fraction * n) positions (at least one),
/// compare, and remove them from both keys. The disclosed count is added to
/// both ledgers.
QberEstimate estimate_qber(KeyBuffer& alice_key, KeyBuffer& bob_key, double sample_fraction,
                           Rng& rng);

}  // namespace fsqkd
