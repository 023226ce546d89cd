#pragma once

// Data-parallel kernels. Each has a serial reference path and an OpenMP path
// that must produce identical results; tests compare the two directly.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fsqkd/adversary.hpp"
#include "fsqkd/channel.hpp"
#include "fsqkd/messages.hpp"
#include "fsqkd/photonics.hpp"
#include "fsqkd/protocol.hpp"

namespace fsqkd {

enum class Exec : std::uint8_t { serial, parallel };

bool parallel_available() noexcept;

/// Set the OpenMP team size; n <= 0 leaves the runtime default. No-op without
/// OpenMP.
void set_thread_count(int n) noexcept;

// ---------------------------------------------------------------------------
// Quantum transmission

struct TransmissionSetup {
  Scheme scheme = Scheme::b92;
  PulseSource source{};
  /// Every pulse carries exactly one photon (ideal single-photon source).
  bool force_single_photon = false;
  ChannelParams channel{};
  AttackModel attack{};
  Routing routing = Routing::beamsplitter;
  std::uint64_t seed = 0;
};

struct TickResult {
  PulseEvent emitted{};
  std::uint32_t arrived_photons = 0;
  DetectionRecord detection{};
  EveEntry eve{};
};

/// One clock tick end to end: emission, attack, channel, detection, optical
/// error. Randomness comes only from the tick's own substreams.
///
/// For B92, bob_choice is Bob's analyzer bit; for BB84 it is his basis and
/// alice_basis is Alice's.
TickResult simulate_tick(const TransmissionSetup& setup, std::uint64_t tick, int alice_bit,
                         int alice_basis, int bob_choice);

/// simulate_tick over every tick. alice_bases may be empty for B92.
std::vector<TickResult> run_transmission(const TransmissionSetup& setup,
                                         std::span<const std::uint8_t> alice_bits,
                                         std::span<const std::uint8_t> alice_bases,
                                         std::span<const std::uint8_t> bob_choices,
                                         Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Two-dimensional block parity

struct ParityPassResult {
  Parity message;                     // Alice's disclosed parities
  std::uint64_t flips = 0;            // corrections Bob applied
  std::uint64_t failing_blocks = 0;   // blocks with any parity mismatch
  std::uint64_t failing_lines = 0;    // mismatched rows + columns, all blocks
};

/// One pass over blocks of rows x cols cells. Cell j of block b holds key
/// position permutation[b*rows*cols + j]; cells past the key end are zero
/// padding. Bob flips the intersection in blocks where exactly one row and one
/// column disagree.
ParityPassResult parity_pass(std::span<const std::uint8_t> alice, std::span<std::uint8_t> bob,
                             std::span<const std::size_t> permutation, std::uint32_t rows,
                             std::uint32_t cols, std::uint32_t pass_number,
                             Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Random-subset parities

/// Output bit i is the parity of key AND mask_i, where mask_i is drawn from
/// the privacy substream (seed, i) with each membership bit uniform.
void subset_parities(std::span<const std::uint8_t> key, std::uint64_t seed,
                     std::span<std::uint8_t> out, Exec exec = Exec::parallel);

/// Pack bits LSB-first into 64-bit words.
std::vector<std::uint64_t> pack_words(std::span<const std::uint8_t> bits);

}  // namespace fsqkd
