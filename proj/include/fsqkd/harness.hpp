#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsqkd/adversary.hpp"
#include "fsqkd/auth.hpp"
#include "fsqkd/channel.hpp"
#include "fsqkd/kernels.hpp"
#include "fsqkd/messages.hpp"
#include "fsqkd/photonics.hpp"
#include "fsqkd/protocol.hpp"
#include "fsqkd/reconciliation.hpp"

namespace fsqkd {

enum class PrivacyMode : std::uint8_t { subsets, drop };

struct OutputPaths {
  std::string report;      // text report
  std::string csv;         // CSV report
  std::string transcript;  // binary message dump
};

/// Everything that determines a session. Two runs with equal configs produce
/// bit-identical transcripts regardless of thread count.
struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::uint64_t pulse_count = 100'000;
  Scheme scheme = Scheme::b92;
  PulseSource source{0.3, 1.0e6};
  bool force_single_photon = false;
  Routing routing = Routing::beamsplitter;
  ChannelParams channel{};
  AttackModel attack{};

  double qber_sample_fraction = 0.1;
  double qber_ceiling = 0.12;

  std::uint32_t rows = 16;
  std::uint32_t cols = 16;
  std::uint32_t max_passes = 128;

  PrivacyMode privacy_mode = PrivacyMode::subsets;
  std::uint64_t security_parameter = 30;
  EveBoundPolicy eve_bound = EveBoundPolicy::conservative;

  std::size_t auth_pool_bits = 16384;
  /// Bits moved from the final key into the pool; negative restores what the
  /// session consumed.
  std::int64_t replenish_bits = -1;
  /// Pool carried over from an earlier session; random from the seed if unset.
  std::optional<AuthKeyPool> initial_pool;

  /// File of raw bytes supplying Alice's bits (LSB first) instead of the
  /// seeded generator.
  std::string alice_entropy_file;

  int threads = 0;
  Exec exec = Exec::parallel;

  /// Flip one bit of this classical message in flight (tamper testing).
  std::optional<std::uint64_t> tamper_message;

  OutputPaths output;

  void validate() const;
};

enum class Sender : std::uint8_t { alice = 0, bob = 1 };

struct TranscriptEntry {
  std::uint64_t id = 0;
  Sender sender = Sender::alice;
  std::vector<std::uint8_t> frame;  // serialized message as it crossed the channel
  AuthTagMsg tag;
};

struct StageLengths {
  std::uint64_t raw = 0;
  std::uint64_t sifted = 0;
  std::uint64_t reconciled = 0;
  std::uint64_t amplified = 0;
  std::uint64_t final = 0;
};

struct LeakageLedger {
  std::uint64_t qber_sample_bits = 0;
  std::uint64_t parity_bits = 0;
  std::uint64_t total() const noexcept { return qber_sample_bits + parity_bits; }
};

struct EveSummary {
  bool active = false;
  std::uint64_t acted_ticks = 0;
  std::uint64_t sifted_acted = 0;
  std::uint64_t sifted_guessed = 0;
  std::uint64_t sifted_correct = 0;
  std::optional<bool> qnd_feasible;
  double baseline_detection_rate = 0.0;
};

struct SessionTranscript {
  std::uint32_t schema_version = 1;
  std::vector<TranscriptEntry> messages;
  StageLengths lengths;

  std::uint64_t detections = 0;  // single-detector clicks
  std::uint64_t dual_fire_count = 0;
  double qber_estimate = 0.0;
  std::uint64_t qber_disclosed = 0;
  /// Simulation-side diagnostic: mismatches in the full sifted key before
  /// sampling. Not something the parties can observe.
  std::uint64_t sifted_errors = 0;
  std::uint64_t sifted_errors_background = 0;  // mismatches on noise-caused clicks

  LeakageLedger leakage;
  std::uint32_t reconciliation_passes = 0;
  std::uint64_t reconciliation_flips = 0;
  std::uint64_t eve_bound_bits = 0;
  EveSummary eve;

  std::uint64_t auth_bits_consumed = 0;
  bool pool_replenished = false;
  AuthKeyPool pool_snapshot;  // pool at session start, for offline verification
  AuthKeyPool pool_after;     // Alice's pool after replenishment

  bool aborted = false;
  std::string abort_reason;

  KeyBuffer final_key;      // Alice's delivered key
  KeyBuffer bob_final_key;  // Bob's delivered key
};

/// Seven-stage session: pool setup, random sequences, quantum transmission and
/// sifting, error-rate check, error correction, privacy amplification, pool
/// replenishment. Aborts on authentication failure, QBER above the ceiling,
/// or reconciliation that does not converge.
SessionTranscript run_session(const ScenarioConfig& config);

enum class ReportFormat { text, csv };

std::string render_report(const SessionTranscript& t, ReportFormat format);

/// Write the report to path. Throws std::runtime_error on I/O failure.
void emit_report(const SessionTranscript& t, ReportFormat format, const std::string& path);

/// Message frames, each followed by its AUTH_TAG frame.
std::vector<std::uint8_t> dump_transcript(const SessionTranscript& t);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> diagnostics;
};

/// Replay every tag against the pool snapshot and check the leakage ledger
/// against the disclosed bits actually present in the messages.
VerifyResult verify_transcript(const SessionTranscript& t);

}  // namespace fsqkd
