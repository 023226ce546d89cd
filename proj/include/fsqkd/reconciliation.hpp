#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "fsqkd/kernels.hpp"
#include "fsqkd/messages.hpp"
#include "fsqkd/protocol.hpp"
#include "fsqkd/rng.hpp"

namespace fsqkd {

inline constexpr std::size_t kPadding = static_cast<std::size_t>(-1);

/// rows x cols matrix folded from a key. source[j] is the key position held by
/// cell j (row-major), or kPadding for a zero pad cell.
struct ParityBlock {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> bits;
  std::vector<std::size_t> source;

  std::size_t valid_bits() const noexcept;
};

/// Fold key[permutation[k]] into consecutive blocks, padding the last with zeros.
/// An empty permutation means natural order.
std::vector<ParityBlock> fold_blocks(std::span<const std::uint8_t> key,
                                     std::span<const std::size_t> permutation,
                                     std::uint32_t rows, std::uint32_t cols);

/// Row parities followed by column parities.
std::vector<std::uint8_t> block_parities(const ParityBlock& block);

/// Uniform random permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

struct ReconciliationReport {
  KeyBuffer corrected_bob_key{Stage::reconciled};
  std::uint64_t parity_bits_disclosed = 0;
  double residual_error_estimate = 0.0;
  std::uint32_t passes = 0;
  std::uint64_t flips = 0;
  /// Set when max_passes ran out with parity failures still present.
  bool residual_flagged = false;
  /// One PARITY message per pass, in order.
  std::vector<Parity> messages;
};

/// Iterated two-dimensional block-parity error correction. Each pass uses a
/// fresh shared permutation drawn from (seed, pass). Stops after two
/// consecutive passes with every parity matching, or after max_passes.
ReconciliationReport block_parity_reconcile(const KeyBuffer& alice_key, const KeyBuffer& bob_key,
                                            std::uint32_t rows, std::uint32_t cols,
                                            std::uint32_t max_passes, std::uint64_t seed,
                                            Exec exec = Exec::parallel);

struct DropResult {
  std::vector<std::uint8_t> bits;
  std::uint32_t dropped_row = 0;
  std::uint32_t dropped_col = 0;
};

/// Remove one uniformly chosen row and column from the block. Padding cells are
/// skipped, so a full block yields (rows-1)*(cols-1) bits.
DropResult privacy_amplify_drop(const ParityBlock& block, Rng& rng);

struct DropKeyResult {
  std::vector<std::uint8_t> bits;
  /// (row, col) per block, disclosed in clear.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dropped;
};

/// Row/column drop over a whole key folded in natural order.
DropKeyResult privacy_amplify_drop_key(std::span<const std::uint8_t> key, std::uint32_t rows,
                                       std::uint32_t cols, std::uint64_t seed);

/// Subset membership oracle: write the 0/1 membership of every input position
/// for output bit i into mask.
using SubsetFamily = std::function<void(std::size_t i, std::span<std::uint8_t> mask)>;

/// Random-subset parity compression to m bits with the seeded family.
std::vector<std::uint8_t> privacy_amplify_subsets(std::span<const std::uint8_t> key,
                                                  std::size_t target_length, std::uint64_t seed,
                                                  Exec exec = Exec::parallel);

/// Same with an explicit family; used for degenerate families in tests.
std::vector<std::uint8_t> privacy_amplify_subsets(std::span<const std::uint8_t> key,
                                                  std::size_t target_length,
                                                  const SubsetFamily& family);

/// max(0, n - leaked - eve_bound - s).
std::uint64_t compute_final_length(std::uint64_t n_reconciled, std::uint64_t leaked_bits,
                                   std::uint64_t eve_bound_bits, std::uint64_t security_parameter);

enum class EveBoundPolicy : std::uint8_t {
  none,
  /// Expected multi-photon detections, mpf(mu) * n, plus the intercept-resend
  /// equivalent (qber / 0.25) * n * 0.75.
  conservative,
};

std::string_view to_string(EveBoundPolicy p) noexcept;
EveBoundPolicy eve_bound_policy_from_string(std::string_view s);

std::uint64_t eve_bound_bits(EveBoundPolicy policy, std::uint64_t n, double qber, double mu);

}  // namespace fsqkd
