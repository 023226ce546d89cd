#include "fsqkd/reconciliation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsqkd/errors.hpp"
#include "fsqkd/photonics.hpp"

namespace fsqkd {

std::size_t ParityBlock::valid_bits() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(source.begin(), source.end(), [](std::size_t s) { return s != kPadding; }));
}

std::vector<ParityBlock> fold_blocks(std::span<const std::uint8_t> key,
                                     std::span<const std::size_t> permutation,
                                     std::uint32_t rows, std::uint32_t cols) {
  if (rows < 1 || cols < 1) throw ParameterError("block dimensions must be positive");
  if (!permutation.empty() && permutation.size() != key.size())
    throw ParameterError("permutation length must match key length");
  const std::size_t cells = static_cast<std::size_t>(rows) * cols;
  const std::size_t n_blocks = (key.size() + cells - 1) / cells;
  std::vector<ParityBlock> blocks(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    auto& blk = blocks[b];
    blk.rows = rows;
    blk.cols = cols;
    blk.bits.assign(cells, 0);
    blk.source.assign(cells, kPadding);
    for (std::size_t j = 0; j < cells; ++j) {
      const std::size_t k = b * cells + j;
      if (k >= key.size()) break;
      const std::size_t pos = permutation.empty() ? k : permutation[k];
      blk.bits[j] = key[pos] & 1U;
      blk.source[j] = pos;
    }
  }
  return blocks;
}

std::vector<std::uint8_t> block_parities(const ParityBlock& block) {
  std::vector<std::uint8_t> p(block.rows + block.cols, 0);
  for (std::uint32_t r = 0; r < block.rows; ++r)
    for (std::uint32_t c = 0; c < block.cols; ++c) {
      const auto bit = block.bits[static_cast<std::size_t>(r) * block.cols + c];
      p[r] ^= bit;
      p[block.rows + c] ^= bit;
    }
  return p;
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

ReconciliationReport block_parity_reconcile(const KeyBuffer& alice_key, const KeyBuffer& bob_key,
                                            std::uint32_t rows, std::uint32_t cols,
                                            std::uint32_t max_passes, std::uint64_t seed,
                                            Exec exec) {
  if (alice_key.size() != bob_key.size() ||
      !std::equal(alice_key.ticks().begin(), alice_key.ticks().end(), bob_key.ticks().begin()))
    throw ProtocolError("reconcile: keys are not aligned");
  if (rows < 2 || cols < 2) throw ParameterError("block dimensions must be >= 2");
  if (max_passes == 0) throw ParameterError("max_passes must be >= 1");

  ReconciliationReport rep;
  rep.corrected_bob_key = bob_key;
  rep.corrected_bob_key.advance(Stage::reconciled);

  const auto n = alice_key.size();
  if (n == 0) return rep;

  const std::vector<std::uint8_t> alice(alice_key.bits().begin(), alice_key.bits().end());
  std::vector<std::uint8_t> bob(bob_key.bits().begin(), bob_key.bits().end());

  int clean_streak = 0;
  std::uint64_t last_failing_lines = 0;
  while (rep.passes < max_passes && clean_streak < 2) {
    auto rng = Rng::substream(seed, Stream::reconcile, rep.passes);
    const auto perm = random_permutation(n, rng);
    auto pass = parity_pass(alice, bob, perm, rows, cols, rep.passes, exec);
    ++rep.passes;
    rep.flips += pass.flips;
    rep.parity_bits_disclosed += pass.message.bit_count();
    last_failing_lines = pass.failing_lines;
    clean_streak = pass.failing_blocks == 0 ? clean_streak + 1 : 0;
    rep.messages.push_back(std::move(pass.message));
  }
  rep.residual_flagged = last_failing_lines != 0;
  // Each remaining error shows up in at most two parity lines of its block.
  rep.residual_error_estimate =
      static_cast<double>(last_failing_lines) / 2.0 / static_cast<double>(n);

  for (std::size_t i = 0; i < n; ++i)
    if (bob[i] != bob_key.bits()[i]) rep.corrected_bob_key.flip(i);
  rep.corrected_bob_key.add_leak(rep.parity_bits_disclosed);
  return rep;
}

DropResult privacy_amplify_drop(const ParityBlock& block, Rng& rng) {
  if (block.rows < 2 || block.cols < 2) throw ParameterError("drop needs rows and cols >= 2");
  DropResult out;
  out.dropped_row = static_cast<std::uint32_t>(rng.below(block.rows));
  out.dropped_col = static_cast<std::uint32_t>(rng.below(block.cols));
  for (std::uint32_t r = 0; r < block.rows; ++r) {
    if (r == out.dropped_row) continue;
    for (std::uint32_t c = 0; c < block.cols; ++c) {
      if (c == out.dropped_col) continue;
      const auto j = static_cast<std::size_t>(r) * block.cols + c;
      if (block.source[j] == kPadding) continue;
      out.bits.push_back(block.bits[j]);
    }
  }
  return out;
}

DropKeyResult privacy_amplify_drop_key(std::span<const std::uint8_t> key, std::uint32_t rows,
                                       std::uint32_t cols, std::uint64_t seed) {
  if (rows < 2 || cols < 2) throw ParameterError("drop needs rows and cols >= 2");
  DropKeyResult out;
  const auto blocks = fold_blocks(key, {}, rows, cols);
  auto rng = Rng::substream(seed, Stream::privacy, 0);
  for (const auto& b : blocks) {
    auto d = privacy_amplify_drop(b, rng);
    out.bits.insert(out.bits.end(), d.bits.begin(), d.bits.end());
    out.dropped.emplace_back(d.dropped_row, d.dropped_col);
  }
  return out;
}

std::vector<std::uint8_t> privacy_amplify_subsets(std::span<const std::uint8_t> key,
                                                  std::size_t target_length, std::uint64_t seed,
                                                  Exec exec) {
  if (target_length >= key.size())
    throw ParameterError("target length must be shorter than the input key");
  std::vector<std::uint8_t> out(target_length, 0);
  subset_parities(key, seed, out, exec);
  return out;
}

std::vector<std::uint8_t> privacy_amplify_subsets(std::span<const std::uint8_t> key,
                                                  std::size_t target_length,
                                                  const SubsetFamily& family) {
  if (target_length >= key.size())
    throw ParameterError("target length must be shorter than the input key");
  std::vector<std::uint8_t> out(target_length, 0);
  std::vector<std::uint8_t> mask(key.size());
  for (std::size_t i = 0; i < target_length; ++i) {
    std::fill(mask.begin(), mask.end(), 0);
    family(i, mask);
    std::uint8_t p = 0;
    for (std::size_t j = 0; j < key.size(); ++j) p ^= static_cast<std::uint8_t>(key[j] & mask[j] & 1U);
    out[i] = p;
  }
  return out;
}

std::uint64_t compute_final_length(std::uint64_t n_reconciled, std::uint64_t leaked_bits,
                                   std::uint64_t eve_bound_bits, std::uint64_t security_parameter) {
  std::uint64_t m = n_reconciled;
  for (auto d : {leaked_bits, eve_bound_bits, security_parameter}) {
    if (d >= m) return 0;
    m -= d;
  }
  return m;
}

std::string_view to_string(EveBoundPolicy p) noexcept {
  return p == EveBoundPolicy::none ? "none" : "conservative";
}

EveBoundPolicy eve_bound_policy_from_string(std::string_view s) {
  if (s == "none") return EveBoundPolicy::none;
  if (s == "conservative") return EveBoundPolicy::conservative;
  throw ParameterError("unknown eve bound policy: " + std::string(s));
}

std::uint64_t eve_bound_bits(EveBoundPolicy policy, std::uint64_t n, double qber, double mu) {
  if (policy == EveBoundPolicy::none || n == 0) return 0;
  const double nd = static_cast<double>(n);
  const double multi = mu > 0.0 ? multi_photon_fraction(mu) * nd : 0.0;
  const double intercept = std::clamp(qber / 0.25, 0.0, 1.0) * nd * 0.75;
  return static_cast<std::uint64_t>(std::ceil(multi + intercept));
}

}  // namespace fsqkd
