#include "fsqkd/kernels.hpp"

#include <bit>

#include "fsqkd/errors.hpp"

#ifdef FSQKD_HAVE_OPENMP
#include <omp.h>
#endif

namespace fsqkd {

bool parallel_available() noexcept {
#ifdef FSQKD_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

void set_thread_count(int n) noexcept {
#ifdef FSQKD_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// ---------------------------------------------------------------------------

TickResult simulate_tick(const TransmissionSetup& setup, std::uint64_t tick, int alice_bit,
                         int alice_basis, int bob_choice) {
  TickResult r;
  auto source_rng = Rng::substream(setup.seed, Stream::source, tick);
  r.emitted.tick_index = tick;
  r.emitted.photon_count =
      setup.force_single_photon ? 1U : sample_photon_count(setup.source, source_rng);
  r.emitted.polarization =
      setup.scheme == Scheme::b92
          ? encode_b92(alice_bit, Party::alice)
          : encode_bb84(alice_bit, alice_basis == 0 ? Basis::rectilinear : Basis::diagonal);

  Forwarded fwd{r.emitted, false};
  if (setup.attack.kind != AttackKind::none) {
    auto eve_rng = Rng::substream(setup.seed, Stream::eve, tick);
    auto step = apply_attack(setup.attack, r.emitted, eve_rng, setup.scheme);
    fwd = step.forwarded;
    r.eve = step.record;
  }

  ArrivalEvent arrival{tick, 0, r.emitted.polarization};
  if (fwd.pulse) {
    arrival.polarization = fwd.pulse->polarization;
    if (fwd.bypass_channel) {
      arrival.surviving_photons = fwd.pulse->photon_count;
    } else {
      auto channel_rng = Rng::substream(setup.seed, Stream::channel, tick);
      arrival = transmit(*fwd.pulse, setup.channel, channel_rng);
    }
  }
  r.arrived_photons = arrival.surviving_photons;

  auto det_rng = Rng::substream(setup.seed, Stream::detector, tick);
  r.detection = setup.scheme == Scheme::b92
                    ? measure_b92(arrival, bob_choice, setup.channel, det_rng, setup.routing)
                    : measure_bb84(arrival, bob_choice == 0 ? Basis::rectilinear : Basis::diagonal,
                                   setup.channel, det_rng);

  if (setup.channel.optical_flip_probability > 0.0) {
    auto optics_rng = Rng::substream(setup.seed, Stream::optics, tick);
    r.detection =
        apply_optical_error(r.detection, setup.channel.optical_flip_probability, optics_rng);
  }
  return r;
}

std::vector<TickResult> run_transmission(const TransmissionSetup& setup,
                                         std::span<const std::uint8_t> alice_bits,
                                         std::span<const std::uint8_t> alice_bases,
                                         std::span<const std::uint8_t> bob_choices, Exec exec) {
  const auto n = alice_bits.size();
  if (bob_choices.size() != n) throw ProtocolError("bob choices not aligned with alice bits");
  if (setup.scheme == Scheme::bb84 && alice_bases.size() != n)
    throw ProtocolError("alice bases not aligned with alice bits");
  setup.source.validate();
  setup.channel.validate();
  setup.attack.validate();
  for (std::size_t t = 0; t < n; ++t) {
    if (alice_bits[t] > 1 || bob_choices[t] > 1 ||
        (setup.scheme == Scheme::bb84 && alice_bases[t] > 1))
      throw ParameterError("bit and basis sequences must hold 0 or 1");
  }
  if (setup.scheme == Scheme::bb84 && (setup.attack.kind == AttackKind::intercept_resend_alice_basis ||
                                       setup.attack.kind == AttackKind::intercept_resend_bobs_basis))
    throw ParameterError("intercept-resend attacks are modeled for B92 only");

  std::vector<TickResult> out(n);
  const auto body = [&](std::size_t t) {
    const int basis = setup.scheme == Scheme::bb84 ? alice_bases[t] : 0;
    out[t] = simulate_tick(setup, t, alice_bits[t], basis, bob_choices[t]);
  };

  if (exec == Exec::serial) {
    for (std::size_t t = 0; t < n; ++t) body(t);
    return out;
  }
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < count; ++t) body(static_cast<std::size_t>(t));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct BlockOutcome {
  BlockParity parity;
  std::uint64_t flips = 0;
  std::uint64_t failing_lines = 0;
  bool failing = false;
};

BlockOutcome process_block(std::span<const std::uint8_t> alice, std::span<std::uint8_t> bob,
                           std::span<const std::size_t> permutation, std::uint32_t rows,
                           std::uint32_t cols, std::size_t block) {
  const std::size_t cells = static_cast<std::size_t>(rows) * cols;
  const std::size_t base = block * cells;
  std::vector<std::uint8_t> a_row(rows, 0), a_col(cols, 0), b_row(rows, 0), b_col(cols, 0);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      const std::size_t k = base + static_cast<std::size_t>(r) * cols + c;
      if (k >= permutation.size()) continue;  // zero padding
      const auto pos = permutation[k];
      a_row[r] ^= alice[pos];
      a_col[c] ^= alice[pos];
      b_row[r] ^= bob[pos];
      b_col[c] ^= bob[pos];
    }
  }

  BlockOutcome out;
  out.parity.block_id = static_cast<std::uint32_t>(block);
  out.parity.bits.reserve(rows + cols);
  out.parity.bits.insert(out.parity.bits.end(), a_row.begin(), a_row.end());
  out.parity.bits.insert(out.parity.bits.end(), a_col.begin(), a_col.end());

  std::uint32_t bad_row = 0, bad_col = 0, n_rows = 0, n_cols = 0;
  for (std::uint32_t r = 0; r < rows; ++r)
    if (a_row[r] != b_row[r]) {
      bad_row = r;
      ++n_rows;
    }
  for (std::uint32_t c = 0; c < cols; ++c)
    if (a_col[c] != b_col[c]) {
      bad_col = c;
      ++n_cols;
    }
  out.failing_lines = n_rows + n_cols;
  out.failing = out.failing_lines != 0;
  if (n_rows == 1 && n_cols == 1) {
    const std::size_t k = base + static_cast<std::size_t>(bad_row) * cols + bad_col;
    if (k < permutation.size()) {
      bob[permutation[k]] ^= 1U;
      out.flips = 1;
    }
  }
  return out;
}

}  // namespace

ParityPassResult parity_pass(std::span<const std::uint8_t> alice, std::span<std::uint8_t> bob,
                             std::span<const std::size_t> permutation, std::uint32_t rows,
                             std::uint32_t cols, std::uint32_t pass_number, Exec exec) {
  if (alice.size() != bob.size() || permutation.size() != alice.size())
    throw ProtocolError("parity pass: keys and permutation must have equal length");
  if (rows < 2 || cols < 2) throw ParameterError("block dimensions must be >= 2");
  const std::size_t cells = static_cast<std::size_t>(rows) * cols;
  const std::size_t blocks = (alice.size() + cells - 1) / cells;

  std::vector<BlockOutcome> outcomes(blocks);
  if (exec == Exec::serial) {
    for (std::size_t b = 0; b < blocks; ++b)
      outcomes[b] = process_block(alice, bob, permutation, rows, cols, b);
  } else {
    // Blocks touch disjoint key positions, so Bob's flips do not race.
    const auto count = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < count; ++b)
      outcomes[static_cast<std::size_t>(b)] =
          process_block(alice, bob, permutation, rows, cols, static_cast<std::size_t>(b));
  }

  ParityPassResult res;
  res.message.pass = pass_number;
  res.message.blocks.reserve(blocks);
  for (auto& o : outcomes) {
    res.flips += o.flips;
    res.failing_lines += o.failing_lines;
    if (o.failing) ++res.failing_blocks;
    res.message.blocks.push_back(std::move(o.parity));
  }
  return res;
}

// ---------------------------------------------------------------------------

std::vector<std::uint64_t> pack_words(std::span<const std::uint8_t> bits) {
  std::vector<std::uint64_t> words((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i] & 1U) words[i / 64] |= std::uint64_t{1} << (i % 64);
  return words;
}

namespace {

std::uint8_t subset_parity(std::span<const std::uint64_t> words, std::size_t n, std::uint64_t seed,
                           std::size_t i) {
  auto rng = Rng::substream(seed, Stream::privacy, i);
  std::uint64_t acc = 0;
  const std::size_t full = n / 64;
  for (std::size_t w = 0; w < full; ++w) acc ^= words[w] & rng();
  if (n % 64 != 0) {
    const std::uint64_t tail_mask = (std::uint64_t{1} << (n % 64)) - 1;
    acc ^= words[full] & rng() & tail_mask;
  }
  return static_cast<std::uint8_t>(std::popcount(acc) & 1);
}

}  // namespace

void subset_parities(std::span<const std::uint8_t> key, std::uint64_t seed,
                     std::span<std::uint8_t> out, Exec exec) {
  const auto words = pack_words(key);
  const std::size_t n = key.size();
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = subset_parity(words, n, seed, i);
    return;
  }
  const auto count = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = subset_parity(words, n, seed, static_cast<std::size_t>(i));
}

}  // namespace fsqkd
