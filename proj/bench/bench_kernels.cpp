// Serial reference vs OpenMP path for each kernel. Run with
// --benchmark_filter=... to pick one; arg is the problem size.

#include <benchmark/benchmark.h>

#include "fsqkd/kernels.hpp"
#include "fsqkd/reconciliation.hpp"

namespace {

using namespace fsqkd;

std::vector<std::uint8_t> bits(std::size_t n, std::uint64_t seed, Stream s) {
  auto rng = Rng::substream(seed, s);
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(rng.bit());
  return v;
}

TransmissionSetup daylight_setup() {
  TransmissionSetup t;
  t.source = {0.3, 1e6};
  t.channel.transmittance = 0.104;
  t.channel.detector_efficiency = 0.65;
  t.channel.background_rate = 8000;
  t.channel.dark_rate = 2000;
  t.channel.gate_window = 5e-9;
  t.channel.optical_flip_probability = 0.011;
  t.seed = 7;
  return t;
}

void BM_transmission(benchmark::State& state, Exec exec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = bits(n, 1, Stream::alice_bits);
  const auto b = bits(n, 1, Stream::bob_choice);
  const auto setup = daylight_setup();
  for (auto _ : state) benchmark::DoNotOptimize(run_transmission(setup, a, {}, b, exec));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_parity_pass(benchmark::State& state, Exec exec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = bits(n, 2, Stream::alice_bits);
  auto rng = Rng::substream(2, Stream::reconcile);
  const auto perm = random_permutation(n, rng);
  for (auto _ : state) {
    auto b = a;
    for (std::size_t i = 0; i < n; i += 61) b[i] ^= 1U;
    benchmark::DoNotOptimize(parity_pass(a, b, perm, 16, 16, 0, exec));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_subset_parities(benchmark::State& state, Exec exec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto key = bits(n, 3, Stream::alice_bits);
  std::vector<std::uint8_t> out(n / 2);
  for (auto _ : state) {
    subset_parities(key, 3, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * out.size()));
}

}  // namespace

BENCHMARK_CAPTURE(BM_transmission, serial, Exec::serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(BM_transmission, parallel, Exec::parallel)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(BM_parity_pass, serial, Exec::serial)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK_CAPTURE(BM_parity_pass, parallel, Exec::parallel)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK_CAPTURE(BM_subset_parities, serial, Exec::serial)->Arg(1 << 12)->Arg(1 << 14);
BENCHMARK_CAPTURE(BM_subset_parities, parallel, Exec::parallel)->Arg(1 << 12)->Arg(1 << 14);

BENCHMARK_MAIN();
