#include "fsqkd/harness.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "fsqkd/errors.hpp"

namespace fsqkd {

void ScenarioConfig::validate() const {
  source.validate();
  channel.validate();
  attack.validate();
  if (pulse_count == 0) throw ParameterError("pulse_count must be > 0");
  if (!(qber_sample_fraction > 0.0 && qber_sample_fraction <= 1.0))
    throw ParameterError("qber sample fraction must be in (0,1]");
  if (!(qber_ceiling >= 0.0 && qber_ceiling <= 1.0))
    throw ParameterError("qber ceiling must be in [0,1]");
  if (rows < 2 || cols < 2) throw ParameterError("block dimensions must be >= 2");
  if (max_passes == 0) throw ParameterError("max_passes must be >= 1");
  if (scheme == Scheme::bb84 && (attack.kind == AttackKind::intercept_resend_alice_basis ||
                                 attack.kind == AttackKind::intercept_resend_bobs_basis))
    throw ParameterError("intercept-resend attacks are modeled for B92 only");
}

namespace {

std::vector<std::uint8_t> random_bits(std::uint64_t seed, Stream stream, std::size_t n) {
  auto rng = Rng::substream(seed, stream);
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; i += 64) {
    const std::uint64_t w = rng();
    for (std::size_t j = i; j < std::min(n, i + 64); ++j)
      bits[j] = static_cast<std::uint8_t>((w >> (j - i)) & 1U);
  }
  return bits;
}

std::vector<std::uint8_t> entropy_file_bits(const std::string& path, std::size_t n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open entropy file: " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() * 8 < n) throw ParameterError("entropy file too short for pulse_count");
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i)
    bits[i] = static_cast<std::uint8_t>((static_cast<unsigned char>(bytes[i / 8]) >> (i % 8)) & 1U);
  return bits;
}

class Session {
 public:
  explicit Session(const ScenarioConfig& cfg) : cfg_(cfg) {}

  SessionTranscript run() {
    try {
      execute();
    } catch (const AuthError& e) {
      abort(std::string("authentication failure: ") + e.what());
    }
    t_.auth_bits_consumed = alice_pool_.consumed() - start_consumed_;
    return std::move(t_);
  }

 private:
  void abort(std::string reason) {
    t_.aborted = true;
    t_.abort_reason = std::move(reason);
    t_.final_key = KeyBuffer(Stage::final);
    t_.bob_final_key = KeyBuffer(Stage::final);
    t_.lengths.final = 0;
  }

  /// Tag, carry, verify. Returns false (and aborts the session) when the
  /// receiver rejects the message.
  bool send(Sender from, const Message& m) {
    auto frame = serialize(m);
    auto& sender_pool = from == Sender::alice ? alice_pool_ : bob_pool_;
    auto& receiver_pool = from == Sender::alice ? bob_pool_ : alice_pool_;
    const auto tag = generate_tag(frame, sender_pool);

    TranscriptEntry e;
    e.id = next_id_++;
    e.sender = from;
    e.frame = std::move(frame);
    e.tag = AuthTagMsg{e.id, tag.key_offset, tag.tag};
    if (cfg_.tamper_message && *cfg_.tamper_message == e.id && !e.frame.empty())
      e.frame[e.frame.size() / 2] ^= 0x01;

    const bool ok = verify_tag(e.frame, e.tag.tag, e.tag.key_offset, receiver_pool);
    t_.messages.push_back(std::move(e));
    if (!ok) abort("authentication failure on message " + std::to_string(t_.messages.back().id));
    return ok;
  }

  void execute() {
    cfg_.validate();
    set_thread_count(cfg_.threads);
    const auto n = static_cast<std::size_t>(cfg_.pulse_count);

    // 1. authentication pool
    AuthKeyPool pool = cfg_.initial_pool ? *cfg_.initial_pool
                                         : AuthKeyPool::random(cfg_.auth_pool_bits, cfg_.seed);
    t_.pool_snapshot = pool;
    alice_pool_ = pool;
    bob_pool_ = pool;
    start_consumed_ = pool.consumed();

    // 2. independent random sequences
    const auto alice_bits = cfg_.alice_entropy_file.empty()
                                ? random_bits(cfg_.seed, Stream::alice_bits, n)
                                : entropy_file_bits(cfg_.alice_entropy_file, n);
    const auto bob_choices = random_bits(cfg_.seed, Stream::bob_choice, n);
    std::vector<std::uint8_t> alice_bases;
    if (cfg_.scheme == Scheme::bb84) alice_bases = random_bits(cfg_.seed, Stream::bases, n);

    // 3. quantum transmission and sifting
    TransmissionSetup setup;
    setup.scheme = cfg_.scheme;
    setup.source = cfg_.source;
    setup.force_single_photon = cfg_.force_single_photon;
    setup.channel = cfg_.channel;
    setup.attack = cfg_.attack;
    setup.routing = cfg_.routing;
    setup.seed = cfg_.seed;
    const auto ticks = run_transmission(setup, alice_bits, alice_bases, bob_choices, cfg_.exec);
    t_.lengths.raw = n;

    std::vector<DetectionRecord> detections(n);
    for (std::size_t i = 0; i < n; ++i) detections[i] = ticks[i].detection;

    if (cfg_.attack.kind == AttackKind::qnd) assess_qnd(setup, alice_bits, alice_bases, bob_choices, ticks);

    IndexList index_list;
    for (const auto& d : detections)
      if (d.is_bit()) index_list.ticks.push_back(d.tick_index);
    t_.detections = index_list.ticks.size();

    SiftResult sifted;
    if (cfg_.scheme == Scheme::b92) {
      if (!send(Sender::bob, index_list)) return;
      sifted = sift(alice_bits, bob_choices, detections);
    } else {
      BasisList bases;
      bases.ticks = index_list.ticks;
      for (auto tk : bases.ticks) bases.bases.push_back(bob_choices[tk]);
      if (!send(Sender::bob, bases)) return;
      sifted = sift_bb84(alice_bits, alice_bases, bob_choices, detections);
      IndexList kept;
      kept.ticks.assign(sifted.alice_key.ticks().begin(), sifted.alice_key.ticks().end());
      if (!send(Sender::alice, kept)) return;
    }
    t_.dual_fire_count = sifted.dual_fire_count;
    t_.lengths.sifted = sifted.alice_key.size();
    summarize_sifted(sifted, ticks);

    if (sifted.alice_key.empty()) {
      abort("no sifted bits");
      return;
    }

    // 5 (assessment, before correction so a bad channel aborts early)
    auto alice_key = std::move(sifted.alice_key);
    auto bob_key = std::move(sifted.bob_key);
    auto qber_rng = Rng::substream(cfg_.seed, Stream::qber_sample);
    const auto est = estimate_qber(alice_key, bob_key, cfg_.qber_sample_fraction, qber_rng);
    t_.qber_estimate = est.qber;
    t_.qber_disclosed = est.disclosed;
    t_.leakage.qber_sample_bits = est.disclosed;
    if (!send(Sender::bob, QberSample{est.sample})) return;
    if (est.qber > cfg_.qber_ceiling) {
      std::ostringstream os;
      os << "QBER " << est.qber << " exceeds ceiling " << cfg_.qber_ceiling;
      abort(os.str());
      return;
    }
    if (alice_key.empty()) {
      abort("no key bits left after QBER sampling");
      return;
    }

    // 4. error correction
    const std::uint64_t rec_seed = mix64(cfg_.seed ^ 0x7265636f6e63696cULL);
    auto rep = block_parity_reconcile(alice_key, bob_key, cfg_.rows, cfg_.cols, cfg_.max_passes,
                                      rec_seed, cfg_.exec);
    for (auto& p : rep.messages)
      if (!send(Sender::alice, p)) return;
    t_.leakage.parity_bits = rep.parity_bits_disclosed;
    t_.reconciliation_passes = rep.passes;
    t_.reconciliation_flips = rep.flips;
    if (rep.residual_flagged) {
      abort("error correction did not converge within max_passes");
      return;
    }
    alice_key.advance(Stage::reconciled);
    alice_key.add_leak(rep.parity_bits_disclosed);
    bob_key = std::move(rep.corrected_bob_key);
    t_.lengths.reconciled = alice_key.size();

    // 5. Eve's knowledge bound
    const double mu = cfg_.force_single_photon ? 0.0 : cfg_.source.mean_photon_number;
    t_.eve_bound_bits = eve_bound_bits(cfg_.eve_bound, alice_key.size(), est.qber, mu);

    // 6. privacy amplification
    const std::uint64_t pa_seed = mix64(cfg_.seed ^ 0x7072697661637921ULL);
    std::vector<std::uint8_t> alice_amp, bob_amp;
    if (cfg_.privacy_mode == PrivacyMode::subsets) {
      const auto m = compute_final_length(alice_key.size(), rep.parity_bits_disclosed,
                                          t_.eve_bound_bits, cfg_.security_parameter);
      if (!send(Sender::alice, PaSeed{pa_seed, static_cast<std::uint32_t>(m)})) return;
      if (m == alice_key.size()) {
        alice_amp.assign(alice_key.bits().begin(), alice_key.bits().end());
        bob_amp.assign(bob_key.bits().begin(), bob_key.bits().end());
      } else if (m > 0) {
        alice_amp = privacy_amplify_subsets(alice_key.bits(), m, pa_seed, cfg_.exec);
        bob_amp = privacy_amplify_subsets(bob_key.bits(), m, pa_seed, cfg_.exec);
      }
    } else {
      auto a = privacy_amplify_drop_key(alice_key.bits(), cfg_.rows, cfg_.cols, pa_seed);
      auto b = privacy_amplify_drop_key(bob_key.bits(), cfg_.rows, cfg_.cols, pa_seed);
      if (!send(Sender::alice, PaSeed{pa_seed, static_cast<std::uint32_t>(a.bits.size())})) return;
      alice_amp = std::move(a.bits);
      bob_amp = std::move(b.bits);
    }
    t_.lengths.amplified = alice_amp.size();
    auto alice_final = KeyBuffer::from_bits(std::move(alice_amp), Stage::amplified);
    auto bob_final = KeyBuffer::from_bits(std::move(bob_amp), Stage::amplified);
    alice_final.add_leak(alice_key.leaked_bits());
    bob_final.add_leak(bob_key.leaked_bits());

    // 7. replenish the authentication pool
    const std::size_t k = cfg_.replenish_bits < 0
                              ? alice_pool_.consumed() - start_consumed_
                              : static_cast<std::size_t>(cfg_.replenish_bits);
    alice_final.advance(Stage::final);
    bob_final.advance(Stage::final);
    auto ra = replenish(alice_pool_, alice_final, k);
    auto rb = replenish(bob_pool_, bob_final, k);
    t_.pool_replenished = ra.replenished;
    t_.final_key = std::move(ra.delivered);
    t_.bob_final_key = std::move(rb.delivered);
    t_.pool_after = alice_pool_;
    t_.lengths.final = t_.final_key.size();
  }

  void summarize_sifted(const SiftResult& s, const std::vector<TickResult>& ticks) {
    t_.eve.active = cfg_.attack.kind != AttackKind::none;
    for (const auto& tk : ticks)
      if (tk.eve.acted) ++t_.eve.acted_ticks;
    const auto tick_list = s.alice_key.ticks();
    for (std::size_t i = 0; i < tick_list.size(); ++i) {
      const auto& tk = ticks[tick_list[i]];
      const int a = s.alice_key.bit(i);
      const bool err = a != s.bob_key.bit(i);
      if (err) {
        ++t_.sifted_errors;
        if (tk.detection.cause == Cause::background) ++t_.sifted_errors_background;
      }
      if (tk.eve.acted) ++t_.eve.sifted_acted;
      if (tk.eve.guess >= 0) {
        ++t_.eve.sifted_guessed;
        if (tk.eve.guess == a) ++t_.eve.sifted_correct;
      }
    }
  }

  void assess_qnd(const TransmissionSetup& setup, const std::vector<std::uint8_t>& alice_bits,
                  const std::vector<std::uint8_t>& alice_bases,
                  const std::vector<std::uint8_t>& bob_choices,
                  const std::vector<TickResult>& ticks) {
    TransmissionSetup baseline = setup;
    baseline.attack = AttackModel{};
    const auto base = run_transmission(baseline, alice_bits, alice_bases, bob_choices, cfg_.exec);
    std::uint64_t clicks = 0, multi = 0;
    for (const auto& b : base)
      if (b.detection.is_bit()) ++clicks;
    for (const auto& tk : ticks)
      if (tk.emitted.photon_count >= 2) ++multi;
    const double nd = static_cast<double>(ticks.size());
    t_.eve.baseline_detection_rate = static_cast<double>(clicks) / nd;
    t_.eve.qnd_feasible = static_cast<double>(multi) / nd >= t_.eve.baseline_detection_rate;
  }

  const ScenarioConfig& cfg_;
  SessionTranscript t_;
  AuthKeyPool alice_pool_;
  AuthKeyPool bob_pool_;
  std::size_t start_consumed_ = 0;
  std::uint64_t next_id_ = 0;
};

}  // namespace

SessionTranscript run_session(const ScenarioConfig& config) { return Session(config).run(); }

// ---------------------------------------------------------------------------

std::string render_report(const SessionTranscript& t, ReportFormat format) {
  const auto& L = t.lengths;
  const double sift_yield = L.raw ? static_cast<double>(L.sifted) / static_cast<double>(L.raw) : 0.0;
  std::ostringstream os;
  os.precision(6);
  if (format == ReportFormat::csv) {
    os << "# fsqkd session report v" << t.schema_version << "\n"
       << "metric,value\n"
       << "status," << (t.aborted ? "aborted" : "completed") << "\n"
       << "abort_reason," << t.abort_reason << "\n"
       << "raw_bits," << L.raw << "\n"
       << "sifted_bits," << L.sifted << "\n"
       << "reconciled_bits," << L.reconciled << "\n"
       << "amplified_bits," << L.amplified << "\n"
       << "final_bits," << L.final << "\n"
       << "sift_yield," << sift_yield << "\n"
       << "detections," << t.detections << "\n"
       << "dual_fires," << t.dual_fire_count << "\n"
       << "qber_estimate," << t.qber_estimate << "\n"
       << "qber_disclosed," << t.qber_disclosed << "\n"
       << "leaked_qber_sample," << t.leakage.qber_sample_bits << "\n"
       << "leaked_parity," << t.leakage.parity_bits << "\n"
       << "reconciliation_passes," << t.reconciliation_passes << "\n"
       << "eve_bound_bits," << t.eve_bound_bits << "\n"
       << "eve_active," << (t.eve.active ? 1 : 0) << "\n"
       << "eve_sifted_guessed," << t.eve.sifted_guessed << "\n"
       << "eve_sifted_correct," << t.eve.sifted_correct << "\n"
       << "auth_bits_consumed," << t.auth_bits_consumed << "\n"
       << "pool_replenished," << (t.pool_replenished ? 1 : 0) << "\n"
       << "messages," << t.messages.size() << "\n";
    return os.str();
  }
  os << "QKD session: " << (t.aborted ? "ABORTED (" + t.abort_reason + ")" : "completed") << "\n"
     << "  stage lengths   raw " << L.raw << "  sifted " << L.sifted << "  reconciled "
     << L.reconciled << "  amplified " << L.amplified << "  final " << L.final << "\n"
     << "  sift yield      " << sift_yield << "\n"
     << "  dual fires      " << t.dual_fire_count << "\n"
     << "  QBER estimate   " << t.qber_estimate << " (" << t.qber_disclosed << " bits disclosed)\n"
     << "  leakage         parity " << t.leakage.parity_bits << ", sample "
     << t.leakage.qber_sample_bits << "\n"
     << "  EC passes       " << t.reconciliation_passes << "\n"
     << "  Eve bound       " << t.eve_bound_bits << " bits\n";
  if (t.eve.active) {
    os << "  Eve             acted on " << t.eve.acted_ticks << " ticks; knows "
       << t.eve.sifted_correct << " of " << L.sifted << " sifted bits\n";
    if (t.eve.qnd_feasible)
      os << "  QND feasible    " << (*t.eve.qnd_feasible ? "yes" : "no") << "\n";
  }
  os << "  auth bits used  " << t.auth_bits_consumed
     << (t.pool_replenished ? " (replenished)" : " (pool not replenished)") << "\n"
     << "  messages        " << t.messages.size() << "\n";
  return os.str();
}

void emit_report(const SessionTranscript& t, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open report file: " + path);
  out << render_report(t, format);
  if (!out) throw std::runtime_error("failed writing report file: " + path);
}

std::vector<std::uint8_t> dump_transcript(const SessionTranscript& t) {
  std::vector<std::uint8_t> out;
  for (const auto& e : t.messages) {
    out.insert(out.end(), e.frame.begin(), e.frame.end());
    const auto tag = serialize(e.tag);
    out.insert(out.end(), tag.begin(), tag.end());
  }
  return out;
}

VerifyResult verify_transcript(const SessionTranscript& t) {
  VerifyResult r;
  auto fail = [&](std::string msg) {
    r.ok = false;
    r.diagnostics.push_back(std::move(msg));
  };
  AuthKeyPool pool = t.pool_snapshot;
  std::uint64_t parity_bits = 0, sample_bits = 0;
  for (const auto& e : t.messages) {
    const auto id = std::to_string(e.id);
    try {
      if (e.tag.message_id != e.id) fail("message " + id + ": tag bound to another message");
      if (!verify_tag(e.frame, e.tag.tag, e.tag.key_offset, pool)) {
        fail("message " + id + ": tag mismatch");
        continue;
      }
    } catch (const AuthError& ex) {
      fail("message " + id + ": " + ex.what());
      return r;  // later offsets cannot be trusted
    }
    try {
      const auto m = deserialize(e.frame);
      if (const auto* p = std::get_if<Parity>(&m)) parity_bits += p->bit_count();
      if (const auto* q = std::get_if<QberSample>(&m)) sample_bits += q->entries.size();
    } catch (const ProtocolError& ex) {
      fail("message " + id + ": malformed (" + ex.what() + ")");
    }
  }
  if (parity_bits != t.leakage.parity_bits)
    fail("ledger: parity bits " + std::to_string(t.leakage.parity_bits) + " recorded, " +
         std::to_string(parity_bits) + " in transcript");
  if (sample_bits != t.leakage.qber_sample_bits)
    fail("ledger: sample bits " + std::to_string(t.leakage.qber_sample_bits) + " recorded, " +
         std::to_string(sample_bits) + " in transcript");
  return r;
}

}  // namespace fsqkd
