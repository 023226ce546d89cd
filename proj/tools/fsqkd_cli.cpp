// fsqkd command-line front end.
//
//   fsqkd simulate --config scenario.json
//   fsqkd linkbudget --preset night [--sweep range --from 1e5 --to 1e6 --steps 10] [--csv]
//   fsqkd attack --config scenario.json --kind intercept_resend_alice_basis --fractions 0,0.5,1
//   fsqkd reconcile-demo --alice a.txt --bob b.txt
//
// Exit codes: 0 success, 2 session aborted, 1 usage or config error.

#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fsqkd/config_io.hpp"
#include "fsqkd/errors.hpp"
#include "fsqkd/harness.hpp"
#include "fsqkd/linkbudget.hpp"
#include "fsqkd/reconciliation.hpp"

namespace {

using namespace fsqkd;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kAborted = 2;

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<std::uint8_t> read_bit_file(const std::string& path) {
  const auto text = read_text_file(path);
  std::vector<std::uint8_t> bits;
  for (char ch : text) {
    if (ch == '0' || ch == '1')
      bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    else if (!std::isspace(static_cast<unsigned char>(ch)))
      throw ParameterError(path + ": bit files may contain only 0, 1 and whitespace");
  }
  return bits;
}

std::string bits_to_text(std::span<const std::uint8_t> bits) {
  std::string s;
  s.reserve(bits.size() + bits.size() / 64 + 1);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    s.push_back(static_cast<char>('0' + bits[i]));
    if (i % 64 == 63) s.push_back('\n');
  }
  if (s.empty() || s.back() != '\n') s.push_back('\n');
  return s;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ParameterError("bad number in list: '" + item + "'");
    }
  }
  if (v.empty()) throw ParameterError("empty list");
  return v;
}

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string report, csv, transcript;
  bool csv_stdout = false;
};

int cmd_simulate(const SimulateArgs& a) {
  auto cfg = load_scenario(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.threads) cfg.threads = *a.threads;
  if (!a.report.empty()) cfg.output.report = a.report;
  if (!a.csv.empty()) cfg.output.csv = a.csv;
  if (!a.transcript.empty()) cfg.output.transcript = a.transcript;

  const auto t = run_session(cfg);
  std::cout << render_report(t, a.csv_stdout ? ReportFormat::csv : ReportFormat::text);
  if (!cfg.output.report.empty()) emit_report(t, ReportFormat::text, cfg.output.report);
  if (!cfg.output.csv.empty()) emit_report(t, ReportFormat::csv, cfg.output.csv);
  if (!cfg.output.transcript.empty()) write_bytes(cfg.output.transcript, dump_transcript(t));
  return t.aborted ? kAborted : kOk;
}

struct LinkArgs {
  std::string params_file;
  std::string preset;
  std::string sweep;
  double from = 0, to = 0;
  std::size_t steps = 11;
  bool csv = false;
};

int cmd_linkbudget(const LinkArgs& a) {
  link::LinkParams p;
  if (!a.params_file.empty())
    p = load_link_params(a.params_file);
  else if (!a.preset.empty())
    p = link::preset(a.preset);
  p.validate();

  if (!a.sweep.empty()) {
    const auto rows = link::sweep(p, a.sweep, a.from, a.to, a.steps);
    std::cout << link::csv_header(true);
    for (const auto& r : rows) std::cout << r.value << "," << link::csv_row(r.report);
    return kOk;
  }
  const auto report = link::evaluate(p);
  if (a.csv)
    std::cout << link::csv_header(false) << link::csv_row(report);
  else
    std::cout << link::format_text(p, report);
  return kOk;
}

struct AttackArgs {
  std::string config;
  std::string kind = "intercept_resend_alice_basis";
  std::string fractions = "0,0.25,0.5,0.75,1";
};

int cmd_attack(const AttackArgs& a) {
  const auto base = load_scenario(a.config);
  const auto kind = attack_kind_from_string(a.kind);
  std::cout << "fraction,sifted,qber_estimate,sifted_qber,eve_known_fraction,dual_fires,final_bits,"
               "status\n";
  for (double f : parse_list(a.fractions)) {
    auto cfg = base;
    cfg.attack.kind = kind;
    cfg.attack.fraction = f;
    const auto t = run_session(cfg);
    const double n = static_cast<double>(t.lengths.sifted);
    const double qs = n > 0 ? static_cast<double>(t.sifted_errors) / n : 0.0;
    const double known = n > 0 ? static_cast<double>(t.eve.sifted_correct) / n : 0.0;
    std::cout << f << "," << t.lengths.sifted << "," << t.qber_estimate << "," << qs << ","
              << known << "," << t.dual_fire_count << "," << t.lengths.final << ","
              << (t.aborted ? "aborted" : "completed") << "\n";
  }
  return kOk;
}

struct ReconcileArgs {
  std::string alice, bob, out;
  std::uint32_t rows = 16, cols = 16, max_passes = 128;
  std::uint64_t seed = 1;
};

int cmd_reconcile(const ReconcileArgs& a) {
  const auto ab = read_bit_file(a.alice);
  const auto bb = read_bit_file(a.bob);
  if (ab.size() != bb.size()) throw ParameterError("bit files differ in length");
  const auto ka = KeyBuffer::from_bits(ab, Stage::sifted);
  const auto kb = KeyBuffer::from_bits(bb, Stage::sifted);
  std::size_t before = 0;
  for (std::size_t i = 0; i < ab.size(); ++i) before += ab[i] != bb[i];

  const auto rep = block_parity_reconcile(ka, kb, a.rows, a.cols, a.max_passes, a.seed);
  std::size_t after = 0;
  for (std::size_t i = 0; i < ab.size(); ++i) after += ab[i] != rep.corrected_bob_key.bits()[i];

  std::cout << "bits                " << ab.size() << "\n"
            << "errors before       " << before << "\n"
            << "errors after        " << after << "\n"
            << "passes              " << rep.passes << "\n"
            << "flips               " << rep.flips << "\n"
            << "parity bits leaked  " << rep.parity_bits_disclosed << "\n"
            << "converged           " << (rep.residual_flagged ? "no" : "yes") << "\n";
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    out << bits_to_text(rep.corrected_bob_key.bits());
    if (!out) throw std::runtime_error("failed writing " + a.out);
  }
  return rep.residual_flagged ? kAborted : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-space QKD simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run one QKD session from a scenario file");
  s->add_option("-c,--config", sim.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  s->add_option("--seed", sim.seed, "Override the config seed");
  s->add_option("--threads", sim.threads, "OpenMP threads (0 = runtime default)");
  s->add_option("--report", sim.report, "Write the text report here");
  s->add_option("--csv", sim.csv, "Write the CSV report here");
  s->add_option("--transcript", sim.transcript, "Write the raw message dump here");
  s->add_flag("--csv-stdout", sim.csv_stdout, "Print CSV instead of text");

  LinkArgs lk;
  auto* l = app.add_subcommand("linkbudget", "Ground-to-satellite link budget");
  auto* pf = l->add_option("-p,--params", lk.params_file, "Link parameter JSON file")
                 ->check(CLI::ExistingFile);
  l->add_option("--preset", lk.preset, "night, tilt or day")->excludes(pf);
  auto* sw = l->add_option("--sweep", lk.sweep, "Parameter to sweep");
  l->add_option("--from", lk.from)->needs(sw);
  l->add_option("--to", lk.to)->needs(sw);
  l->add_option("--steps", lk.steps)->needs(sw);
  l->add_flag("--csv", lk.csv, "CSV output");

  AttackArgs at;
  auto* k = app.add_subcommand("attack", "Sweep an attack over intercept fractions");
  k->add_option("-c,--config", at.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  k->add_option("--kind", at.kind, "Attack kind");
  k->add_option("--fractions", at.fractions, "Comma-separated fractions");

  ReconcileArgs rc;
  auto* r = app.add_subcommand("reconcile-demo", "Block-parity error correction on two bit files");
  r->add_option("--alice", rc.alice)->required()->check(CLI::ExistingFile);
  r->add_option("--bob", rc.bob)->required()->check(CLI::ExistingFile);
  r->add_option("--out", rc.out, "Write Bob's corrected bits here");
  r->add_option("--rows", rc.rows);
  r->add_option("--cols", rc.cols);
  r->add_option("--max-passes", rc.max_passes);
  r->add_option("--seed", rc.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*l) return cmd_linkbudget(lk);
    if (*k) return cmd_attack(at);
    if (*r) return cmd_reconcile(rc);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
