#include "fsqkd/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fsqkd/errors.hpp"

namespace fsqkd {

using nlohmann::json;

namespace {

// Reads keys out of one JSON object and complains about anything left over.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ParameterError(where_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ParameterError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ParameterError(where_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json parse_root(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("config root must be an object");
  auto v = j.find("schema_version");
  if (v == j.end() || !v->is_number_integer())
    throw ParameterError("config lacks an integer schema_version");
  if (v->get<int>() != kConfigSchemaVersion)
    throw ParameterError("unsupported config schema_version " + std::to_string(v->get<int>()));
  return j;
}

Scheme scheme_from(const std::string& s) {
  if (s == "b92") return Scheme::b92;
  if (s == "bb84") return Scheme::bb84;
  throw ParameterError("unknown scheme '" + s + "'");
}
const char* scheme_name(Scheme s) { return s == Scheme::b92 ? "b92" : "bb84"; }

Routing routing_from(const std::string& s) {
  if (s == "beamsplitter") return Routing::beamsplitter;
  if (s == "switched") return Routing::switched;
  throw ParameterError("unknown routing '" + s + "'");
}
const char* routing_name(Routing r) { return r == Routing::beamsplitter ? "beamsplitter" : "switched"; }

ResendModel resend_from(const std::string& s) {
  if (s == "best_guess") return ResendModel::best_guess;
  if (s == "eigenstate") return ResendModel::eigenstate;
  throw ParameterError("unknown resend model '" + s + "'");
}
const char* resend_name(ResendModel r) { return r == ResendModel::best_guess ? "best_guess" : "eigenstate"; }

PrivacyMode privacy_from(const std::string& s) {
  if (s == "subsets") return PrivacyMode::subsets;
  if (s == "drop") return PrivacyMode::drop;
  throw ParameterError("unknown privacy mode '" + s + "'");
}
const char* privacy_name(PrivacyMode m) { return m == PrivacyMode::subsets ? "subsets" : "drop"; }

Exec exec_from(const std::string& s) {
  if (s == "serial") return Exec::serial;
  if (s == "parallel") return Exec::parallel;
  throw ParameterError("unknown exec mode '" + s + "'");
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  const json root = parse_root(text);
  ScenarioConfig c;
  ObjectReader r(root, "config");
  int version = 0;
  r.get("schema_version", version);
  r.get("seed", c.seed);
  r.get("pulse_count", c.pulse_count);
  std::string s = scheme_name(c.scheme);
  r.get("scheme", s);
  c.scheme = scheme_from(s);
  r.get("threads", c.threads);
  s = "parallel";
  r.get("exec", s);
  c.exec = exec_from(s);
  r.get("entropy_file", c.alice_entropy_file);
  if (const json* j = r.child("tamper_message"); j && !j->is_null()) c.tamper_message = j->get<std::uint64_t>();

  if (const json* j = r.child("source")) {
    ObjectReader o(*j, "source");
    o.get("mean_photon_number", c.source.mean_photon_number);
    o.get("pulse_rate", c.source.pulse_rate);
    o.get("force_single_photon", c.force_single_photon);
    o.finish();
  }
  if (const json* j = r.child("channel")) {
    ObjectReader o(*j, "channel");
    o.get("transmittance", c.channel.transmittance);
    o.get("detector_efficiency", c.channel.detector_efficiency);
    o.get("background_rate", c.channel.background_rate);
    o.get("dark_rate", c.channel.dark_rate);
    o.get("gate_window", c.channel.gate_window);
    o.get("trigger_rate", c.channel.trigger_rate);
    o.get("optical_flip_probability", c.channel.optical_flip_probability);
    s = routing_name(c.routing);
    o.get("routing", s);
    c.routing = routing_from(s);
    o.finish();
  }
  if (const json* j = r.child("attack")) {
    ObjectReader o(*j, "attack");
    s = std::string(to_string(c.attack.kind));
    o.get("kind", s);
    c.attack.kind = attack_kind_from_string(s);
    o.get("fraction", c.attack.fraction);
    o.get("tap_ratio", c.attack.tap_ratio);
    s = resend_name(c.attack.resend);
    o.get("resend", s);
    c.attack.resend = resend_from(s);
    o.get("forward_photons", c.attack.forward_photons);
    o.finish();
  }
  if (const json* j = r.child("qber")) {
    ObjectReader o(*j, "qber");
    o.get("sample_fraction", c.qber_sample_fraction);
    o.get("ceiling", c.qber_ceiling);
    o.finish();
  }
  if (const json* j = r.child("reconciliation")) {
    ObjectReader o(*j, "reconciliation");
    o.get("rows", c.rows);
    o.get("cols", c.cols);
    o.get("max_passes", c.max_passes);
    o.finish();
  }
  if (const json* j = r.child("privacy")) {
    ObjectReader o(*j, "privacy");
    s = privacy_name(c.privacy_mode);
    o.get("mode", s);
    c.privacy_mode = privacy_from(s);
    o.get("security_parameter", c.security_parameter);
    s = std::string(to_string(c.eve_bound));
    o.get("eve_bound", s);
    c.eve_bound = eve_bound_policy_from_string(s);
    o.finish();
  }
  if (const json* j = r.child("auth")) {
    ObjectReader o(*j, "auth");
    o.get("pool_bits", c.auth_pool_bits);
    o.get("replenish_bits", c.replenish_bits);
    o.finish();
  }
  if (const json* j = r.child("output")) {
    ObjectReader o(*j, "output");
    o.get("report", c.output.report);
    o.get("csv", c.output.csv);
    o.get("transcript", c.output.transcript);
    o.finish();
  }
  r.finish();
  c.validate();
  return c;
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["seed"] = c.seed;
  j["pulse_count"] = c.pulse_count;
  j["scheme"] = scheme_name(c.scheme);
  j["threads"] = c.threads;
  j["exec"] = c.exec == Exec::serial ? "serial" : "parallel";
  if (!c.alice_entropy_file.empty()) j["entropy_file"] = c.alice_entropy_file;
  if (c.tamper_message) j["tamper_message"] = *c.tamper_message;
  j["source"] = {{"mean_photon_number", c.source.mean_photon_number},
                 {"pulse_rate", c.source.pulse_rate},
                 {"force_single_photon", c.force_single_photon}};
  j["channel"] = {{"transmittance", c.channel.transmittance},
                  {"detector_efficiency", c.channel.detector_efficiency},
                  {"background_rate", c.channel.background_rate},
                  {"dark_rate", c.channel.dark_rate},
                  {"gate_window", c.channel.gate_window},
                  {"trigger_rate", c.channel.trigger_rate},
                  {"optical_flip_probability", c.channel.optical_flip_probability},
                  {"routing", routing_name(c.routing)}};
  j["attack"] = {{"kind", std::string(to_string(c.attack.kind))},
                 {"fraction", c.attack.fraction},
                 {"tap_ratio", c.attack.tap_ratio},
                 {"resend", resend_name(c.attack.resend)},
                 {"forward_photons", c.attack.forward_photons}};
  j["qber"] = {{"sample_fraction", c.qber_sample_fraction}, {"ceiling", c.qber_ceiling}};
  j["reconciliation"] = {{"rows", c.rows}, {"cols", c.cols}, {"max_passes", c.max_passes}};
  j["privacy"] = {{"mode", privacy_name(c.privacy_mode)},
                  {"security_parameter", c.security_parameter},
                  {"eve_bound", std::string(to_string(c.eve_bound))}};
  j["auth"] = {{"pool_bits", c.auth_pool_bits}, {"replenish_bits", c.replenish_bits}};
  j["output"] = {{"report", c.output.report}, {"csv", c.output.csv},
                 {"transcript", c.output.transcript}};
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ScenarioConfig load_scenario(const std::string& path) { return parse_scenario(read_text_file(path)); }

link::LinkParams parse_link_params(std::string_view text) {
  const json root = parse_root(text);
  link::LinkParams p;
  if (auto it = root.find("preset"); it != root.end()) p = link::preset(it->get<std::string>());
  for (auto it = root.begin(); it != root.end(); ++it) {
    const auto& key = it.key();
    if (key == "schema_version" || key == "preset") continue;
    if (key == "tilt_control") {
      if (!it->is_boolean()) throw ParameterError("tilt_control must be a boolean");
      p.tilt_control = it->get<bool>();
      continue;
    }
    if (!it->is_number()) throw ParameterError("link parameter '" + key + "' must be a number");
    link::set_parameter(p, key, it->get<double>());  // throws on unknown names
  }
  p.validate();
  return p;
}

std::string link_params_to_json(const link::LinkParams& p) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  for (const auto& name : link::parameter_names()) {
    if (name == "tilt_control")
      j[name] = p.tilt_control;
    else
      j[name] = link::get_parameter(p, name);
  }
  return j.dump(2) + "\n";
}

link::LinkParams load_link_params(const std::string& path) {
  return parse_link_params(read_text_file(path));
}

}  // namespace fsqkd
