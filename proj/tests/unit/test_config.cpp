#include <doctest.h>

#include <filesystem>
#include <string>

#include "fsqkd/config_io.hpp"
#include "fsqkd/errors.hpp"

using namespace fsqkd;

#ifndef FSQKD_CONFIG_DIR
#define FSQKD_CONFIG_DIR "configs"
#endif

TEST_CASE("scenario round trip") {
  ScenarioConfig c;
  c.seed = 99;
  c.pulse_count = 12345;
  c.scheme = Scheme::bb84;
  c.source = {0.2, 5e5};
  c.channel.background_rate = 100;
  c.channel.optical_flip_probability = 0.02;
  c.routing = Routing::switched;
  c.attack.kind = AttackKind::beamsplit;
  c.attack.tap_ratio = 0.3;
  c.rows = 8;
  c.cols = 12;
  c.privacy_mode = PrivacyMode::drop;
  c.eve_bound = EveBoundPolicy::none;
  c.replenish_bits = 512;
  c.tamper_message = 4;
  c.exec = Exec::serial;
  c.output.csv = "out.csv";

  const auto back = parse_scenario(scenario_to_json(c));
  CHECK(back.seed == 99);
  CHECK(back.pulse_count == 12345);
  CHECK(back.scheme == Scheme::bb84);
  CHECK(back.source.mean_photon_number == 0.2);
  CHECK(back.source.pulse_rate == 5e5);
  CHECK(back.channel.background_rate == 100);
  CHECK(back.channel.optical_flip_probability == 0.02);
  CHECK(back.routing == Routing::switched);
  CHECK(back.attack.kind == AttackKind::beamsplit);
  CHECK(back.attack.tap_ratio == 0.3);
  CHECK(back.rows == 8);
  CHECK(back.cols == 12);
  CHECK(back.privacy_mode == PrivacyMode::drop);
  CHECK(back.eve_bound == EveBoundPolicy::none);
  CHECK(back.replenish_bits == 512);
  CHECK(back.tamper_message == 4);
  CHECK(back.exec == Exec::serial);
  CHECK(back.output.csv == "out.csv");
  CHECK(scenario_to_json(back) == scenario_to_json(c));
}

TEST_CASE("minimal scenario uses defaults") {
  const auto c = parse_scenario(R"({"schema_version": 1})");
  const ScenarioConfig d;
  CHECK(c.seed == d.seed);
  CHECK(c.pulse_count == d.pulse_count);
  CHECK(c.rows == d.rows);
  CHECK(c.qber_ceiling == d.qber_ceiling);
}

TEST_CASE("malformed scenarios are rejected") {
  CHECK_THROWS_AS(parse_scenario("{"), ParameterError);
  CHECK_THROWS_AS(parse_scenario(R"({"seed": 1})"), ParameterError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version": 2})"), ParameterError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version": 1, "sed": 1})"), ParameterError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version": 1, "channel": {"noise": 1}})"),
                  ParameterError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version": 1, "scheme": "e91"})"), ParameterError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version": 1, "seed": "one"})"), ParameterError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version": 1, "pulse_count": 0})"), ParameterError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/cfg.json"), ParameterError);
}

TEST_CASE("link parameters and presets") {
  const auto night = parse_link_params(R"({"schema_version": 1})");
  CHECK(night.range == link::LinkParams{}.range);
  const auto tilt = parse_link_params(R"({"schema_version": 1, "preset": "tilt"})");
  CHECK(tilt.tilt_control);
  const auto day = parse_link_params(R"({"schema_version": 1, "preset": "day", "range": 2e5})");
  CHECK(day.range == 2e5);
  CHECK(day.radiance > night.radiance);
  CHECK_THROWS_AS(parse_link_params(R"({"schema_version": 1, "preset": "noon"})"), ParameterError);
  CHECK_THROWS_AS(parse_link_params(R"({"schema_version": 1, "altitude": 3})"), ParameterError);
  const auto back = parse_link_params(link_params_to_json(day));
  CHECK(link_params_to_json(back) == link_params_to_json(day));
}

TEST_CASE("shipped configs parse") {
  const std::filesystem::path dir = FSQKD_CONFIG_DIR;
  int scenarios = 0, links = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("link_", 0) == 0) {
      CHECK_NOTHROW(load_link_params(e.path().string()));
      ++links;
    } else {
      CHECK_NOTHROW(load_scenario(e.path().string()).validate());
      ++scenarios;
    }
  }
  CHECK(scenarios >= 5);
  CHECK(links == 3);
}
