#pragma once

// Random game instances and the JSON documents for environments and
// strategies.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "attestgame/game_model.hpp"

namespace attestgame {

struct Range {
  double low = 0.0;
  double high = 0.0;

  bool contains(double x) const { return x >= low && x <= high; }
  bool operator==(const Range&) const = default;
};

struct ScenarioConfig {
  std::size_t device_count = 50;
  std::size_t class_count = 5;
  Range gain_range{20.0, 40.0};
  Range detection_rate_range{0.5, 0.9};
  Range attest_cost_range{0.0, 10.0};
  Range exploit_cost_range{15.0, 40.0};
  Range device_attack_cost_range{1.0, 3.0};
  bool zero_sum = true;
  std::uint64_t seed = 0;

  bool operator==(const ScenarioConfig&) const = default;
};

// Throws ConfigError naming the first bad field.
void validate_config(const ScenarioConfig& config);

// Devices d0..d{n-1} are split into contiguous classes c0..c{k-1}; the first
// n mod k classes get one extra device. Each kind of draw comes from its own
// stream of the seed (see random.hpp):
//   stream 1: per device, defender gain then attacker gain
//   stream 2: per device, attack cost
//   stream 3: per class, exploit cost
//   stream 4: the method's detection rate then run cost
//   stream 5: per device, defender loss then attacker loss (general-sum only)
// In zero-sum mode losses mirror the other player's gain.
Environment generate(const ScenarioConfig& config);

nlohmann::json config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const nlohmann::json& doc);

struct EnvironmentDocument {
  Environment environment;
  std::optional<ScenarioConfig> config;  // from meta.config when present
};

nlohmann::json environment_to_json(
    const Environment& env, const std::optional<ScenarioConfig>& config = {});
// Throws ParseError for structural problems and ValidationError if the
// parsed environment violates an invariant.
EnvironmentDocument environment_from_json(const nlohmann::json& doc);

void save_environment(const Environment& env,
                      const std::filesystem::path& destination,
                      const std::optional<ScenarioConfig>& config = {});
EnvironmentDocument load_environment(const std::filesystem::path& source);

// {device id: {method id: probability}}
nlohmann::json defender_strategy_to_json(const DefenderStrategy& strategy,
                                         const Environment& env);
DefenderStrategy defender_strategy_from_json(const nlohmann::json& doc,
                                             const Environment& env);

// {device id: 0 | 1}
nlohmann::json attacker_strategy_to_json(const AttackerStrategy& attack,
                                         const Environment& env);
AttackerStrategy attacker_strategy_from_json(const nlohmann::json& doc,
                                             const Environment& env);

nlohmann::json read_json_file(const std::filesystem::path& source);
// Pretty-printed with a trailing newline.
void write_json_file(const nlohmann::json& doc,
                     const std::filesystem::path& destination);

}  // namespace attestgame
