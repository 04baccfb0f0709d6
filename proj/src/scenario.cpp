#include "attestgame/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "attestgame/errors.hpp"
#include "attestgame/random.hpp"

namespace attestgame {

using nlohmann::json;

namespace {

enum Stream : std::uint64_t {
  kGains = 1,
  kAttackCosts = 2,
  kExploitCosts = 3,
  kMethod = 4,
  kLosses = 5,
};

void check_range(const Range& r, const char* name) {
  if (!std::isfinite(r.low) || !std::isfinite(r.high))
    throw ConfigError(std::string(name) + " must be finite");
  if (r.low > r.high)
    throw ConfigError(std::string(name) + " has low > high");
}

// --- checked JSON access ---------------------------------------------------

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "." + key + ": missing field");
  return *it;
}

double number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number()) throw ParseError(path + "." + key + ": expected a number");
  return v.get<double>();
}

std::string text(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string()) throw ParseError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

bool flag(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_boolean()) throw ParseError(path + "." + key + ": expected true or false");
  return v.get<bool>();
}

const json& array(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_array()) throw ParseError(path + "." + key + ": expected an array");
  return v;
}

std::uint64_t unsigned_integer(const json& obj, const std::string& key,
                               const std::string& path) {
  const json& v = field(obj, key, path);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ParseError(path + "." + key + ": expected a non-negative integer");
}

Range range(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError(path + "." + key + ": expected [low, high]");
  return {v[0].get<double>(), v[1].get<double>()};
}

json range_json(const Range& r) { return json::array({r.low, r.high}); }

}  // namespace

void validate_config(const ScenarioConfig& config) {
  if (config.device_count == 0) throw ConfigError("device_count must be at least 1");
  if (config.class_count == 0) throw ConfigError("class_count must be at least 1");
  if (config.class_count > config.device_count)
    throw ConfigError("class_count exceeds device_count; every class needs a device");
  check_range(config.gain_range, "gain_range");
  check_range(config.detection_rate_range, "detection_rate_range");
  check_range(config.attest_cost_range, "attest_cost_range");
  check_range(config.exploit_cost_range, "exploit_cost_range");
  check_range(config.device_attack_cost_range, "device_attack_cost_range");
  if (config.gain_range.low <= 0.0)
    throw ConfigError("gain_range must be strictly positive so that losses stay below gains");
  if (config.detection_rate_range.low < 0.0 || config.detection_rate_range.high > 1.0)
    throw ConfigError("detection_rate_range must lie within [0, 1]");
  if (config.attest_cost_range.low < 0.0)
    throw ConfigError("attest_cost_range must be non-negative");
  if (config.exploit_cost_range.low < 0.0)
    throw ConfigError("exploit_cost_range must be non-negative");
  if (config.device_attack_cost_range.low < 0.0)
    throw ConfigError("device_attack_cost_range must be non-negative");
}

Environment generate(const ScenarioConfig& config) {
  validate_config(config);

  Rng gains(config.seed, kGains);
  Rng attack_costs(config.seed, kAttackCosts);
  Rng exploit_costs(config.seed, kExploitCosts);
  Rng method_rng(config.seed, kMethod);
  Rng losses(config.seed, kLosses);

  const std::size_t n = config.device_count;
  const std::size_t k = config.class_count;

  std::vector<DeviceClass> classes(k);
  for (std::size_t c = 0; c < k; ++c) {
    classes[c].id = "c" + std::to_string(c);
    classes[c].exploit_cost =
        exploit_costs.uniform(config.exploit_cost_range.low, config.exploit_cost_range.high);
  }

  std::vector<Device> devices(n);
  std::size_t next = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t size = n / k + (c < n % k ? 1 : 0);
    for (std::size_t j = 0; j < size; ++j, ++next) {
      Device& d = devices[next];
      d.id = "d" + std::to_string(next);
      d.class_id = classes[c].id;
      classes[c].member_device_ids.push_back(d.id);
    }
  }

  for (auto& d : devices) {
    d.defender_gain = gains.uniform(config.gain_range.low, config.gain_range.high);
    d.attacker_gain = gains.uniform(config.gain_range.low, config.gain_range.high);
    d.attack_cost = attack_costs.uniform(config.device_attack_cost_range.low,
                                         config.device_attack_cost_range.high);
    if (config.zero_sum) {
      d.attacker_loss = -d.defender_gain;
      d.defender_loss = -d.attacker_gain;
    } else {
      d.defender_loss = -losses.uniform(config.gain_range.low, config.gain_range.high);
      d.attacker_loss = -losses.uniform(config.gain_range.low, config.gain_range.high);
    }
  }

  AttestationMethod method;
  method.id = "m0";
  method.detection_rate = method_rng.uniform(config.detection_rate_range.low,
                                             config.detection_rate_range.high);
  method.run_cost =
      method_rng.uniform(config.attest_cost_range.low, config.attest_cost_range.high);

  return Environment(std::move(devices), std::move(classes), {method},
                     config.zero_sum);
}

json config_to_json(const ScenarioConfig& config) {
  return json{
      {"device_count", config.device_count},
      {"class_count", config.class_count},
      {"gain_range", range_json(config.gain_range)},
      {"detection_rate_range", range_json(config.detection_rate_range)},
      {"attest_cost_range", range_json(config.attest_cost_range)},
      {"exploit_cost_range", range_json(config.exploit_cost_range)},
      {"device_attack_cost_range", range_json(config.device_attack_cost_range)},
      {"zero_sum", config.zero_sum},
      {"seed", config.seed},
  };
}

ScenarioConfig config_from_json(const json& doc) {
  // Missing keys keep their defaults so that partial config files work.
  const std::string path = "config";
  if (!doc.is_object()) throw ParseError(path + ": expected an object");
  ScenarioConfig c;
  if (doc.contains("device_count")) c.device_count = unsigned_integer(doc, "device_count", path);
  if (doc.contains("class_count")) c.class_count = unsigned_integer(doc, "class_count", path);
  if (doc.contains("gain_range")) c.gain_range = range(doc, "gain_range", path);
  if (doc.contains("detection_rate_range"))
    c.detection_rate_range = range(doc, "detection_rate_range", path);
  if (doc.contains("attest_cost_range"))
    c.attest_cost_range = range(doc, "attest_cost_range", path);
  if (doc.contains("exploit_cost_range"))
    c.exploit_cost_range = range(doc, "exploit_cost_range", path);
  if (doc.contains("device_attack_cost_range"))
    c.device_attack_cost_range = range(doc, "device_attack_cost_range", path);
  if (doc.contains("zero_sum")) c.zero_sum = flag(doc, "zero_sum", path);
  if (doc.contains("seed")) c.seed = unsigned_integer(doc, "seed", path);
  return c;
}

json environment_to_json(const Environment& env,
                         const std::optional<ScenarioConfig>& config) {
  json devices = json::array();
  for (const auto& d : env.devices()) {
    devices.push_back({
        {"id", d.id},
        {"class_id", d.class_id},
        {"defender_gain", d.defender_gain},
        {"defender_loss", d.defender_loss},
        {"attacker_gain", d.attacker_gain},
        {"attacker_loss", d.attacker_loss},
        {"attack_cost", d.attack_cost},
    });
  }
  json classes = json::array();
  for (const auto& c : env.classes()) {
    classes.push_back({
        {"id", c.id},
        {"exploit_cost", c.exploit_cost},
        {"member_device_ids", c.member_device_ids},
    });
  }
  json methods = json::array();
  for (const auto& m : env.methods()) {
    methods.push_back({
        {"id", m.id},
        {"detection_rate", m.detection_rate},
        {"run_cost", m.run_cost},
    });
  }
  json doc = {
      {"devices", std::move(devices)},
      {"classes", std::move(classes)},
      {"methods", std::move(methods)},
      {"zero_sum", env.zero_sum()},
  };
  if (config) {
    doc["meta"] = {{"seed", config->seed}, {"config", config_to_json(*config)}};
  }
  return doc;
}

EnvironmentDocument environment_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("environment: expected an object");

  std::vector<Device> devices;
  const json& dev_array = array(doc, "devices", "environment");
  for (std::size_t i = 0; i < dev_array.size(); ++i) {
    const std::string path = "devices[" + std::to_string(i) + "]";
    const json& d = dev_array[i];
    Device device;
    device.id = text(d, "id", path);
    device.class_id = text(d, "class_id", path);
    device.defender_gain = number(d, "defender_gain", path);
    device.defender_loss = number(d, "defender_loss", path);
    device.attacker_gain = number(d, "attacker_gain", path);
    device.attacker_loss = number(d, "attacker_loss", path);
    device.attack_cost = number(d, "attack_cost", path);
    devices.push_back(std::move(device));
  }

  std::vector<DeviceClass> classes;
  const json& class_array = array(doc, "classes", "environment");
  for (std::size_t i = 0; i < class_array.size(); ++i) {
    const std::string path = "classes[" + std::to_string(i) + "]";
    const json& c = class_array[i];
    DeviceClass cls;
    cls.id = text(c, "id", path);
    cls.exploit_cost = number(c, "exploit_cost", path);
    const json& members = array(c, "member_device_ids", path);
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (!members[j].is_string())
        throw ParseError(path + ".member_device_ids[" + std::to_string(j) +
                         "]: expected a string");
      cls.member_device_ids.push_back(members[j].get<std::string>());
    }
    classes.push_back(std::move(cls));
  }

  std::vector<AttestationMethod> methods;
  const json& method_array = array(doc, "methods", "environment");
  for (std::size_t i = 0; i < method_array.size(); ++i) {
    const std::string path = "methods[" + std::to_string(i) + "]";
    const json& m = method_array[i];
    methods.push_back({text(m, "id", path), number(m, "detection_rate", path),
                       number(m, "run_cost", path)});
  }

  const bool zero_sum = flag(doc, "zero_sum", "environment");

  std::optional<ScenarioConfig> config;
  if (doc.contains("meta")) {
    const json& meta = doc["meta"];
    if (!meta.is_object()) throw ParseError("meta: expected an object");
    if (meta.contains("seed")) (void)unsigned_integer(meta, "seed", "meta");
    if (meta.contains("config")) config = config_from_json(meta["config"]);
  }

  EnvironmentDocument result{
      Environment(std::move(devices), std::move(classes), std::move(methods), zero_sum),
      config};
  result.environment.require_valid();
  return result;
}

void save_environment(const Environment& env,
                      const std::filesystem::path& destination,
                      const std::optional<ScenarioConfig>& config) {
  write_json_file(environment_to_json(env, config), destination);
}

EnvironmentDocument load_environment(const std::filesystem::path& source) {
  return environment_from_json(read_json_file(source));
}

json defender_strategy_to_json(const DefenderStrategy& strategy,
                               const Environment& env) {
  if (!strategy.conforms_to(env))
    throw DomainError("defender strategy does not match the environment");
  json doc = json::object();
  for (std::size_t d = 0; d < env.device_count(); ++d) {
    json row = json::object();
    for (std::size_t m = 0; m < env.method_count(); ++m) {
      row[env.methods()[m].id] = strategy(d, m);
    }
    doc[env.devices()[d].id] = std::move(row);
  }
  return doc;
}

DefenderStrategy defender_strategy_from_json(const json& doc,
                                             const Environment& env) {
  if (!doc.is_object()) throw ParseError("strategy: expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (!env.find_device(key)) throw ParseError("strategy." + key + ": unknown device");
  }
  DefenderStrategy p = DefenderStrategy::zeros(env);
  for (std::size_t d = 0; d < env.device_count(); ++d) {
    const std::string& id = env.devices()[d].id;
    const json& row = field(doc, id, "strategy");
    const std::string path = "strategy." + id;
    if (!row.is_object()) throw ParseError(path + ": expected an object");
    for (const auto& [key, value] : row.items()) {
      bool known = false;
      for (const auto& m : env.methods()) known = known || m.id == key;
      if (!known) throw ParseError(path + "." + key + ": unknown method");
    }
    for (std::size_t m = 0; m < env.method_count(); ++m) {
      const double v = number(row, env.methods()[m].id, path);
      if (!(v >= 0.0 && v <= 1.0))
        throw ParseError(path + "." + env.methods()[m].id +
                         ": probability must lie in [0, 1]");
      p.set(d, m, v);
    }
  }
  return p;
}

json attacker_strategy_to_json(const AttackerStrategy& attack,
                               const Environment& env) {
  if (!attack.conforms_to(env))
    throw DomainError("attacker strategy does not match the environment");
  json doc = json::object();
  for (std::size_t d = 0; d < env.device_count(); ++d) {
    doc[env.devices()[d].id] = attack.attacks(d) ? 1 : 0;
  }
  return doc;
}

AttackerStrategy attacker_strategy_from_json(const json& doc,
                                             const Environment& env) {
  if (!doc.is_object()) throw ParseError("attack: expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (!env.find_device(key)) throw ParseError("attack." + key + ": unknown device");
  }
  AttackerStrategy a(env.device_count());
  for (std::size_t d = 0; d < env.device_count(); ++d) {
    const std::string& id = env.devices()[d].id;
    const json& v = field(doc, id, "attack");
    if (!v.is_number_integer() || (v.get<long long>() != 0 && v.get<long long>() != 1))
      throw ParseError("attack." + id + ": expected 0 or 1");
    a.set(d, v.get<long long>() == 1);
  }
  return a;
}

json read_json_file(const std::filesystem::path& source) {
  std::ifstream in(source);
  if (!in) throw ParseError("cannot open " + source.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(source.string() + ": " + e.what());
  }
}

void write_json_file(const json& doc, const std::filesystem::path& destination) {
  std::ofstream out(destination);
  if (!out) throw std::runtime_error("cannot write " + destination.string());
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + destination.string());
}

}  // namespace attestgame
