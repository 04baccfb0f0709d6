#include "attestgame/game_model.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "attestgame/errors.hpp"

namespace attestgame {

namespace {

void add(ValidationReport& report, Violation::Kind kind, std::string subject,
         std::string message) {
  report.push_back({kind, std::move(subject), std::move(message)});
}

std::string describe(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

void check_device(const Device& d, bool zero_sum, ValidationReport& report) {
  using K = Violation::Kind;
  const double fields[] = {d.defender_gain, d.defender_loss, d.attacker_gain,
                           d.attacker_loss, d.attack_cost};
  for (double v : fields) {
    if (!std::isfinite(v)) {
      add(report, K::kBounds, d.id, "device " + d.id + " has a non-finite value");
      return;
    }
  }
  if (d.defender_gain < 0.0)
    add(report, K::kBounds, d.id,
        "device " + d.id + ": defender_gain must be >= 0, got " + describe(d.defender_gain));
  if (d.attacker_gain < 0.0)
    add(report, K::kBounds, d.id,
        "device " + d.id + ": attacker_gain must be >= 0, got " + describe(d.attacker_gain));
  if (d.attack_cost < 0.0)
    add(report, K::kBounds, d.id,
        "device " + d.id + ": attack_cost must be >= 0, got " + describe(d.attack_cost));
  if (d.defender_loss > 0.0)
    add(report, K::kSign, d.id,
        "device " + d.id + ": defender_loss must be <= 0 (losses are negative), got " +
            describe(d.defender_loss));
  if (d.attacker_loss > 0.0)
    add(report, K::kSign, d.id,
        "device " + d.id + ": attacker_loss must be <= 0 (losses are negative), got " +
            describe(d.attacker_loss));
  if (!(d.attacker_loss < d.attacker_gain))
    add(report, K::kSign, d.id,
        "device " + d.id + ": attacker_loss must be strictly below attacker_gain");
  if (zero_sum) {
    if (d.defender_gain != -d.attacker_loss)
      add(report, K::kZeroSumCoupling, d.id,
          "device " + d.id + ": zero-sum requires defender_gain == -attacker_loss (" +
              describe(d.defender_gain) + " vs " + describe(-d.attacker_loss) + ")");
    if (d.defender_loss != -d.attacker_gain)
      add(report, K::kZeroSumCoupling, d.id,
          "device " + d.id + ": zero-sum requires defender_loss == -attacker_gain (" +
              describe(d.defender_loss) + " vs " + describe(-d.attacker_gain) + ")");
  }
}

}  // namespace

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kStructure: return "structure";
    case Violation::Kind::kPartition: return "partition";
    case Violation::Kind::kBounds: return "bounds";
    case Violation::Kind::kSign: return "sign";
    case Violation::Kind::kZeroSumCoupling: return "zero-sum";
  }
  return "unknown";
}

Environment::Environment(std::vector<Device> devices,
                         std::vector<DeviceClass> classes,
                         std::vector<AttestationMethod> methods, bool zero_sum)
    : devices_(std::move(devices)),
      classes_(std::move(classes)),
      methods_(std::move(methods)),
      zero_sum_(zero_sum) {
  using K = Violation::Kind;

  if (devices_.empty()) add(report_, K::kStructure, "", "environment has no devices");
  if (classes_.empty()) add(report_, K::kStructure, "", "environment has no device classes");
  if (methods_.empty()) add(report_, K::kStructure, "", "environment has no attestation methods");

  for (std::size_t i = 0; i < devices_.size(); ++i) {
    if (!device_by_id_.emplace(devices_[i].id, i).second)
      add(report_, K::kStructure, devices_[i].id, "duplicate device id " + devices_[i].id);
  }
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    if (!class_by_id_.emplace(classes_[c].id, c).second)
      add(report_, K::kStructure, classes_[c].id, "duplicate class id " + classes_[c].id);
  }
  {
    std::map<std::string, int> seen;
    for (const auto& m : methods_) {
      if (seen[m.id]++ == 1)
        add(report_, K::kStructure, m.id, "duplicate method id " + m.id);
    }
  }

  for (const auto& m : methods_) {
    if (!(m.detection_rate >= 0.0 && m.detection_rate <= 1.0))
      add(report_, K::kBounds, m.id,
          "method " + m.id + ": detection_rate must lie in [0, 1], got " +
              describe(m.detection_rate));
    if (!(m.run_cost >= 0.0) || !std::isfinite(m.run_cost))
      add(report_, K::kBounds, m.id,
          "method " + m.id + ": run_cost must be finite and >= 0, got " + describe(m.run_cost));
  }

  device_class_.assign(devices_.size(), npos);
  class_members_.resize(classes_.size());
  // Which classes list each device; used for the partition check.
  std::vector<std::vector<std::size_t>> listed_in(devices_.size());

  for (std::size_t c = 0; c < classes_.size(); ++c) {
    const auto& cls = classes_[c];
    if (!(cls.exploit_cost >= 0.0) || !std::isfinite(cls.exploit_cost))
      add(report_, K::kBounds, cls.id,
          "class " + cls.id + ": exploit_cost must be finite and >= 0, got " +
              describe(cls.exploit_cost));
    if (cls.member_device_ids.empty())
      add(report_, K::kPartition, cls.id, "class " + cls.id + " has no member devices");
    for (const auto& member : cls.member_device_ids) {
      auto it = device_by_id_.find(member);
      if (it == device_by_id_.end()) {
        add(report_, K::kPartition, cls.id,
            "class " + cls.id + " lists unknown device " + member);
        continue;
      }
      class_members_[c].push_back(it->second);
      listed_in[it->second].push_back(c);
    }
  }

  for (std::size_t i = 0; i < devices_.size(); ++i) {
    const auto& d = devices_[i];
    check_device(d, zero_sum_, report_);

    auto it = class_by_id_.find(d.class_id);
    if (it == class_by_id_.end()) {
      add(report_, K::kPartition, d.id,
          "device " + d.id + " names unknown class " + d.class_id);
    } else {
      device_class_[i] = it->second;
    }

    const auto& listing = listed_in[i];
    if (listing.size() > 1) {
      std::string names;
      for (std::size_t c : listing) {
        if (!names.empty()) names += ", ";
        names += classes_[c].id;
      }
      add(report_, K::kPartition, d.id,
          "device " + d.id + " is listed in more than one class: " + names);
    } else if (listing.empty()) {
      add(report_, K::kPartition, d.id, "device " + d.id + " is not listed by any class");
    } else if (device_class_[i] != npos && listing.front() != device_class_[i]) {
      add(report_, K::kPartition, d.id,
          "device " + d.id + " names class " + d.class_id + " but is listed by class " +
              classes_[listing.front()].id);
    }
  }
}

std::optional<std::size_t> Environment::find_device(std::string_view id) const {
  auto it = device_by_id_.find(std::string(id));
  if (it == device_by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Environment::find_class(std::string_view id) const {
  auto it = class_by_id_.find(std::string(id));
  if (it == class_by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Environment::device_index(std::string_view id) const {
  if (auto found = find_device(id)) return *found;
  throw DomainError("unknown device " + std::string(id));
}

void Environment::require_valid() const {
  if (report_.empty()) return;
  std::string message = "invalid environment:";
  for (const auto& v : report_) {
    message += "\n  [";
    message += to_string(v.kind);
    message += "] " + v.message;
  }
  throw ValidationError(message);
}

bool Environment::operator==(const Environment& other) const {
  return zero_sum_ == other.zero_sum_ && devices_ == other.devices_ &&
         classes_ == other.classes_ && methods_ == other.methods_;
}

ValidationReport validate_environment(const Environment& env) {
  return env.validation();
}

DefenderStrategy::DefenderStrategy(std::size_t device_count,
                                   std::size_t method_count, double fill)
    : device_count_(device_count),
      method_count_(method_count),
      values_(device_count * method_count, fill) {
  if (!(fill >= 0.0 && fill <= 1.0))
    throw DomainError("attestation probability must lie in [0, 1]");
}

DefenderStrategy DefenderStrategy::zeros(const Environment& env) {
  return DefenderStrategy(env.device_count(), env.method_count(), 0.0);
}

DefenderStrategy DefenderStrategy::uniform(const Environment& env,
                                           double probability) {
  return DefenderStrategy(env.device_count(), env.method_count(), probability);
}

void DefenderStrategy::set(std::size_t device, std::size_t method,
                           double probability) {
  if (device >= device_count_ || method >= method_count_)
    throw DomainError("strategy index out of range");
  if (!(probability >= 0.0 && probability <= 1.0))
    throw DomainError("attestation probability must lie in [0, 1], got " +
                      describe(probability));
  values_[device * method_count_ + method] = probability;
}

AttackerStrategy::AttackerStrategy(std::size_t device_count, bool attack_all)
    : attacks_(device_count, attack_all ? 1 : 0) {}

AttackerStrategy::AttackerStrategy(std::vector<std::uint8_t> attacks)
    : attacks_(std::move(attacks)) {
  for (auto a : attacks_) {
    if (a > 1) throw DomainError("attack entries must be 0 or 1");
  }
}

std::size_t AttackerStrategy::attacked_count() const {
  std::size_t n = 0;
  for (auto a : attacks_) n += a;
  return n;
}

namespace {

void require_conforming(const DefenderStrategy& p, const Environment& env) {
  if (!p.conforms_to(env))
    throw DomainError("defender strategy does not match the environment's devices x methods");
}

void require_conforming(const AttackerStrategy& a, const Environment& env) {
  if (!a.conforms_to(env))
    throw DomainError("attacker strategy does not match the environment's devices");
}

double detection_unchecked(const DefenderStrategy& p, std::size_t device,
                           const Environment& env) {
  double miss = 1.0;
  const auto& methods = env.methods();
  for (std::size_t m = 0; m < methods.size(); ++m) {
    miss *= 1.0 - methods[m].detection_rate * p(device, m);
  }
  return 1.0 - miss;
}

}  // namespace

double detection_probability(const DefenderStrategy& strategy,
                             std::size_t device, const Environment& env) {
  require_conforming(strategy, env);
  if (device >= env.device_count())
    throw DomainError("device index " + std::to_string(device) + " out of range");
  return detection_unchecked(strategy, device, env);
}

double detection_probability(const DefenderStrategy& strategy,
                             std::string_view device_id,
                             const Environment& env) {
  return detection_probability(strategy, env.device_index(device_id), env);
}

double defender_total_cost(const DefenderStrategy& strategy,
                           const Environment& env) {
  require_conforming(strategy, env);
  double total = 0.0;
  const auto& methods = env.methods();
  for (std::size_t d = 0; d < env.device_count(); ++d) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      total += methods[m].run_cost * strategy(d, m);
    }
  }
  return total;
}

double attacker_total_cost(const AttackerStrategy& attack,
                           const Environment& env) {
  require_conforming(attack, env);
  double total = 0.0;
  for (std::size_t c = 0; c < env.class_count(); ++c) {
    bool targeted = false;
    double devices = 0.0;
    for (std::size_t d : env.members(c)) {
      if (attack.attacks(d)) {
        targeted = true;
        devices += env.devices()[d].attack_cost;
      }
    }
    total += (targeted ? env.classes()[c].exploit_cost : 0.0) + devices;
  }
  return total;
}

double device_attack_value(const DefenderStrategy& strategy,
                           std::size_t device, const Environment& env) {
  const auto& d = env.devices()[device];
  const double detect = detection_unchecked(strategy, device, env);
  return d.attacker_loss * detect + d.attacker_gain * (1.0 - detect) -
         d.attack_cost;
}

double device_defense_value(const DefenderStrategy& strategy,
                            std::size_t device, const Environment& env) {
  const auto& d = env.devices()[device];
  const double detect = detection_unchecked(strategy, device, env);
  return d.defender_gain * detect + d.defender_loss * (1.0 - detect);
}

double defender_utility(const DefenderStrategy& strategy,
                        const AttackerStrategy& attack,
                        const Environment& env) {
  require_conforming(strategy, env);
  require_conforming(attack, env);
  double total = 0.0;
  for (std::size_t d = 0; d < env.device_count(); ++d) {
    if (attack.attacks(d)) total += device_defense_value(strategy, d, env);
  }
  return total - defender_total_cost(strategy, env);
}

double attacker_utility(const DefenderStrategy& strategy,
                        const AttackerStrategy& attack,
                        const Environment& env) {
  require_conforming(strategy, env);
  require_conforming(attack, env);
  double total = 0.0;
  for (std::size_t d = 0; d < env.device_count(); ++d) {
    if (!attack.attacks(d)) continue;
    const auto& dev = env.devices()[d];
    const double detect = detection_unchecked(strategy, d, env);
    total += dev.attacker_loss * detect + dev.attacker_gain * (1.0 - detect);
  }
  return total - attacker_total_cost(attack, env);
}

}  // namespace attestgame
