#pragma once

// Domain types of the attestation game and the closed-form expected utilities.
//
// Devices are addressed by their position in Environment::devices(); the
// strategy types are dense vectors in that order. Losses are negative numbers
// (a loss of 30 is stored as -30).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace attestgame {

struct AttestationMethod {
  std::string id;
  double detection_rate = 0.0;  // probability a run detects a compromise
  double run_cost = 0.0;        // defender cost of one run

  bool operator==(const AttestationMethod&) const = default;
};

struct Device {
  std::string id;
  std::string class_id;
  double defender_gain = 0.0;  // >= 0, compromise detected
  double defender_loss = 0.0;  // <= 0, compromise undetected
  double attacker_gain = 0.0;  // >= 0, compromise undetected
  double attacker_loss = 0.0;  // <= 0, compromise detected
  double attack_cost = 0.0;    // >= 0, per-device attack cost

  bool operator==(const Device&) const = default;
};

// Devices sharing one exploit. The exploit cost is paid once per class that
// has at least one attacked device.
struct DeviceClass {
  std::string id;
  double exploit_cost = 0.0;
  std::vector<std::string> member_device_ids;

  bool operator==(const DeviceClass&) const = default;
};

struct Violation {
  enum class Kind { kStructure, kPartition, kBounds, kSign, kZeroSumCoupling };

  Kind kind;
  std::string subject;  // id of the offending device/class/method, if any
  std::string message;
};

using ValidationReport = std::vector<Violation>;

std::string_view to_string(Violation::Kind kind);

// Immutable game instance. Construction never throws on invariant violations;
// they are collected into validation() so that malformed input can be
// reported in full. Solvers require valid().
class Environment {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Environment(std::vector<Device> devices, std::vector<DeviceClass> classes,
              std::vector<AttestationMethod> methods, bool zero_sum);

  const std::vector<Device>& devices() const { return devices_; }
  const std::vector<DeviceClass>& classes() const { return classes_; }
  const std::vector<AttestationMethod>& methods() const { return methods_; }
  bool zero_sum() const { return zero_sum_; }

  std::size_t device_count() const { return devices_.size(); }
  std::size_t class_count() const { return classes_.size(); }
  std::size_t method_count() const { return methods_.size(); }

  std::optional<std::size_t> find_device(std::string_view id) const;
  std::optional<std::size_t> find_class(std::string_view id) const;
  // Throws DomainError for an unknown id.
  std::size_t device_index(std::string_view id) const;

  // Index of the class named by the device's class_id, or npos.
  std::size_t class_of(std::size_t device) const { return device_class_[device]; }
  // Device indices of a class, in the class's member order. Unknown member
  // ids are skipped.
  std::span<const std::size_t> members(std::size_t class_index) const {
    return class_members_[class_index];
  }

  const ValidationReport& validation() const { return report_; }
  bool valid() const { return report_.empty(); }
  // Throws ValidationError listing every violation.
  void require_valid() const;

  bool operator==(const Environment& other) const;

 private:
  std::vector<Device> devices_;
  std::vector<DeviceClass> classes_;
  std::vector<AttestationMethod> methods_;
  bool zero_sum_;

  std::unordered_map<std::string, std::size_t> device_by_id_;
  std::unordered_map<std::string, std::size_t> class_by_id_;
  std::vector<std::size_t> device_class_;
  std::vector<std::vector<std::size_t>> class_members_;
  ValidationReport report_;
};

ValidationReport validate_environment(const Environment& env);

// Leader's mixed strategy: p(device, method) in [0, 1].
class DefenderStrategy {
 public:
  DefenderStrategy() = default;
  DefenderStrategy(std::size_t device_count, std::size_t method_count,
                   double fill = 0.0);

  static DefenderStrategy zeros(const Environment& env);
  static DefenderStrategy uniform(const Environment& env, double probability);

  double operator()(std::size_t device, std::size_t method) const {
    return values_[device * method_count_ + method];
  }
  // Throws DomainError unless 0 <= probability <= 1.
  void set(std::size_t device, std::size_t method, double probability);

  std::size_t device_count() const { return device_count_; }
  std::size_t method_count() const { return method_count_; }
  std::span<const double> values() const { return values_; }

  bool conforms_to(const Environment& env) const {
    return device_count_ == env.device_count() &&
           method_count_ == env.method_count();
  }

  bool operator==(const DefenderStrategy&) const = default;

 private:
  std::size_t device_count_ = 0;
  std::size_t method_count_ = 0;
  std::vector<double> values_;
};

// Follower's pure strategy: attack (1) or leave (0) each device.
class AttackerStrategy {
 public:
  AttackerStrategy() = default;
  explicit AttackerStrategy(std::size_t device_count, bool attack_all = false);
  // Throws DomainError if any entry is not 0 or 1.
  explicit AttackerStrategy(std::vector<std::uint8_t> attacks);

  bool attacks(std::size_t device) const { return attacks_[device] != 0; }
  void set(std::size_t device, bool attack) { attacks_[device] = attack ? 1 : 0; }

  std::size_t size() const { return attacks_.size(); }
  std::size_t attacked_count() const;
  bool none() const { return attacked_count() == 0; }
  std::span<const std::uint8_t> values() const { return attacks_; }

  bool conforms_to(const Environment& env) const {
    return attacks_.size() == env.device_count();
  }

  bool operator==(const AttackerStrategy&) const = default;

 private:
  std::vector<std::uint8_t> attacks_;
};

// P_d(p) = 1 - prod_m (1 - mu_m * p_dm).
double detection_probability(const DefenderStrategy& strategy,
                             std::size_t device, const Environment& env);
double detection_probability(const DefenderStrategy& strategy,
                             std::string_view device_id,
                             const Environment& env);

double defender_total_cost(const DefenderStrategy& strategy,
                           const Environment& env);
double attacker_total_cost(const AttackerStrategy& attack,
                           const Environment& env);

double defender_utility(const DefenderStrategy& strategy,
                        const AttackerStrategy& attack,
                        const Environment& env);
double attacker_utility(const DefenderStrategy& strategy,
                        const AttackerStrategy& attack,
                        const Environment& env);

// Expected attacker payoff from one attacked device, net of its own attack
// cost but not of the class exploit cost.
double device_attack_value(const DefenderStrategy& strategy,
                           std::size_t device, const Environment& env);

// Contribution of one attacked device to the defender's utility, before
// attestation costs.
double device_defense_value(const DefenderStrategy& strategy,
                            std::size_t device, const Environment& env);

}  // namespace attestgame
