#include "attestgame/best_response.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "attestgame/errors.hpp"

namespace attestgame {

namespace {

double threshold(double numerator, const Device& device,
                 const AttestationMethod& method) {
  if (method.detection_rate == 0.0)
    throw Undeterrable("method " + method.id +
                       " has detection rate 0; no attestation probability deters");
  const double spread = device.attacker_loss - device.attacker_gain;
  if (!(spread < 0.0))
    throw DomainError("device " + device.id +
                      ": attacker_loss must be strictly below attacker_gain");
  return (1.0 / method.detection_rate) * (numerator / spread);
}

void require_single_method(const Environment& env) {
  if (env.method_count() != 1)
    throw UnsupportedCase(
        "unsupported: best response and optimal solver require a single method");
}

}  // namespace

double threshold_with_class_cost(const Device& device, const DeviceClass& cls,
                                 const AttestationMethod& method) {
  return threshold(cls.exploit_cost + device.attack_cost - device.attacker_gain,
                   device, method);
}

double threshold_without_class_cost(const Device& device,
                                    const AttestationMethod& method) {
  return threshold(device.attack_cost - device.attacker_gain, device, method);
}

ClassAttack conditional_class_attack(const DefenderStrategy& strategy,
                                     std::size_t class_index,
                                     const Environment& env) {
  require_single_method(env);
  env.require_valid();
  if (!strategy.conforms_to(env))
    throw DomainError("defender strategy does not match the environment");
  if (class_index >= env.class_count())
    throw DomainError("class index out of range");

  const auto& method = env.methods().front();
  const auto members = env.members(class_index);

  ClassAttack result;
  result.class_index = class_index;
  result.conditional.assign(members.size(), 0);

  bool any = false;
  bool knife_edge_device = false;
  double utility = 0.0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const std::size_t d = members[k];
    const auto& device = env.devices()[d];
    const double value = device_attack_value(strategy, d, env);
    bool attack;
    if (method.detection_rate > 0.0) {
      attack = strategy(d, 0) < threshold_without_class_cost(device, method);
    } else {
      attack = value > 0.0;
    }
    if (std::abs(value) <= kUtilityTolerance) knife_edge_device = true;
    if (attack) {
      result.conditional[k] = 1;
      utility += value;
      any = true;
    }
  }
  result.utility = utility - env.classes()[class_index].exploit_cost;

  if (any) {
    if (std::abs(result.utility) <= kUtilityTolerance) {
      result.tie = true;
    } else if (result.utility > kUtilityTolerance) {
      result.attack = true;
      result.tie = knife_edge_device;
    }
  }
  return result;
}

BestResponseResult best_response(const DefenderStrategy& strategy,
                                 const Environment& env) {
  require_single_method(env);
  env.require_valid();

  BestResponseResult result;
  result.canonical_attack = AttackerStrategy(env.device_count());
  result.per_class.reserve(env.class_count());
  for (std::size_t c = 0; c < env.class_count(); ++c) {
    ClassAttack cls = conditional_class_attack(strategy, c, env);
    if (cls.attack) {
      const auto members = env.members(c);
      for (std::size_t k = 0; k < members.size(); ++k) {
        if (cls.conditional[k]) result.canonical_attack.set(members[k], true);
      }
    }
    result.is_tie = result.is_tie || cls.tie;
    result.per_class.push_back(std::move(cls));
  }
  result.attack_utility =
      attacker_utility(strategy, result.canonical_attack, env);
  return result;
}

EnumeratedResponse brute_force_best_response(const DefenderStrategy& strategy,
                                             const Environment& env,
                                             std::size_t cap) {
  env.require_valid();
  if (!strategy.conforms_to(env))
    throw DomainError("defender strategy does not match the environment");
  const std::size_t n = env.device_count();
  constexpr std::size_t kHardLimit = 26;
  if (n > cap || n > kHardLimit)
    throw EnumerationLimit("refusing to enumerate 2^" + std::to_string(n) +
                           " attack vectors; device cap is " +
                           std::to_string(std::min(cap, kHardLimit)));

  std::vector<double> value(n);
  std::vector<std::size_t> owner(n);
  for (std::size_t d = 0; d < n; ++d) {
    value[d] = device_attack_value(strategy, d, env);
    owner[d] = env.class_of(d);
  }

  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<double> gross(total, 0.0);
  std::vector<double> exploit(total, 0.0);
  std::vector<std::uint64_t> touched(total, 0);

  // Bit d of a mask is a_d; lexicographic order on vectors compares the
  // lowest differing device index.
  auto lex_less = [](std::uint64_t a, std::uint64_t b) {
    const std::uint64_t diff = a ^ b;
    if (diff == 0) return false;
    return (a & (diff & (~diff + 1))) == 0;
  };

  std::uint64_t best = 0;
  double best_utility = 0.0;
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    const std::uint64_t prev = mask & (mask - 1);
    const std::uint64_t class_bit = std::uint64_t{1} << owner[low];
    gross[mask] = gross[prev] + value[low];
    touched[mask] = touched[prev] | class_bit;
    exploit[mask] = exploit[prev] + ((touched[prev] & class_bit)
                                         ? 0.0
                                         : env.classes()[owner[low]].exploit_cost);
    const double u = gross[mask] - exploit[mask];

    if (u > best_utility + kUtilityTolerance) {
      best = mask;
      best_utility = u;
    } else if (u >= best_utility - kUtilityTolerance) {
      const int count = std::popcount(mask);
      const int best_count = std::popcount(best);
      if (count < best_count || (count == best_count && lex_less(mask, best))) {
        best = mask;
        best_utility = u;
      }
    }
  }

  EnumeratedResponse result;
  result.attack = AttackerStrategy(n);
  for (std::size_t d = 0; d < n; ++d) {
    if (best & (std::uint64_t{1} << d)) result.attack.set(d, true);
  }
  result.utility = attacker_utility(strategy, result.attack, env);
  return result;
}

}  // namespace attestgame
