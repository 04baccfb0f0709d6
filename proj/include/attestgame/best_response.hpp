#pragma once

// Follower best response for the single-method game.
//
// Within a class, once the exploit is paid for, each device is attacked
// independently iff its attestation probability is below its per-device
// threshold. The class is then attacked iff that conditional attack has
// positive utility. Classes are independent of each other.

#include <cstddef>
#include <vector>

#include "attestgame/game_model.hpp"

namespace attestgame {

// Absolute tolerance on utilities; attacker utilities within this of zero are
// ties and resolve to "no attack".
inline constexpr double kUtilityTolerance = 1e-9;

inline constexpr std::size_t kDefaultEnumerationCap = 20;

// Attestation probability at which attacking a lone device of `cls` breaks
// even, exploit cost included. May be <= 0 (never worth attacking) or > 1
// (cannot be deterred). Throws Undeterrable if the method never detects.
double threshold_with_class_cost(const Device& device, const DeviceClass& cls,
                                 const AttestationMethod& method);

// Same, with the exploit cost treated as already paid.
double threshold_without_class_cost(const Device& device,
                                    const AttestationMethod& method);

struct ClassAttack {
  std::size_t class_index = 0;
  // Attack vector restricted to the class, aligned with Environment::members.
  std::vector<std::uint8_t> conditional;
  // Attacker utility of the conditional attack, exploit cost included.
  double utility = 0.0;
  bool attack = false;
  bool tie = false;
};

struct BestResponseResult {
  AttackerStrategy canonical_attack;
  double attack_utility = 0.0;
  bool is_tie = false;
  std::vector<ClassAttack> per_class;
};

// Throws UnsupportedCase when the environment has more than one method.
ClassAttack conditional_class_attack(const DefenderStrategy& strategy,
                                     std::size_t class_index,
                                     const Environment& env);

BestResponseResult best_response(const DefenderStrategy& strategy,
                                 const Environment& env);

struct EnumeratedResponse {
  AttackerStrategy attack;
  double utility = 0.0;
};

// Exhaustive argmax over all 2^n attack vectors. Near-ties (within
// kUtilityTolerance) go to fewer attacked devices, then to the
// lexicographically smaller vector. Works for any number of methods.
// Throws EnumerationLimit above `cap` devices.
EnumeratedResponse brute_force_best_response(
    const DefenderStrategy& strategy, const Environment& env,
    std::size_t cap = kDefaultEnumerationCap);

}  // namespace attestgame
