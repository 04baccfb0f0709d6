#pragma once

// Leader-optimal attestation strategies for the single-method game, the
// naive baselines they are compared against, and a sampling oracle.
//
// Per class the defender either accepts that the class may be attacked and
// picks each device's probability on its own (the "non-deter" candidate), or
// pays the minimum cost that makes attacking the class unprofitable (the
// "deter" candidate, a linear program with one constraint). The better of the
// two is taken per class; classes do not interact.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "attestgame/best_response.hpp"
#include "attestgame/game_model.hpp"

namespace attestgame {

enum class ClassMode { kNonDeter, kDeter, kTie };

std::string_view to_string(ClassMode mode);

struct ClassCandidates {
  std::size_t class_index = 0;
  // Probabilities aligned with Environment::members(class_index).
  std::vector<double> non_deter;
  // Class-local U_D of the non-deter candidate against the class best response.
  double non_deter_utility = 0.0;
  // Absent when no probability vector inside the box deters the class.
  std::optional<std::vector<double>> deter;
  // Class-local U_D of the deter candidate against no attack.
  std::optional<double> deter_utility;
  ClassMode mode = ClassMode::kNonDeter;
};

struct DefenderSolution {
  DefenderStrategy strategy;
  std::vector<ClassMode> mode_per_class;
  double defender_utility = 0.0;  // against attacker_best_response
  BestResponseResult attacker_best_response;
  std::vector<ClassCandidates> candidate_log;
};

struct SolverOptions {
  // Added to every positive deterrence probability (clamped to 1) so the
  // attacker strictly, rather than weakly, prefers not to attack.
  double deterrence_epsilon = 0.0;
};

// Closed form for one device and one method. Throws UnsupportedCase for any
// other shape.
DefenderSolution optimal_single_device(const Environment& env,
                                       const SolverOptions& options = {});

// Best probabilities when the class is allowed to be attacked.
std::vector<double> non_deter_strategy(std::size_t class_index,
                                       const Environment& env);

// Cheapest probabilities that make attacking the class weakly unprofitable,
// or nullopt if even the per-device upper bounds do not deter.
std::optional<std::vector<double>> deterrence_strategy(
    std::size_t class_index, const Environment& env, double epsilon = 0.0);

DefenderSolution optimal_strategy(const Environment& env,
                                  const SolverOptions& options = {});

DefenderStrategy baseline_never(const Environment& env);
DefenderStrategy baseline_always(const Environment& env);

struct UniformBaseline {
  double probability = 0.0;
  DefenderStrategy strategy;
  double defender_utility = 0.0;
};

// Best single probability applied to every device. U_D against the best
// response is piecewise linear in that probability, so only the breakpoints
// need to be evaluated.
UniformBaseline baseline_optimal_uniform(const Environment& env);

// U_D(p, canonical best response to p).
double defender_utility_at_best_response(const DefenderStrategy& strategy,
                                         const Environment& env);

// Writes per-class member probabilities into a full strategy.
DefenderStrategy assemble_strategy(
    const Environment& env,
    const std::vector<std::vector<double>>& per_class);

struct SampledStrategy {
  DefenderStrategy strategy;
  double defender_utility = 0.0;
};

// Draws `sample_count` strategies uniformly from the box
// prod_d [0, min(1, tau_d)], scores each against an exhaustive best
// response, and returns the best. nullopt when sample_count is 0.
std::optional<SampledStrategy> randomized_search_check(
    const Environment& env, std::size_t sample_count, std::uint64_t seed,
    std::size_t cap = kDefaultEnumerationCap);

}  // namespace attestgame
