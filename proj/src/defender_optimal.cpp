#include "attestgame/defender_optimal.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "attestgame/errors.hpp"
#include "attestgame/random.hpp"

namespace attestgame {

namespace {

void require_single_method(const Environment& env) {
  if (env.method_count() != 1)
    throw UnsupportedCase(
        "unsupported: optimal solver requires a single method");
}

// Probability that maximizes the defender's utility from one device that
// stays attacked below `threshold`: either 0 (accept the loss) or the
// threshold itself.
double accept_or_threshold(double threshold, const Device& device,
                           const AttestationMethod& method) {
  const double mu = method.detection_rate;
  const double cost = method.run_cost;
  if (threshold <= 0.0) return 0.0;
  const double risk_slope = (device.defender_gain - device.defender_loss) * mu;
  if (threshold > 1.0) {
    // Unreachable threshold: the device is attacked at any p, and U_D is
    // linear in p on [0, 1].
    return risk_slope > cost ? 1.0 : 0.0;
  }
  const bool attestation_not_worth_risk = cost >= risk_slope;
  // With free attestation deterring is never declined.
  const bool deterring_costs_more =
      cost > 0.0 && threshold >= device.defender_loss / (-cost);
  return attestation_not_worth_risk && deterring_costs_more ? 0.0 : threshold;
}

double class_defender_utility(const DefenderStrategy& p,
                              const std::vector<std::uint8_t>& attacked,
                              std::size_t class_index, const Environment& env) {
  const auto members = env.members(class_index);
  double total = 0.0;
  double cost = 0.0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (attacked[k]) total += device_defense_value(p, members[k], env);
    cost += env.methods().front().run_cost * p(members[k], 0);
  }
  return total - cost;
}

double sum_cost(const std::vector<double>& probabilities, double run_cost) {
  double total = 0.0;
  for (double p : probabilities) total += run_cost * p;
  return total;
}

}  // namespace

std::string_view to_string(ClassMode mode) {
  switch (mode) {
    case ClassMode::kNonDeter: return "non-deter";
    case ClassMode::kDeter: return "deter";
    case ClassMode::kTie: return "tie";
  }
  return "unknown";
}

DefenderStrategy assemble_strategy(
    const Environment& env,
    const std::vector<std::vector<double>>& per_class) {
  DefenderStrategy p = DefenderStrategy::zeros(env);
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    const auto members = env.members(c);
    for (std::size_t k = 0; k < members.size(); ++k) {
      p.set(members[k], 0, per_class[c][k]);
    }
  }
  return p;
}

double defender_utility_at_best_response(const DefenderStrategy& strategy,
                                         const Environment& env) {
  return defender_utility(strategy, best_response(strategy, env).canonical_attack,
                          env);
}

DefenderSolution optimal_single_device(const Environment& env,
                                       const SolverOptions& options) {
  require_single_method(env);
  env.require_valid();
  if (env.device_count() != 1)
    throw UnsupportedCase("single-device solver requires exactly one device");

  const auto& device = env.devices().front();
  const auto& cls = env.classes().front();
  const auto& method = env.methods().front();

  ClassCandidates log;
  log.class_index = 0;

  double chosen = 0.0;
  if (method.detection_rate == 0.0) {
    // Attestation never detects; any positive probability is pure cost.
    chosen = 0.0;
    log.non_deter = {0.0};
    log.mode = ClassMode::kNonDeter;
  } else {
    const double tau = threshold_with_class_cost(device, cls, method);
    chosen = accept_or_threshold(tau, device, method);

    // Candidates that the closed form chooses between.
    const double accept = (tau > 1.0 && chosen == 1.0) ? 1.0 : 0.0;
    log.non_deter = {accept};
    log.non_deter_utility =
        tau > 0.0 ? device_defense_value(DefenderStrategy(1, 1, accept), 0, env) -
                        method.run_cost * accept
                  : -method.run_cost * accept;
    if (tau <= 1.0) {
      const double deter = std::max(tau, 0.0);
      log.deter = std::vector<double>{deter};
      log.deter_utility = -method.run_cost * deter;
    }

    const bool deterred = tau <= 0.0 || (tau <= 1.0 && chosen == tau);
    if (tau <= 0.0) {
      log.mode = ClassMode::kDeter;
    } else if (log.deter_utility &&
        std::abs(*log.deter_utility - log.non_deter_utility) <= kUtilityTolerance) {
      log.mode = ClassMode::kTie;
    } else {
      log.mode = deterred ? ClassMode::kDeter : ClassMode::kNonDeter;
    }
    if (deterred && tau > 0.0 && options.deterrence_epsilon > 0.0)
      chosen = std::min(1.0, chosen + options.deterrence_epsilon);
  }

  DefenderSolution solution;
  solution.strategy = DefenderStrategy(1, 1, chosen);
  solution.mode_per_class = {log.mode};
  solution.candidate_log = {std::move(log)};
  solution.attacker_best_response = best_response(solution.strategy, env);
  solution.defender_utility = defender_utility(
      solution.strategy, solution.attacker_best_response.canonical_attack, env);
  return solution;
}

std::vector<double> non_deter_strategy(std::size_t class_index,
                                       const Environment& env) {
  require_single_method(env);
  env.require_valid();
  if (class_index >= env.class_count()) throw DomainError("class index out of range");

  const auto& method = env.methods().front();
  const auto members = env.members(class_index);
  std::vector<double> result(members.size(), 0.0);
  if (method.detection_rate == 0.0) return result;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto& device = env.devices()[members[k]];
    result[k] = accept_or_threshold(threshold_without_class_cost(device, method),
                                    device, method);
  }
  return result;
}

std::optional<std::vector<double>> deterrence_strategy(std::size_t class_index,
                                                       const Environment& env,
                                                       double epsilon) {
  require_single_method(env);
  env.require_valid();
  if (class_index >= env.class_count()) throw DomainError("class index out of range");

  const auto& method = env.methods().front();
  const double mu = method.detection_rate;
  const auto members = env.members(class_index);
  std::vector<double> result(members.size(), 0.0);

  struct Item {
    std::size_t slot;
    double coefficient;  // reduction of U_A(p, 1) per unit of p
    double bound;
  };
  std::vector<Item> items;
  // Attacker utility of attacking every device that is worth attacking once
  // the exploit exists, at p = 0. Devices that are never worth attacking are
  // left out: attacking them is not part of the conditional best response.
  double excess = -env.classes()[class_index].exploit_cost;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto& d = env.devices()[members[k]];
    const double base = d.attacker_gain - d.attack_cost;
    if (base <= 0.0) continue;
    excess += base;
    if (mu > 0.0) {
      const double bound = std::min(1.0, threshold_without_class_cost(d, method));
      items.push_back({k, mu * (d.attacker_gain - d.attacker_loss), bound});
    }
  }
  if (excess <= 0.0) return result;

  std::stable_sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
    if (a.coefficient != b.coefficient) return a.coefficient > b.coefficient;
    return env.devices()[members[a.slot]].id < env.devices()[members[b.slot]].id;
  });

  double remaining = excess;
  for (const auto& item : items) {
    if (remaining <= 0.0) break;
    const double needed = remaining / item.coefficient;
    if (needed <= item.bound) {
      result[item.slot] = needed;
      remaining = 0.0;
    } else {
      result[item.slot] = item.bound;
      remaining -= item.bound * item.coefficient;
    }
  }
  if (remaining > kUtilityTolerance) return std::nullopt;

  if (epsilon > 0.0) {
    for (double& p : result) {
      if (p > 0.0) p = std::min(1.0, p + epsilon);
    }
  }
  return result;
}

DefenderSolution optimal_strategy(const Environment& env,
                                  const SolverOptions& options) {
  require_single_method(env);
  env.require_valid();
  const double run_cost = env.methods().front().run_cost;

  std::vector<std::vector<double>> non_deter(env.class_count());
  std::vector<std::optional<std::vector<double>>> deter(env.class_count());
  for (std::size_t c = 0; c < env.class_count(); ++c) {
    non_deter[c] = non_deter_strategy(c, env);
    deter[c] = deterrence_strategy(c, env);
  }
  const DefenderStrategy non_deter_full = assemble_strategy(env, non_deter);

  DefenderSolution solution;
  std::vector<std::vector<double>> chosen(env.class_count());
  for (std::size_t c = 0; c < env.class_count(); ++c) {
    ClassCandidates log;
    log.class_index = c;
    log.non_deter = non_deter[c];
    // Against the class best response, not the bare conditional attack.
    const ClassAttack conditional = conditional_class_attack(non_deter_full, c, env);
    const std::vector<std::uint8_t> nobody(conditional.conditional.size(), 0);
    log.non_deter_utility = class_defender_utility(
        non_deter_full, conditional.attack ? conditional.conditional : nobody, c, env);
    log.deter = deter[c];
    if (deter[c]) log.deter_utility = -sum_cost(*deter[c], run_cost);

    if (!log.deter_utility) {
      log.mode = ClassMode::kNonDeter;
    } else if (log.non_deter_utility > *log.deter_utility + kUtilityTolerance) {
      log.mode = ClassMode::kNonDeter;
    } else if (log.non_deter_utility >= *log.deter_utility - kUtilityTolerance) {
      log.mode = ClassMode::kTie;
    } else {
      log.mode = ClassMode::kDeter;
    }

    if (log.mode == ClassMode::kNonDeter) {
      chosen[c] = non_deter[c];
    } else if (options.deterrence_epsilon > 0.0) {
      chosen[c] = *deterrence_strategy(c, env, options.deterrence_epsilon);
    } else {
      chosen[c] = *deter[c];
    }
    solution.mode_per_class.push_back(log.mode);
    solution.candidate_log.push_back(std::move(log));
  }

  solution.strategy = assemble_strategy(env, chosen);
  solution.attacker_best_response = best_response(solution.strategy, env);
  solution.defender_utility = defender_utility(
      solution.strategy, solution.attacker_best_response.canonical_attack, env);
  return solution;
}

DefenderStrategy baseline_never(const Environment& env) {
  return DefenderStrategy::uniform(env, 0.0);
}

DefenderStrategy baseline_always(const Environment& env) {
  return DefenderStrategy::uniform(env, 1.0);
}

UniformBaseline baseline_optimal_uniform(const Environment& env) {
  require_single_method(env);
  env.require_valid();

  const auto& method = env.methods().front();
  const double mu = method.detection_rate;
  std::set<double> candidates = {0.0, 1.0};

  if (mu > 0.0) {
    for (std::size_t c = 0; c < env.class_count(); ++c) {
      // Devices of the class in order of decreasing per-device threshold;
      // the attacked set for a uniform q is a prefix of this order.
      struct Entry {
        double threshold;
        double base;   // G_A - C_A^d
        double slope;  // mu * (G_A - L_A)
      };
      std::vector<Entry> entries;
      for (std::size_t d : env.members(c)) {
        const auto& dev = env.devices()[d];
        const double t = threshold_without_class_cost(dev, method);
        if (t > 0.0 && t < 1.0) candidates.insert(t);
        entries.push_back({t, dev.attacker_gain - dev.attack_cost,
                           mu * (dev.attacker_gain - dev.attacker_loss)});
      }
      std::sort(entries.begin(), entries.end(),
                [](const Entry& a, const Entry& b) { return a.threshold > b.threshold; });
      double base = -env.classes()[c].exploit_cost;
      double slope = 0.0;
      for (const auto& e : entries) {
        if (e.threshold <= 0.0) break;
        base += e.base;
        slope += e.slope;
        // Zero crossing of the class-local attacker utility for this set.
        const double q = base / slope;
        if (q > 0.0 && q < 1.0) candidates.insert(q);
      }
    }
  }

  UniformBaseline best;
  bool first = true;
  for (double q : candidates) {
    DefenderStrategy p = DefenderStrategy::uniform(env, q);
    const double u = defender_utility_at_best_response(p, env);
    if (first || u > best.defender_utility + kUtilityTolerance) {
      best = {q, std::move(p), u};
      first = false;
    }
  }
  return best;
}

std::optional<SampledStrategy> randomized_search_check(const Environment& env,
                                                       std::size_t sample_count,
                                                       std::uint64_t seed,
                                                       std::size_t cap) {
  require_single_method(env);
  env.require_valid();
  if (env.device_count() > cap)
    throw EnumerationLimit("randomized search uses exhaustive best responses; " +
                           std::to_string(env.device_count()) +
                           " devices exceed the cap of " + std::to_string(cap));
  if (sample_count == 0) return std::nullopt;

  const auto& method = env.methods().front();
  std::vector<double> upper(env.device_count(), 0.0);
  if (method.detection_rate > 0.0) {
    for (std::size_t d = 0; d < env.device_count(); ++d) {
      const auto& dev = env.devices()[d];
      const double tau = threshold_with_class_cost(
          dev, env.classes()[env.class_of(d)], method);
      upper[d] = std::clamp(tau, 0.0, 1.0);
    }
  }

  Rng rng(seed);
  std::optional<SampledStrategy> best;
  DefenderStrategy p = DefenderStrategy::zeros(env);
  for (std::size_t s = 0; s < sample_count; ++s) {
    for (std::size_t d = 0; d < env.device_count(); ++d) {
      p.set(d, 0, rng.uniform(0.0, upper[d]));
    }
    const auto response = brute_force_best_response(p, env, cap);
    const double u = defender_utility(p, response.attack, env);
    if (!best || u > best->defender_utility) best = SampledStrategy{p, u};
  }
  return best;
}

}  // namespace attestgame
