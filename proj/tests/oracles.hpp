#pragma once

// Reference implementations used only by the tests. They are written from
// the model definitions directly and share no code with the library beyond
// the plain data types, so agreement between the two is meaningful.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "attestgame/game_model.hpp"

namespace oracle {

using attestgame::Environment;

// Single-method probabilities, one per device.
using Probabilities = std::vector<double>;
using Attack = std::vector<int>;

double attacker_utility(const Environment& env, const Probabilities& p,
                        const Attack& a);
double defender_utility(const Environment& env, const Probabilities& p,
                        const Attack& a);

struct Response {
  Attack attack;
  double utility = 0.0;
};

// Plain loop over all 2^n attack vectors. Ties within `tol` go to fewer
// attacked devices, then to the lexicographically smaller vector.
Response enumerate_best_response(const Environment& env, const Probabilities& p,
                                 double tol = 1e-9);

double defender_value_at_response(const Environment& env, const Probabilities& p);

// Smallest x on the grid lo, lo+step, ... where f changes sign from its value
// at lo, or nullopt.
std::optional<double> first_sign_change(const std::function<double(double)>& f,
                                        double lo, double hi, double step);

// Best grid point of f on [lo, hi]; first maximizer wins.
struct GridMax {
  double x = 0.0;
  double value = 0.0;
};
GridMax grid_maximize(const std::function<double(double)>& f, double lo,
                      double hi, std::size_t intervals);

// grid_maximize at `intervals`, then two rounds of 1000-interval zooms
// around the three best points. For piecewise-linear f this recovers the
// supremum far below the coarse grid's resolution.
GridMax zoom_maximize(const std::function<double(double)>& f, double lo,
                      double hi, std::size_t intervals);

// min c.p  s.t.  sum coef_i p_i >= rhs, 0 <= p_i <= upper_i, by listing every
// vertex of the polytope (all but at most one coordinate at a bound).
struct LpOptimum {
  double cost = 0.0;
  Probabilities p;
};
std::optional<LpOptimum> lp_by_vertices(const std::vector<double>& cost,
                                        const std::vector<double>& coef,
                                        double rhs,
                                        const std::vector<double>& upper);

// Best defender utility over the product of per-device candidates
// {0, clamp(tau_bar), clamp(tau)} with exhaustive attacker responses.
double best_candidate_product(const Environment& env);

// Fraction of uniformly random b-subsets of N blocks containing one of the
// first k blocks, drawn with std::shuffle.
double monte_carlo_checksum(std::uint64_t n, std::uint64_t k, std::uint64_t b,
                            std::uint64_t trials, std::uint64_t seed);

// Exact detection probability by listing every b-subset (small N only).
double enumerate_checksum(unsigned n, unsigned k, unsigned b);

// Monte-Carlo estimate of both utilities by sampling detection outcomes.
struct SampledUtilities {
  double defender = 0.0;
  double attacker = 0.0;
  double defender_stderr = 0.0;
  double attacker_stderr = 0.0;
};
SampledUtilities monte_carlo_utilities(const Environment& env,
                                       const Probabilities& p, const Attack& a,
                                       std::uint64_t trials, std::uint64_t seed);

// Random single-method instance for property tests.
struct InstanceShape {
  std::size_t devices = 4;
  std::size_t classes = 2;
  bool zero_sum = true;
  // Ranges default to the scenario generator's defaults.
  double gain_low = 20.0, gain_high = 40.0;
  double mu_low = 0.5, mu_high = 0.9;
  double attest_low = 0.0, attest_high = 10.0;
  double exploit_low = 15.0, exploit_high = 40.0;
  double attack_low = 1.0, attack_high = 3.0;
};
Environment random_instance(const InstanceShape& shape, std::mt19937_64& rng);

// Random devices over wide ranges that reach the edge cases: thresholds at or
// below 0 and above 1, free attestation, zero exploit cost.
Environment wild_instance(std::size_t devices, std::size_t classes,
                          std::mt19937_64& rng);

Probabilities random_probabilities(std::size_t n, std::mt19937_64& rng);

}  // namespace oracle
