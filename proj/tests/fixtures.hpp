#pragma once

#include <string>
#include <vector>

#include "attestgame/game_model.hpp"
#include "oracles.hpp"

namespace fixtures {

using attestgame::AttestationMethod;
using attestgame::Device;
using attestgame::DeviceClass;
using attestgame::Environment;

inline Device zero_sum_device(std::string id, std::string cls, double gain_a,
                              double loss_a, double attack_cost) {
  return Device{std::move(id), std::move(cls), -loss_a, -gain_a, gain_a, loss_a, attack_cost};
}

// One device, one class, one method.
inline Environment single(double mu, double run_cost, double exploit,
                          double attack_cost, double gain, double loss) {
  return Environment({zero_sum_device("d0", "c0", gain, loss, attack_cost)},
                     {DeviceClass{"c0", exploit, {"d0"}}},
                     {AttestationMethod{"m0", mu, run_cost}}, true);
}

// The worked single-device instance: mu 0.8, C_D 4, C_E 15, C_d 2, G 30, L -30.
inline Environment worked_single() { return single(0.8, 4.0, 15.0, 2.0, 30.0, -30.0); }

// The worked deterrence instance: one class, exploit 15, two devices.
inline Environment worked_pair() {
  return Environment({zero_sum_device("d1", "c0", 30.0, -30.0, 2.0),
                      zero_sum_device("d2", "c0", 20.0, -20.0, 2.0)},
                     {DeviceClass{"c0", 15.0, {"d1", "d2"}}},
                     {AttestationMethod{"m0", 0.8, 4.0}}, true);
}

inline attestgame::DefenderStrategy strategy_of(const oracle::Probabilities& p) {
  attestgame::DefenderStrategy s(p.size(), 1);
  for (std::size_t d = 0; d < p.size(); ++d) s.set(d, 0, p[d]);
  return s;
}

inline oracle::Probabilities probabilities_of(const attestgame::DefenderStrategy& s) {
  oracle::Probabilities p(s.device_count());
  for (std::size_t d = 0; d < p.size(); ++d) p[d] = s(d, 0);
  return p;
}

inline oracle::Attack attack_of(const attestgame::AttackerStrategy& a) {
  return oracle::Attack(a.values().begin(), a.values().end());
}

}  // namespace fixtures
